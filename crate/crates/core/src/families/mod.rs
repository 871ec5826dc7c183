//! Concrete solution families.

pub mod kerr_sen;
pub mod rotoid;
pub mod soliton;

pub use kerr_sen::{kerr_sen_offdiag_check, kerr_sen_primary, KerrSenParams, KerrSenPrimary};
pub use rotoid::{background_metric, horizon_parametric, horizon_radius, rotoid_metric, RotoidParams};
pub use soliton::{
    kdv_soliton, mass_polarization, sol3d_residual, soliton_background_metric, soliton_ddx,
    soliton_mass_metric, SolitonParams,
};

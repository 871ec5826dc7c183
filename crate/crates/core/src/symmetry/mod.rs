//! Hidden-symmetry machinery: Killing residuals, torsion-modified exterior
//! calculus with closed conformal Killing-Yano checks, and the
//! quantum-anomaly commutator coefficients.

pub mod anomaly;
pub mod forms;
pub mod geometry;
pub mod killing;

pub use anomaly::{
    anomaly_vanishing_check, blocks_applied, box_field, commutator_probe, flow_field,
    rank2_commutator_coeffs, sk_anomaly, sk_antisym_defect, AnomalyReport, CommutatorBlocks,
};
pub use forms::{
    cky_residual, h_torsion, h_torsion_coordinate, torsion_covariant_derivative, torsion_d_star,
    wedge_contract, wedge_contract_eta, Basis, HTorsion, PForm, PFormField,
};
pub use geometry::{max_ricci, MatrixMetric, MatrixMetricFn};
pub use killing::{
    ckv_anomaly_coeffs, coordinate_vector, killing_residual, killing_residual_coord,
    klein_gordon, sk_residual, sk_residual_coord, SymTensorField, VectorField,
};

//! Numerical differential geometry for generic off-diagonal Einstein
//! metrics.
//!
//! The crate builds 2+2 split (N-adapted) metrics from coefficient fields,
//! differentiates them exactly with truncated Taylor jets, evaluates the
//! canonical d-connection / Levi-Civita pair with torsion and distortion,
//! generates exact solution families from closed-form data, and checks
//! hidden-symmetry structures (Killing tensors, closed conformal
//! Killing-Yano forms, quantum-anomaly commutator coefficients) on sampled
//! grids.

pub mod connection;
pub mod curvature;
pub mod dsl;
pub mod error;
pub mod families;
pub mod fd;
pub mod field;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod quad;
pub mod solution;
pub mod symmetry;
pub mod tensor;

pub use error::{Error, Result};
pub use field::{DepMask, Field, Point};
pub use jet::Jet;
pub use metric::{DMetric, FramePair};
pub use tensor::TensorComponents;

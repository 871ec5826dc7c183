use thiserror::Error;

/// Errors raised while evaluating fields and geometric operations.
#[derive(Debug, Error, Clone)]
pub enum Error {
    /// A scalar evaluation left the domain of an elementary function.
    #[error("domain error in {func}({arg}): {reason}")]
    Domain {
        func: &'static str,
        arg: f64,
        reason: &'static str,
    },

    /// A jet of higher order than the engine supports was requested.
    #[error("jet order {requested} exceeds maximum {max}")]
    OrderExceeded { requested: usize, max: usize },

    /// The assembled metric is numerically degenerate.
    #[error("singular metric: |det| = {det:.3e} below threshold")]
    SingularMetric { det: f64 },

    /// The signature of the assembled metric does not match the declaration.
    #[error("metric signature mismatch: expected {expected:?}, found {found:?}")]
    Signature {
        expected: [i8; 4],
        found: [i8; 4],
    },

    /// A construction hit one of its structural branch points
    /// (h4* = 0, phi* = 0, chi4 = 0 and similar degeneracies).
    #[error("degenerate branch: {0}")]
    Branch(String),

    /// Numerical quadrature failed to converge.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// A case the engine deliberately does not handle.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Expression parsing failed; offsets are byte positions in the source.
    #[error("parse error at {offset}: {message}")]
    Parse {
        offset: usize,
        message: String,
        expected: Vec<String>,
    },

    /// A parameter or variable referenced by an expression is not bound.
    #[error("unbound identifier `{name}`{}", candidates_note(.candidates))]
    Unbound {
        name: String,
        candidates: Vec<String>,
    },

    /// Mismatched tensor bases (orthonormal coframe vs N-adapted components).
    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch {
        expected: &'static str,
        found: &'static str,
    },

    /// Bad grid or scenario geometry.
    #[error("grid error: {0}")]
    Grid(String),
}

fn candidates_note(cands: &[String]) -> String {
    if cands.is_empty() {
        String::new()
    } else {
        format!(" (known: {})", cands.join(", "))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

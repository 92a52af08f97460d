use thiserror::Error;

/// Errors produced by mesh construction, assembly and the solver stages.
#[derive(Debug, Error)]
pub enum Error {
    /// Polynomial degree outside the supported range (N >= 1).
    #[error("invalid polynomial degree {0} (expected N >= 1)")]
    InvalidDegree(usize),

    /// Quadrature order too low for the requested basis degree.
    #[error("quadrature order {quad} too low for degree {degree} (need Q >= N + 1)")]
    InvalidQuadrature { degree: usize, quad: usize },

    /// Basis function or degree-of-freedom index out of range.
    #[error("index {index} out of range for {what} (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    /// Operand dimensions do not agree.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// Invalid mesh parameters (zero element counts, empty extents, bad amplitude).
    #[error("invalid mesh configuration: {0}")]
    InvalidMesh(String),

    /// Nonpositive Jacobian determinant detected inside an element.
    #[error("degenerate element ({ex}, {ey}): det J = {det:.3e} at mapped point ({x:.4}, {y:.4})")]
    MeshDegenerate {
        ex: usize,
        ey: usize,
        x: f64,
        y: f64,
        det: f64,
    },

    /// Permeability tensor failed the symmetric-positive-definite check.
    #[error("permeability tensor not symmetric positive definite at ({x:.4}, {y:.4})")]
    PermeabilityNotSpd { x: f64, y: f64 },

    /// A matrix factorization encountered a zero pivot.
    #[error("singular system in {0}")]
    SingularSystem(&'static str),

    /// Direct solve produced a residual above the accepted bound.
    #[error("solver residual {residual:.3e} exceeds bound {bound:.3e}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    /// Iterative solver ran out of iterations.
    #[error("{0} did not converge within {1} iterations")]
    NoConvergence(&'static str, usize),

    /// Operation requires a symmetric matrix.
    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
}

impl Error {
    /// Coarse classification used for sweep row statuses and process exit
    /// codes: "config" for bad input, "mesh-degeneracy" for folded
    /// elements, "solver" for numerical failures.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidDegree(_)
            | Error::InvalidQuadrature { .. }
            | Error::IndexOutOfRange { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidMesh(_)
            | Error::PermeabilityNotSpd { .. } => "config",
            Error::MeshDegenerate { .. } => "mesh-degeneracy",
            Error::SingularSystem(_)
            | Error::ResidualTooLarge { .. }
            | Error::NoConvergence(..)
            | Error::NotSymmetric(_) => "solver",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("quadratic forms differ")]
    FormMismatch,

    #[error("invalid quadratic form: {0}")]
    InvalidForm(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("element is not invertible")]
    NotInvertible,

    #[error("Clifford relations violated: {0}")]
    RelationViolated(String),

    #[error("not a spin element: {0}")]
    NotInSpin(String),

    #[error("not in the Clifford group: {0}")]
    NotInCliffordGroup(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("clutching map is singular at {0}")]
    SingularClutching(String),

    #[error("invalid lattice spec: {0}")]
    InvalidLattice(String),

    #[error("ambiguous kernel: {0}")]
    AmbiguousKernel(String),

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("family endpoint is not invertible: {0}")]
    EndpointNotInvertible(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Numerical failures the caller may cure by refining the discretisation.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::AmbiguousKernel(_) | Error::NonConvergence(_) | Error::EndpointNotInvertible(_)
        )
    }
}

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// The argument hits a pole of the function.
    #[error("pole: {0}")]
    Pole(&'static str),

    /// The argument lies on a branch cut that the principal determination rejects.
    #[error("branch cut: {0}")]
    BranchCut(&'static str),

    /// Integration path geometry is inconsistent (overlapping detours etc.).
    #[error("geometry error: {0}")]
    Geometry(&'static str),

    /// A raw product would need more factors than the cost guard allows.
    #[error("{factors} factors needed; |q| is too close to 1, use the modular route")]
    UseModularRoute { factors: u64 },

    /// The requested accuracy was not reached. Carries the best estimate.
    #[error("accuracy target missed: estimate {estimate}, error estimate {error:e}")]
    Accuracy { estimate: Complex64, error: f64 },

    /// An integrand along a ray to infinity does not decay.
    #[error("divergent integral: {0}")]
    Divergence(&'static str),
}

impl Error {
    /// True for errors caused by the point being evaluated (as opposed to
    /// numerical accuracy failures).
    pub fn is_domain_like(&self) -> bool {
        !matches!(self, Error::Accuracy { .. } | Error::Divergence(_))
    }
}

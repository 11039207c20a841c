use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("coefficients materialized up to {available}, but {needed} are required")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("p_{n} has {count} negative roots; at most one is possible")]
    MultipleNegativeRoots { n: usize, count: usize },

    #[error("full spectrum requested for n = {n}, above the cap of {cap}")]
    SpectrumCapExceeded { n: usize, cap: usize },

    #[error("k = {k} < 1 but no negative root was found up to n_max = {n_max}")]
    NoRootAtNmax { k: f64, n_max: usize },

    #[error("negative root not converged at n_max = {n_max}: r = {r_last}, last increment {delta:e}")]
    NotConverged { n_max: usize, r_last: f64, delta: f64 },

    #[error("weight w({ell}) vanishes")]
    ZeroWeight { ell: i64 },

    #[error("dispersion point at k = {k} is stable; there is no unstable mode")]
    NotUnstable { k: f64 },

    #[error("eigenfunction residual {residual:e} exceeds {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },

    #[error("dense eigensolver failed to converge for truncation N = {truncation}")]
    EigenSolverFailed { truncation: usize },

    #[error("time step unstable: {reason}")]
    StepUnstable { reason: String },

    #[error("degenerate fit: {reason}")]
    DegenerateFit { reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

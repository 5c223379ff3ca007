use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular integrand: {0}")]
    Singularity(String),

    #[error("finite-difference step at T = {t} leaves the occupation model domain [{lo}, {hi}]")]
    DerivativeStep { t: f64, lo: f64, hi: f64 },

    #[error("integration did not converge: {0}")]
    Convergence(String),

    #[error("quadrature did not reach the requested accuracy: {0}")]
    Accuracy(String),

    #[error("mean frequency undefined: total occupation is zero")]
    UndefinedMean,

    #[error("r = {r} is not outside the source of radius {radius}")]
    OutsideDomain { r: f64, radius: f64 },

    #[error("oracle scale bound exceeded: {0}")]
    OracleScale(String),

    #[error("spectrum row {row}: {msg}")]
    Parse { row: usize, msg: String },
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence(_) | Error::Accuracy(_))
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

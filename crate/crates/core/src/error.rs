use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile `{profile}` is only defined for r >= {valid_from}, got r = {r}")]
    BelowValidFrom { profile: String, valid_from: f64, r: f64 },

    #[error("radius {0} is too close to the pole (minimum 1e-6)")]
    TooCloseToPole(f64),

    #[error("{0} requires a globally defined profile; tail families stop at r = R")]
    TailFamily(String),

    #[error("dimension N = {got} is too small: {what} requires N >= {min}")]
    Dimension { what: String, min: usize, got: usize },

    #[error("weight exponent beta = {beta} outside [0, N - 4) = [0, {limit})")]
    BetaRange { beta: f64, limit: f64 },

    #[error("cutoff exponent alpha = {alpha} must exceed 1 + a = {bound}")]
    AlphaTooSmall { alpha: f64, bound: f64 },

    #[error("support [{lo}, {hi}] intersects the ball B_R with R = {radius}")]
    SupportInsideBall { lo: f64, hi: f64, radius: f64 },

    #[error("unsupported family for {0}")]
    UnsupportedFamily(String),

    #[error("integrand returned NaN at r = {0}")]
    NanIntegrand(f64),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("modal function has no modes")]
    EmptyModes,

    #[error("non-positive mass entry at r = {0}")]
    NonPositiveMass(f64),

    #[error("eigensolver did not converge: {0}")]
    EigenNonConvergence(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

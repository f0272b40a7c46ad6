use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("root finder did not converge at x = {x} after {iterations} iterations")]
    RootNotConverged { x: f64, iterations: usize },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("prime limit {limit} exceeds the configured maximum {max}")]
    PrimeLimitTooLarge { limit: u64, max: u64 },

    #[error("zeta has a pole at s = 1")]
    ZetaPole,

    #[error("s = {re}{im:+}i lies outside the zeta evaluation region (Re(s) > -1, |Im(s)| <= 1000)")]
    OutsideZetaRegion { re: f64, im: f64 },

    #[error("Re(s) = {re} is not above the admissible bound {bound}")]
    OutsideConvergence { re: f64, bound: f64 },

    #[error("local factor vanishes at norm {norm}")]
    VanishingLocalFactor { norm: f64 },

    #[error("zeta factor of level m = {m}, shift q = {q} is evaluated at its pole")]
    ZetaFactorPole { m: u32, q: String },

    #[error("datum line {line}: {message}")]
    DatumParse { line: usize, message: String },

    #[error("datum line {line}: norm {value} is not greater than 1")]
    DatumNorm { line: usize, value: f64 },

    #[error("zeta-factor continuation needs the rational-prime datum; custom norm lists only support direct evaluation")]
    CustomDatum,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable short code for machine-readable error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::ParseRational(_) => "parse-rational",
            Error::RootNotConverged { .. } => "root-not-converged",
            Error::Consistency(_) => "consistency",
            Error::PrimeLimitTooLarge { .. } => "prime-limit",
            Error::ZetaPole => "zeta-pole",
            Error::OutsideZetaRegion { .. } => "zeta-region",
            Error::OutsideConvergence { .. } => "convergence-region",
            Error::VanishingLocalFactor { .. } => "vanishing-factor",
            Error::ZetaFactorPole { .. } => "zeta-factor-pole",
            Error::DatumParse { .. } => "datum-parse",
            Error::DatumNorm { .. } => "datum-norm",
            Error::CustomDatum => "custom-datum",
            Error::Io(_) => "io",
        }
    }
}

use thiserror::Error;

/// Failures raised by the kernel. Every variant carries enough context to
/// name the offending quantity.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(&'static str),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("field is in {found} representation, expected {expected}")]
    Representation {
        expected: &'static str,
        found: &'static str,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("wavepacket is empty: every frequency bin lies below the cutoff {epsilon}")]
    EmptyPacket { epsilon: f64 },

    #[error("symbol is singular at xi = 0")]
    SingularInput,

    #[error("t = {t} lies below the lower limit {lower}")]
    Domain { t: f64, lower: f64 },

    #[error("|xi| = {norm} lies below the spectral cutoff {epsilon}")]
    BelowCutoff { norm: f64, epsilon: f64 },

    #[error("t = {t} is not a multiple of the step dt = {dt}")]
    OffLattice { t: f64, dt: f64 },

    #[error("spectral mass fraction {fraction:e} below the cutoff violates the support condition")]
    SupportViolation { fraction: f64 },

    #[error("log-log fit needs at least {needed} points in the window, found {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("log-log fit got a nonpositive value {value} at t = {t}")]
    NonPositive { t: f64, value: f64 },

    #[error("time grid ratio {ratio} exceeds the allowed {max}")]
    TimeGridTooCoarse { ratio: f64, max: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

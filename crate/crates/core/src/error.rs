use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {re}+{im}i is off the unit circle (|z| - 1 = {deviation:e})")]
    OffCircle { re: f64, im: f64, deviation: f64 },

    #[error("grid of {size} points is too coarse for degree span {span} (need >= {required})")]
    GridTooCoarse {
        size: usize,
        span: usize,
        required: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degree cap {cap} reached before error {target:e} was certified (best {best:e})")]
    DegreeCap { cap: usize, target: f64, best: f64 },

    #[error("synthesis degree {degree} exceeds the supported maximum {cap}")]
    SynthesisDegree { degree: usize, cap: usize },

    #[error("completion input is not admissible: {0}")]
    NotAdmissible(String),

    #[error("root of 1 - |f|^2 at distance {distance:e} from the unit circle; increase eta")]
    RootOnCircle { distance: f64 },

    #[error("completion produced non-positive alpha = {0:e}")]
    NonPositiveAlpha(f64),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("leading coefficient is not rank one (second singular value {0:e})")]
    NotRankOne(f64),

    #[error("peeling left a non-constant residual of size {0:e}")]
    NonConstantResidual(f64),

    #[error("input is not unitary on the circle (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("Laurent polynomial has no definite parity")]
    NoDefiniteParity,

    #[error("sequence is not in the X-rotation subalgebra (deviation {0:e})")]
    NotXRotations(f64),

    #[error("success probability is zero")]
    ZeroSuccess,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("retry cap of {0} draws exceeded")]
    RetryCap(u64),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical_abort(&self) -> bool {
        matches!(
            self,
            Error::DegreeCap { .. }
                | Error::SynthesisDegree { .. }
                | Error::RootOnCircle { .. }
                | Error::NonPositiveAlpha(_)
                | Error::RootFinding(_)
                | Error::NotRankOne(_)
                | Error::NonConstantResidual(_)
                | Error::NotUnitary(_)
                | Error::RetryCap(_)
                | Error::ZeroSuccess
        )
    }
}

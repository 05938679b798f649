use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outside the weak-field regime: {0}")]
    OutOfRegime(String),

    #[error("imaginary energy: E^2 = {0}")]
    ImaginaryEnergy(f64),

    #[error("degenerate denominator: |Gamma| = {0:e}")]
    DegenerateDenominator(f64),

    #[error("cubic has complex roots (discriminant {0:e})")]
    ComplexRoots(f64),

    #[error("integration unstable at tau = {tau}: |component| = {magnitude:e}")]
    Instability { tau: f64, magnitude: f64 },

    #[error("insufficient sampling: {0}")]
    InsufficientSampling(String),

    #[error("fit failed: residual {residual:e} exceeds tolerance for amplitude {amplitude:e}")]
    FitFailure { residual: f64, amplitude: f64 },

    #[error("fit did not converge: {0}")]
    FitDiverged(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than by a numerical failure.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::OutOfRegime(_) | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

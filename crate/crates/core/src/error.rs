use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size mismatch: {0}")]
    SizeMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("regulator width {sigma} does not resolve spacing {spacing}")]
    Resolution { sigma: f64, spacing: f64 },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("tilt {tilt} exceeds the supported maximum {max}")]
    TiltTooLarge { tilt: f64, max: f64 },
    #[error("time slab does not cover the plane: {0}")]
    SlabTooThin(String),
    #[error("representation mismatch: {0}")]
    Representation(String),
    #[error("magnetic field is not divergence free (relative residual {0:e})")]
    Divergence(f64),
    #[error("time step {dt} exceeds the stability bound {max}")]
    TimeStep { dt: f64, max: f64 },
    #[error("time derivatives missing for A-representation photon slots")]
    MissingDots,
    #[error("sector shape {0}")]
    Shape(String),
    #[error("estimated memory {needed} bytes exceeds budget {budget} bytes")]
    Memory { needed: u128, budget: u128 },
    #[error("gauge operator mismatch: {0}")]
    Gauge(String),
    #[error("requested time outside the stored window: {0}")]
    Window(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("container format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("laser phases violate bright-state orthogonality: |<B2|B1>| = {residual:.3e}")]
    OrthogonalityViolation { residual: f64 },

    #[error("degenerate coupling: total Rabi frequency is zero")]
    DegenerateCoupling,

    #[error("invalid wave-vector magnitude {0} (must be finite and > 0)")]
    InvalidKappa(f64),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("differencing step {step:.3e} is below the noise floor {floor:.3e}")]
    StepTooSmall { step: f64, floor: f64 },

    #[error("momentum-space Bloch Hamiltonian is undefined with an external potential present")]
    PotentialPresent,

    #[error("k-grid radial spacing {spacing:.3e} exceeds the limit {limit:.3e}")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("time step {dt:.3e} exceeds the phase-wrap limit {limit:.3e}")]
    UnstableStep { dt: f64, limit: f64 },

    #[error("grid is invalid: {0}")]
    InvalidGrid(String),

    #[error("packet width {width:.3e} is narrower than {min:.3e} (4 grid spacings)")]
    PacketTooNarrow { width: f64, min: f64 },

    #[error("packet tail density {tail:.3e} at the box boundary exceeds 1e-12")]
    PacketTouchesBoundary { tail: f64 },

    #[error("field does not match the grid: {0}")]
    ShapeMismatch(String),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

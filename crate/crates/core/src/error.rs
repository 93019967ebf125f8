use alloc::string::String;

/// Errors raised by the synthesis pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sample grid is not uniform (max spacing deviation {deviation:e})")]
    NonUniformGrid { deviation: f64 },
    #[error("array lengths differ: {0}")]
    LengthMismatch(String),
    #[error("straight run of {len} samples exceeds the limit of {max}")]
    StraightRun { len: usize, max: usize },
    #[error("initial frame is not orthonormal (deviation {0:e})")]
    NonOrthonormalFrame(f64),
    #[error("curve is not planar in the yz plane (max |x| = {0:e})")]
    NotPlanar(f64),
    #[error("zero speed at parameter sample {0}")]
    ZeroSpeed(usize),
    #[error("step size too large: h*rate = {0:.3} (limit 0.1)")]
    StepSize(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("parallel-transport residual {residual:e} exceeds {tol:e}")]
    NotParallelTransported { residual: f64, tol: f64 },
    #[error("path is not cyclic: {0}")]
    NotCyclic(String),
    #[error("frame requires detuning data but none is present")]
    FrameMismatch,
    #[error("degenerate energy levels")]
    DegenerateLevels,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("error curve is open: endpoint gap {gap:e} exceeds {tol:e}")]
    OpenCurve { gap: f64, tol: f64 },
    #[error("end tangent deviates from z by {0:e}")]
    TangentNotZ(f64),
    #[error("half-sequence area deviates from pi by {0:e}")]
    AreaDeviation(f64),
    #[error("start sample {index} has curvature {kappa:e}; zero amplitude was required")]
    StartCurvature { index: usize, kappa: f64 },
    #[error("curve is not unit speed (tangent norm deviation {0:e})")]
    NotUnitSpeed(f64),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("solver failed to converge: {0}")]
    NoConvergence(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

//! Error type shared across the crate.

/// All failure modes surfaced by the solver stack.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A volume lies outside the mesh's half-open domain ]lo, hi].
    #[error("volume {m} outside domain ]{lo}, {hi}]")]
    OutOfDomain { m: f64, lo: f64, hi: f64 },

    /// Vector length does not match the mesh/discretization size.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A step size exceeds the stability budget's dt_max.
    #[error("step dt={dt} rejected: exceeds stability budget dt_max={dt_max}")]
    RejectedStep { dt: f64, dt_max: f64 },

    /// A concentration fell below the negativity floor; the scheme's
    /// positivity guarantee no longer holds for this step size.
    #[error("scheme failure at t={time}: concentration {value} in cell {cell} below floor")]
    SchemeFailure { cell: usize, value: f64, time: f64 },

    /// The stability constant's exponential overflows; no usable budget
    /// exists for the requested horizon and bounds.
    #[error("stability constant unbounded: exponent {exponent} overflows")]
    StabilityUnbounded { exponent: f64 },

    /// A double-mesh difference vanished; no convergence order can be formed.
    #[error("degenerate convergence data at index {index}: zero difference")]
    DegenerateConvergence { index: usize },
}

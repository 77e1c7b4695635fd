use thiserror::Error;

/// Errors reported by the cavity solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A physical parameter violates its domain (named so CLIs can report it).
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Array dimensions do not match what the operation requires.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// More sine modes were requested than the sample grid can resolve.
    #[error("resolution error: n_modes={n_modes} exceeds n_space={n_space}")]
    Resolution { n_modes: usize, n_space: usize },

    /// A sample index fell outside the interior of the grid.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// The discrete stencil admits no real eigenfrequency for a mode
    /// (time step too coarse for the requested spatial resolution).
    #[error("stencil eigenfrequency undefined for mode n_x={n_x}: delta^2*Omega^2 = {value} > 4")]
    UnstableStencil { n_x: u32, value: f64 },

    /// Regulator extrapolation failed to settle within the requested tolerance.
    #[error(
        "extrapolation did not converge: last correction {last_correction:e} exceeds \
         tolerance {tolerance:e} after {evaluations} regulator values"
    )]
    Convergence {
        last_correction: f64,
        tolerance: f64,
        evaluations: usize,
        /// Magnitude estimates per regulator value, for post-mortem inspection.
        estimates: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error types shared by all modules.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Basis dimension below the smallest meaningful SU(N).
    #[error("invalid dimension: N = {0}, need N >= 2")]
    InvalidDimension(usize),

    /// Vector/tensor length does not match the algebra dimension.
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Input is not a valid quantum state (non-Hermitian or trace != 1).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Input operator violates a required property (e.g. Hermiticity).
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    /// A channel rate is negative or non-finite.
    #[error("invalid rate: {0}")]
    InvalidRate(String),

    /// Both drive amplitudes vanish; the requested state is undefined.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// An eigen- or linear solver failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// M is singular or near-singular; the asymptotic state depends on the
    /// initial condition and -M^{-1} b is not defined.
    #[error("singular evolution matrix: smallest/largest singular value = {0:.3e}")]
    SingularEvolution(f64),

    /// Adaptive step size underflowed during integration.
    #[error("stiffness error: step size underflow at t = {0}")]
    Stiffness(f64),

    /// Probe amplitude outside the linear-response regime.
    #[error("regime error: {0}")]
    Regime(String),

    /// A closed-form denominator vanished at the given two-photon detuning.
    #[error("pole in closed-form expression near delta = {delta}")]
    Pole { delta: f64 },

    /// Finite-difference stencil straddles a pole.
    #[error("stencil error: pole within finite-difference stencil at delta = {delta}")]
    Stencil { delta: f64 },

    /// Wavelength must be positive.
    #[error("nonpositive wavelength: {0}")]
    NonpositiveWavelength(f64),

    /// Configuration value rejected.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

//! Coherence-vector dynamics of a driven three-level Λ system coupled to
//! Markovian environments, and the optical response derived from it.
//!
//! The density operator of an N-level system is expanded in the generalized
//! Gell-Mann basis, ρ = 𝟙/N + x·λ, turning the Lindblad master equation into
//! an affine flow ẋ = M x + b on the real coherence vector x. This crate
//!
//! * constructs the generator basis and the SU(N) structure constants from
//!   first principles ([`su_algebra`]),
//! * builds the evolution matrix M and source vector b for arbitrary
//!   Hamiltonian vectors and Lindblad channels, with a direct superoperator
//!   oracle for cross-checking ([`master_equation`]),
//! * encodes the Λ-system specifics: drive Hamiltonian, decay, dephasing,
//!   depolarization and amplitude-damping channels, the dark state, and the
//!   block-structured reference matrices used for regression against
//!   published analytic forms ([`lambda`]),
//! * integrates the flow and solves for the asymptotic state x∞ = −M⁻¹b
//!   ([`steady_state`]),
//! * and computes the probe susceptibility χ, group-index integrand and
//!   absorption coefficient, both from the steady state and from closed-form
//!   expressions ([`response`]).
//!
//! All rates and detunings are in units of the natural line width γ and
//! ħ = 1 throughout.

pub mod error;
pub mod lambda;
pub mod master_equation;
pub mod response;
pub mod steady_state;
pub mod su_algebra;

pub use error::Error;
pub use lambda::{ChannelRates, DerivedParams, LambdaParams};
pub use master_equation::{CMatrices, EvolutionModel, LindbladChannel};
pub use response::{ChannelKind, OpticalResponse};
pub use steady_state::SpectrumReport;
pub use su_algebra::{
    CoherenceVector, DensityMatrix, GellMannBasis, HamiltonianDecomposition, StructureConstants,
};

/// Convenience alias used throughout the crate.
pub type Complex = num_complex::Complex64;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

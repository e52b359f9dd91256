//! Spectral and time-domain solvers for collective oscillations of a
//! linearized quantum mean-field gas with long-range Coulomb interaction
//! near radial equilibria.
//!
//! The crate computes, for an equilibrium `μ(|p|²)` with marginal `φ(u)`:
//!
//! - the Lindhard dielectric function `D(λ, k)` in three equivalent
//!   representations ([`dielectric`]),
//! - the survival threshold `κ₀`, the plasmon dispersion branch `τ*(k)`
//!   with its derivatives, Landau damping rates, and Nyquist stability
//!   certificates ([`spectral`]),
//! - mode-wise Green function decompositions `Ĝ_k(t) = δ(t) + Ĝ^osc + Ĝ^r`
//!   and the radial oscillatory Green function ([`green`]),
//! - time-domain ground truth from a second-kind Volterra solver driven by
//!   exact free-gas phase-mixing sources ([`evolution`]).
//!
//! Everything is pure computation over immutable inputs; IO, file formats
//! and the command-line front end live in the companion `plasmon-lab`
//! crate. The crate is `no_std`-compatible (with `alloc`) through the
//! `libm` feature.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(not(feature = "std"))]
mod float;

mod error;

pub mod dielectric;
pub mod equilibria;
pub mod evolution;
pub mod fft;
pub mod green;
pub mod hilbert;
pub mod quad;
pub mod special;
pub mod spectral;

pub use error::Error;
pub use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

pub use dielectric::{DielectricValue, EvalPath, InteractionSymbol};
pub use equilibria::{build_marginal, DecayClass, EquilibriumProfile, Marginal, ProfileKind};
pub use hilbert::HilbertEvaluator;

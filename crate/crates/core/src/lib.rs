//! Thermodynamics of quantum coherent states.
//!
//! The partition function of a coherent state is read off the diagonal of its
//! density matrix in the Fock basis, which is a Poisson distribution with
//! mean `nbar`. That gives `ln Q = nbar`, and from there free energy,
//! entropy and a self-consistent effective temperature follow. The same
//! construction is applied to
//!
//! - a single harmonic oscillator ([`coherent`], [`thermo`]),
//! - a multimode Klein–Gordon–Fock field around a static source ([`kgf_field`]),
//! - a black-hole horizon built from equal-area patches ([`blackhole`]).
//!
//! Every closed form has an independent numerical check in [`verification`].

// NaN-rejecting `!(x > 0.0)` guards are deliberate; quadrature nodes are
// kept at their published precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod blackhole;
pub mod cli;
pub mod coherent;
pub mod constants;
mod error;
pub mod kgf_field;
pub mod ode;
pub mod quad;
pub mod thermo;
pub mod verification;

pub use constants::{ConstantsSet, UnitSystem};
pub use error::{Error, Result};

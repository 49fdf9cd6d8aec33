//! Simulation and optimization toolkit for continuous-variable (CV)
//! teleportation of discrete-variable (DV) states with tunable feedforward
//! gain.
//!
//! A CV teleporter built from two-mode squeezed resources acts on any input
//! as a Gaussian channel: convolution of the Wigner function with a Gaussian
//! of variance `tau` followed by a phase-space rescaling by the gain `g`
//! ([`channel`]). On photon-number states the channel has closed-form matrix
//! elements, the transition coefficients `T_{mn->jk}` ([`transition`]),
//! which drive everything downstream: fidelities of dual-rail qubit
//! teleportation and their gain/squeezing optima ([`qubit`]), and
//! entanglement swapping of a split single photon with its PPT criterion and
//! logarithmic negativity ([`swap`]).
//!
//! Two independent numerical backends keep the closed forms honest: dense
//! truncated Fock-space linear algebra ([`fock`]) and a phase-space
//! quadrature oracle on sampled Wigner functions ([`phasespace`]). The
//! [`verify`] module packages the cross-checks into runnable suites.

pub mod channel;
pub mod error;
pub mod fock;
pub mod optimize;
pub mod phasespace;
pub mod qubit;
pub mod swap;
pub mod transition;
pub mod verify;

pub use channel::{GaussianChannel, ResourceParams};
pub use error::{Error, Result};

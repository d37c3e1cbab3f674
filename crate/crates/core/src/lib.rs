//! Numeric and symbolic engines for coherent-state quantum computation with
//! trapped-ion vibrational modes.
//!
//! The crate is organised around two state representations that cross-check
//! each other:
//!
//! * [`hilbert`] — dense linear algebra on truncated Fock product spaces
//!   (states, operators, canonical constructors, scalar diagnostics);
//! * [`symbolic`] — exact arithmetic on finite superpositions of multimode
//!   coherent product kets via the Gram inner-product kernel.
//!
//! On top of those sit the physics layers:
//!
//! * [`hamiltonian`] — expansion of the bichromatic effective Hamiltonian
//!   into interaction-picture terms, sideband classification, and the three
//!   engineered interactions (displacement, Kerr, cross-phase);
//! * [`dynamics`] — Schrödinger and Lindblad integrators with observable
//!   series;
//! * [`transfer`] — cavity-bus motional state transfer between remote traps;
//! * [`bell`] — quasi-Bell discrimination of entangled coherent states via
//!   parity-nondemolition readout;
//! * [`gates`] — logical single-qubit rotations on the `{|α⟩, |-α⟩}` code
//!   space and the teleportation-based two-qubit gates;
//! * [`experiments`] — named reproduction runs emitting CSV tables.

pub mod bell;
pub mod csvio;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod hamiltonian;
pub mod hilbert;
pub mod linalg;
pub mod symbolic;
pub mod transfer;

pub use error::Error;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Crate version string echoed into CSV headers.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

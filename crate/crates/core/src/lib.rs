//! Pulse-level simulation and schedule compilation for a chain of qubits with
//! always-on nearest-neighbour XX coupling, controlled only by shaped local
//! pulses.
//!
//! The crate is organised bottom-up:
//!
//! * [`pauli`]: exact Pauli-string algebra and zeroth-order average
//!   Hamiltonian checks for decoupling schemes.
//! * [`model`]: the rotating-frame chain Hamiltonian, control terms and
//!   detuning disorder.
//! * [`pulses`]: pulse envelopes and the transforms used by dynamically
//!   corrected gates.
//! * [`sequencer`]: decoupling layers, gate compilation into schedules and
//!   the experiment configuration grammar.
//! * [`engine`]: state-vector propagation, partial traces and fidelities.
//! * [`experiments`]: the fidelity sweeps built on top of all of the above.
//!
//! Units throughout: energies in multiples of the coupling `g`, times in
//! multiples of `1/g`, `hbar = 1`.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod model;
pub mod pauli;
pub mod pulses;
pub mod sequencer;

pub use error::{Error, Result};
pub use num_complex::Complex64;

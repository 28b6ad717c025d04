//! Qubit-assisted conclusive teleportation.
//!
//! Teleports an unknown qubit over a pure but not necessarily maximally
//! entangled channel `α|00⟩ + β|11⟩`. Alice adds an ancilla prepared with the
//! channel's Schmidt coefficients, measures her three qubits, and on some
//! outcomes finishes with an unambiguous discrimination POVM. Successful runs
//! hand Bob the input with fidelity one; the overall success probability is
//! `2β²`, the same as conclusive teleportation by local filtering.
//!
//! The crate simulates the protocol on dense state vectors, enumerates its
//! outcome tree exactly, samples it with seeded randomness, and checks the
//! results against closed-form probabilities and two reference protocols.
//!
//! Module map:
//!
//! * [`statevec`]: state vectors, gates, fidelity, subsystem factoring
//! * [`measurement`]: projector sets, POVMs, Born sampling
//! * [`protocols`]: the qubit-assisted protocol and the two baselines
//! * [`analysis`]: closed-form probabilities, Monte Carlo, sweeps
//! * [`verify`]: the full acceptance check list
//! * [`cli`]: the `teleport-sim` command line

pub mod analysis;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod protocols;
pub mod random;
pub mod statevec;
pub mod verify;

pub use error::{Error, Result};

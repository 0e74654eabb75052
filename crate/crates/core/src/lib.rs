//! Stochastic approximate compilation of unitaries.
//!
//! A target unitary is compiled into a sequence of gates drawn from an
//! arbitrary gate alphabet by an annealed Markov-chain search ([`compiler`]).
//! Randomized Trotter and QDRIFT ([`baselines`]) produce sequences in the same
//! representation, so [`analysis`] can compare their paths against the ideal
//! time evolution.
//!
//! Conventions used everywhere:
//! - time evolution is `e^{+iHt}`;
//! - qubits are numbered from 1 and qubit 1 is the most-significant tensor factor;
//! - a sequence `G_1, ..., G_M` realizes the product `G_M ... G_1`.

pub mod analysis;
pub mod baselines;
pub mod compiler;
pub mod error;
pub mod gates;
pub mod hamiltonian;
pub mod matrix;
pub mod random_targets;
pub mod sequence;

pub use compiler::{compile, BetaSchedule, CompilationTrace, StoqConfig};
pub use error::{Error, Result};
pub use gates::{GateAlphabet, GateInstance, GateSpec};
pub use hamiltonian::{Hamiltonian, PauliString};
pub use matrix::ComplexMatrix;
pub use sequence::CompiledSequence;

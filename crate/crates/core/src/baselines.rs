//! Product-formula baselines: randomized first-order Trotter and QDRIFT.
//!
//! Both emit [`CompiledSequence`]s built from Pauli-evolution gates, so they
//! can be scored and profiled exactly like search output.

use std::sync::Arc;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::{GateAlphabet, GateSpec};
use crate::hamiltonian::Hamiltonian;
use crate::sequence::CompiledSequence;

/// `steps` repetitions of all `K` terms, each `e^{i H_k tau/steps}`, with a
/// fresh uniformly random term order per repetition. Total duration `K tau`.
pub fn randomized_trotter<R: Rng + ?Sized>(
    ham: &Hamiltonian,
    tau: f64,
    steps: usize,
    rng: &mut R,
) -> Result<CompiledSequence> {
    if ham.is_empty() {
        return Err(Error::EmptyHamiltonian);
    }
    if steps == 0 {
        return Err(Error::InvalidConfig("trotter steps must be at least 1".into()));
    }
    let dt = tau / steps as f64;
    let specs = ham
        .terms()
        .iter()
        .enumerate()
        .map(|(k, (c, s))| GateSpec::pauli_evolution(format!("T{}", k + 1), *c, s.clone(), dt.abs()))
        .collect();
    let alphabet = Arc::new(GateAlphabet::new(ham.num_qubits(), specs)?);

    let mut order: Vec<usize> = (0..ham.len()).collect();
    let mut instances = Vec::with_capacity(ham.len() * steps);
    for _ in 0..steps {
        order.shuffle(rng);
        for &k in &order {
            instances.push(alphabet.instance(k, vec![dt])?);
        }
    }
    CompiledSequence::from_instances(alphabet, instances)
}

/// `reps` independent draws of term `k` with probability `|c_k| / lambda`,
/// each emitted as `e^{i sign(c_k) P_k lambda tau / reps}`. Total duration
/// `lambda tau`.
pub fn qdrift<R: Rng + ?Sized>(ham: &Hamiltonian, tau: f64, reps: usize, rng: &mut R) -> Result<CompiledSequence> {
    if ham.is_empty() {
        return Err(Error::EmptyHamiltonian);
    }
    if reps == 0 {
        return Err(Error::InvalidConfig("qdrift repetitions must be at least 1".into()));
    }
    let lambda = ham.lambda_norm();
    if lambda <= 0.0 {
        return Err(Error::ZeroHamiltonian);
    }
    let dt = lambda * tau / reps as f64;
    let specs = ham
        .terms()
        .iter()
        .enumerate()
        .map(|(k, (_, s))| GateSpec::pauli_evolution(format!("Q{}", k + 1), 1.0, s.clone(), dt.abs()))
        .collect();
    let alphabet = Arc::new(GateAlphabet::new(ham.num_qubits(), specs)?);

    let weights: Vec<f64> = ham.terms().iter().map(|(c, _)| c.abs()).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let instances = (0..reps)
        .map(|_| {
            let k = dist.sample(rng);
            let sign = ham.terms()[k].0.signum();
            alphabet.instance(k, vec![sign * dt])
        })
        .collect::<Result<Vec<_>>>()?;
    CompiledSequence::from_instances(alphabet, instances)
}

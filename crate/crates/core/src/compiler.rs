//! Annealed Markov-chain search over gate sequences.
//!
//! The chain starts from the empty sequence (the identity). Each iteration
//! raises `beta`, proposes appending a freshly sampled gate or removing the
//! last one, scores the proposal with [`cost`](crate::matrix::cost) against
//! the target and accepts it with probability `min(1, e^{-beta * delta})`.
//!
//! The running product `G_M ... G_1` is updated in place: an append
//! left-multiplies by the new gate and a removal left-multiplies by the
//! adjoint of the last gate. Both touch only the gate's support, so a
//! proposal costs `O(4^n * 2^k)` for a `k`-qubit gate.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gates::{GateAlphabet, GateInstance};
use crate::matrix::{cost_from_overlap, overlap_unchecked, unitarity_deviation, ComplexMatrix, STRUCTURE_TOL};
use crate::sequence::CompiledSequence;

#[derive(Clone, Debug, PartialEq)]
pub struct StoqConfig {
    pub num_iterations: usize,
    /// Increment of `beta` per iteration.
    pub delta_beta: f64,
    /// Probability of proposing an append on a nonempty sequence.
    pub p_append: f64,
    /// Stop as soon as the cost reaches this value.
    pub cost_threshold: Option<f64>,
    pub seed: u64,
}

impl Default for StoqConfig {
    fn default() -> Self {
        Self { num_iterations: 10_000, delta_beta: 0.01, p_append: 0.5, cost_threshold: None, seed: 0 }
    }
}

impl StoqConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_iterations == 0 {
            return Err(Error::InvalidConfig("num_iterations must be at least 1".into()));
        }
        if !(self.delta_beta > 0.0 && self.delta_beta.is_finite()) {
            return Err(Error::InvalidConfig(format!("delta_beta must be positive, got {}", self.delta_beta)));
        }
        if !(self.p_append > 0.0 && self.p_append < 1.0) {
            return Err(Error::InvalidConfig(format!("p_append must lie in (0, 1), got {}", self.p_append)));
        }
        if let Some(t) = self.cost_threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidConfig(format!("cost_threshold must lie in [0, 1], got {t}")));
            }
        }
        Ok(())
    }
}

/// How `beta` evolves with the iteration index `i = 1, 2, ...`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaSchedule {
    /// `beta_i = i * delta`.
    Linear { delta: f64 },
    /// `beta_i = beta` for every iteration. Not reachable through
    /// [`StoqConfig`]; exists to probe the chain at a fixed temperature.
    Constant(f64),
}

impl BetaSchedule {
    #[inline]
    pub fn beta(&self, iteration: usize) -> f64 {
        match *self {
            BetaSchedule::Linear { delta } => iteration as f64 * delta,
            BetaSchedule::Constant(beta) => beta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProposalKind {
    Append,
    Remove,
}

impl ProposalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProposalKind::Append => "append",
            ProposalKind::Remove => "remove",
        }
    }
}

/// A candidate change to the current sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum Proposal {
    Append(GateInstance),
    RemoveLast,
}

impl Proposal {
    pub fn kind(&self) -> ProposalKind {
        match self {
            Proposal::Append(_) => ProposalKind::Append,
            Proposal::RemoveLast => ProposalKind::Remove,
        }
    }
}

/// Appends with probability `p_append` (always, when `len == 0`), otherwise
/// removes the last gate.
pub fn propose<R: Rng + ?Sized>(len: usize, alphabet: &GateAlphabet, p_append: f64, rng: &mut R) -> Proposal {
    if len == 0 || rng.random::<f64>() < p_append {
        Proposal::Append(alphabet.sample_instance(rng))
    } else {
        Proposal::RemoveLast
    }
}

/// Returns a modified copy of `seq`; the input is left untouched.
pub fn random_change<R: Rng + ?Sized>(
    seq: &CompiledSequence,
    alphabet: &GateAlphabet,
    p_append: f64,
    rng: &mut R,
) -> CompiledSequence {
    let mut next = seq.clone();
    match propose(seq.len(), alphabet, p_append, rng) {
        Proposal::Append(g) => next.push(g),
        Proposal::RemoveLast => {
            next.pop();
        }
    }
    next
}

/// `e^{-beta * delta}` for a cost increase `delta > 0`, else 1.
#[inline]
pub fn accept_probability(cost: f64, new_cost: f64, beta: f64) -> f64 {
    let delta = new_cost - cost;
    if delta > 0.0 {
        (-beta * delta).exp()
    } else {
        1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub beta: f64,
    /// Cost of the proposed sequence.
    pub proposed_cost: f64,
    /// Cost after the accept/reject decision.
    pub cost: f64,
    pub proposal: ProposalKind,
    pub accepted: bool,
    /// Sequence length after the decision.
    pub seq_len: usize,
}

#[derive(Clone, Debug)]
pub struct CompilationTrace {
    pub initial_cost: f64,
    pub records: Vec<IterationRecord>,
    pub final_sequence: CompiledSequence,
    pub final_cost: f64,
    /// Running product the chain ended with, before any recomputation.
    pub cached_product: ComplexMatrix,
}

impl CompilationTrace {
    pub fn costs(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.cost)
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().filter(|r| r.accepted).count() as f64 / self.records.len() as f64
    }
}

/// Runs the search with the linear schedule `beta_i = i * delta_beta`.
pub fn compile(
    target: &ComplexMatrix,
    alphabet: Arc<GateAlphabet>,
    config: &StoqConfig,
) -> Result<(CompiledSequence, CompilationTrace)> {
    config.validate()?;
    compile_with_schedule(target, alphabet, config, BetaSchedule::Linear { delta: config.delta_beta })
}

/// Same as [`compile`] with an explicit `beta` schedule. `config.delta_beta`
/// is ignored.
pub fn compile_with_schedule(
    target: &ComplexMatrix,
    alphabet: Arc<GateAlphabet>,
    config: &StoqConfig,
    schedule: BetaSchedule,
) -> Result<(CompiledSequence, CompilationTrace)> {
    if config.num_iterations == 0 {
        return Err(Error::InvalidConfig("num_iterations must be at least 1".into()));
    }
    let n = alphabet.num_qubits();
    let dim = 1usize << n;
    if target.dim() != dim {
        return Err(Error::Matrix(crate::matrix::MatrixError::DimensionMismatch {
            left: target.dim(),
            right: dim,
        }));
    }
    let deviation = unitarity_deviation(target);
    if deviation > STRUCTURE_TOL {
        return Err(Error::NonUnitaryTarget(deviation));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut sequence = CompiledSequence::new(alphabet.clone());
    let mut product = ComplexMatrix::identity(dim);
    let mut scratch = product.clone();
    let mut cost = cost_from_overlap(overlap_unchecked(target, &product), dim);
    let initial_cost = cost;
    let mut records = Vec::with_capacity(config.num_iterations);

    for iteration in 1..=config.num_iterations {
        let beta = schedule.beta(iteration);
        let proposal = propose(sequence.len(), &alphabet, config.p_append, &mut rng);

        scratch.as_mut_slice().copy_from_slice(product.as_slice());
        match &proposal {
            Proposal::Append(g) => scratch.left_apply_local(n, g.support(), g.local_matrix()),
            Proposal::RemoveLast => {
                let last = sequence.instances().last().expect("removal proposed on empty sequence");
                if sequence.len() == 1 {
                    scratch = ComplexMatrix::identity(dim);
                } else {
                    scratch.left_apply_local(n, last.support(), &local_adjoint(last.local_matrix()));
                }
            }
        }
        let new_cost = cost_from_overlap(overlap_unchecked(target, &scratch), dim);

        let p = accept_probability(cost, new_cost, beta);
        let accepted = p >= 1.0 || rng.random::<f64>() < p;
        let kind = proposal.kind();
        if accepted {
            match proposal {
                Proposal::Append(g) => sequence.push(g),
                Proposal::RemoveLast => {
                    sequence.pop();
                }
            }
            std::mem::swap(&mut product, &mut scratch);
            cost = new_cost;
        }

        records.push(IterationRecord {
            iteration,
            beta,
            proposed_cost: new_cost,
            cost,
            proposal: kind,
            accepted,
            seq_len: sequence.len(),
        });

        if config.cost_threshold.is_some_and(|t| cost <= t) {
            break;
        }
    }

    let trace = CompilationTrace {
        initial_cost,
        records,
        final_sequence: sequence.clone(),
        final_cost: cost,
        cached_product: product,
    };
    Ok((sequence, trace))
}

fn local_adjoint(m: &[C64]) -> Vec<C64> {
    let d = (m.len() as f64).sqrt().round() as usize;
    let mut out = vec![C64::new(0.0, 0.0); m.len()];
    for i in 0..d {
        for j in 0..d {
            out[j * d + i] = m[i * d + j].conj();
        }
    }
    out
}

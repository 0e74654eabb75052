//! Random compilation targets: Haar-distributed unitaries and random circuits.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gates::GateAlphabet;
use crate::matrix::ComplexMatrix;
use crate::sequence::CompiledSequence;

/// Haar-random `dim x dim` unitary.
///
/// Draws a matrix of i.i.d. standard complex Gaussians, takes its QR
/// factorization and multiplies each column of `Q` by the phase of the
/// matching diagonal entry of `R`. Without that correction the result is
/// biased by the factorization's sign convention.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be positive");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let q = qr.q();
    let r = qr.r();

    let mut data = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let rjj = r[(j, j)];
            let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
            data.push(q[(i, j)] * phase);
        }
    }
    ComplexMatrix::from_vec(dim, data).expect("square by construction")
}

/// Number of gates for an average depth, `round(avg_depth * n)` with ties to even.
pub fn circuit_gate_count(n: usize, avg_depth: f64) -> usize {
    (avg_depth * n as f64).round_ties_even().max(0.0) as usize
}

/// `round(avg_depth * n)` gates drawn independently and uniformly from `alphabet`.
pub fn random_circuit<R: Rng + ?Sized>(
    n: usize,
    avg_depth: f64,
    alphabet: Arc<GateAlphabet>,
    rng: &mut R,
) -> Result<CompiledSequence> {
    if alphabet.num_qubits() != n {
        return Err(Error::QubitCountMismatch { expected: n, got: alphabet.num_qubits() });
    }
    let count = circuit_gate_count(n, avg_depth);
    if !avg_depth.is_finite() || count == 0 {
        return Err(Error::InvalidConfig(format!("average depth {avg_depth} on {n} qubits yields no gates")));
    }
    let instances = (0..count).map(|_| alphabet.sample_instance(rng)).collect();
    CompiledSequence::from_instances(alphabet, instances)
}

//! Path distances from compiled sequences to the ideal evolution `e^{iHt}`,
//! plus the summary statistics used to compare compilers.
//!
//! The distance at step `m` is the phase-invariant cost form
//! `min_t 1 - |Tr(e^{-iHt} G_m ... G_1)| / 2^n` over a uniform grid on
//! `[0, tau]`. With `H = V diag(l) V^dag` the trace reduces to
//! `sum_k e^{-i l_k t} (V^dag P V)_kk`, so each grid point is `O(2^n)` once
//! the prefix diagonal is known.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gates::{GateAlphabet, GateSpec};
use crate::hamiltonian::Hamiltonian;
use crate::matrix::{cost, cost_from_overlap, ComplexMatrix, HermitianEigen};
use crate::sequence::CompiledSequence;

pub const DEFAULT_GRID_POINTS: usize = 1001;

/// `G_M ... G_1`; the empty sequence gives the identity.
pub fn sequence_product(seq: &CompiledSequence) -> ComplexMatrix {
    seq.product()
}

/// Sum of gate durations; an error if any gate lacks one.
pub fn total_time(seq: &CompiledSequence) -> Result<f64> {
    seq.total_time()
}

/// One-gate sequence `[e^{iH tau}]`, the reference the baselines are measured against.
pub fn ideal_sequence(ham: &Hamiltonian, tau: f64) -> Result<CompiledSequence> {
    let spec = GateSpec::evolution("IDEAL", ham.to_matrix()?, tau)?;
    let alphabet = Arc::new(GateAlphabet::new(ham.num_qubits(), vec![spec])?);
    let gate = alphabet.instance(0, vec![tau])?;
    CompiledSequence::from_instances(alphabet, vec![gate])
}

/// The curve `t -> e^{iHt}` on a uniform grid over `[0, tau]`.
#[derive(Clone, Debug)]
pub struct IdealPath {
    eigen: HermitianEigen,
    times: Vec<f64>,
    /// `phases[g][k] = e^{-i l_k t_g}`
    phases: Vec<Vec<C64>>,
}

impl IdealPath {
    pub fn new(ham: &Hamiltonian, tau: f64, grid_points: usize) -> Result<Self> {
        if grid_points < 2 {
            return Err(Error::InvalidConfig(format!("grid_points must be at least 2, got {grid_points}")));
        }
        let eigen = HermitianEigen::new(&ham.to_matrix()?)?;
        let times: Vec<f64> = (0..grid_points).map(|g| tau * g as f64 / (grid_points - 1) as f64).collect();
        let phases = times
            .iter()
            .map(|&t| eigen.values.iter().map(|&l| C64::from_polar(1.0, -l * t)).collect())
            .collect();
        Ok(Self { eigen, times, phases })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Cost against `e^{iHt}` at every grid time.
    pub fn costs_along(&self, p: &ComplexMatrix) -> Vec<f64> {
        let diag = self.rotated_diagonal(p);
        let dim = diag.len();
        self.phases
            .iter()
            .map(|ph| {
                let tr: C64 = ph.iter().zip(&diag).map(|(a, b)| a * b).sum();
                cost_from_overlap(tr.norm(), dim)
            })
            .collect()
    }

    /// Minimum cost over the grid.
    pub fn distance(&self, p: &ComplexMatrix) -> f64 {
        self.costs_along(p).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Diagonal of `V^dag P V`.
    fn rotated_diagonal(&self, p: &ComplexMatrix) -> Vec<C64> {
        let v = &self.eigen.vectors;
        let pv = p.matmul(v).expect("prefix and path share a dimension");
        let d = v.dim();
        let mut diag = vec![C64::new(0.0, 0.0); d];
        for i in 0..d {
            for (k, (&vik, &pvik)) in v.row(i).iter().zip(pv.row(i)).enumerate() {
                diag[k] += vik.conj() * pvik;
            }
        }
        diag
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathRecord {
    /// 1-based prefix length.
    pub step: usize,
    /// Sum of the first `step` durations, when all are defined.
    pub cum_time: Option<f64>,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathProfile {
    pub method: String,
    pub records: Vec<PathRecord>,
    pub final_cost: Option<f64>,
    pub total_time: Option<f64>,
}

impl PathProfile {
    pub fn mean_distance(&self) -> Option<f64> {
        if self.records.is_empty() {
            return None;
        }
        Some(self.records.iter().map(|r| r.distance).sum::<f64>() / self.records.len() as f64)
    }

    pub fn max_distance(&self) -> Option<f64> {
        self.records.iter().map(|r| r.distance).reduce(f64::max)
    }
}

/// Distance of every prefix product of `seq` to the ideal path on `[0, tau]`.
pub fn path_profile(seq: &CompiledSequence, ham: &Hamiltonian, tau: f64, grid_points: usize) -> Result<PathProfile> {
    let path = IdealPath::new(ham, tau, grid_points)?;
    profile_against(seq, &path, ham, tau, "")
}

fn profile_against(
    seq: &CompiledSequence,
    path: &IdealPath,
    ham: &Hamiltonian,
    tau: f64,
    method: &str,
) -> Result<PathProfile> {
    if seq.num_qubits() != ham.num_qubits() {
        return Err(Error::QubitCountMismatch { expected: ham.num_qubits(), got: seq.num_qubits() });
    }
    let mut records = Vec::with_capacity(seq.len());
    let mut elapsed = Some(0.0);
    let mut last = None;
    let instances = seq.instances();
    seq.for_each_prefix_product(|m, p| {
        elapsed = elapsed.zip(instances[m - 1].duration()).map(|(a, b)| a + b);
        records.push(PathRecord { step: m, cum_time: elapsed, distance: path.distance(p) });
        if m == instances.len() {
            last = Some(p.clone());
        }
    });
    let final_product = last.unwrap_or_else(|| ComplexMatrix::identity(1 << seq.num_qubits()));
    let target = ham.time_evolution(tau)?;
    Ok(PathProfile {
        method: method.to_string(),
        records,
        final_cost: Some(cost(&target, &final_product)?),
        total_time: elapsed,
    })
}

/// One row of the comparison table.
#[derive(Clone, Debug, PartialEq)]
pub struct CompilationStats {
    pub method: String,
    pub time: f64,
    pub mean_d: Option<f64>,
    pub max_d: Option<f64>,
    pub cost: f64,
}

/// Total time, mean and max path distance, and cost of the full product vs `target`.
pub fn compilation_stats(
    seq: &CompiledSequence,
    ham: &Hamiltonian,
    tau: f64,
    target: &ComplexMatrix,
) -> Result<CompilationStats> {
    compilation_stats_with_grid(seq, ham, tau, target, DEFAULT_GRID_POINTS)
}

pub fn compilation_stats_with_grid(
    seq: &CompiledSequence,
    ham: &Hamiltonian,
    tau: f64,
    target: &ComplexMatrix,
    grid_points: usize,
) -> Result<CompilationStats> {
    let time = seq.total_time()?;
    let profile = path_profile(seq, ham, tau, grid_points)?;
    Ok(stats_from_profile(&profile, time, cost(target, &seq.product())?))
}

/// Builds a stats row from an already computed profile.
pub fn stats_from_profile(profile: &PathProfile, time: f64, cost: f64) -> CompilationStats {
    CompilationStats {
        method: profile.method.clone(),
        time,
        mean_d: profile.mean_distance(),
        max_d: profile.max_distance(),
        cost,
    }
}

/// Profiles many sequences against one shared ideal path.
pub struct PathAnalyzer {
    ham: Hamiltonian,
    tau: f64,
    path: IdealPath,
}

impl PathAnalyzer {
    pub fn new(ham: &Hamiltonian, tau: f64, grid_points: usize) -> Result<Self> {
        Ok(Self { ham: ham.clone(), tau, path: IdealPath::new(ham, tau, grid_points)? })
    }

    pub fn profile(&self, seq: &CompiledSequence, method: &str) -> Result<PathProfile> {
        profile_against(seq, &self.path, &self.ham, self.tau, method)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::randomized_trotter;
    use crate::hamiltonian::preset;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ideal_sequence_sits_on_the_path() {
        let ham = preset("ising3").unwrap();
        let seq = ideal_sequence(&ham, 0.5).unwrap();
        let target = ham.time_evolution(0.5).unwrap();
        let stats = compilation_stats(&seq, &ham, 0.5, &target).unwrap();
        assert!((stats.time - 0.5).abs() < 1e-15);
        assert!(stats.mean_d.unwrap() < 1e-12);
        assert!(stats.max_d.unwrap() < 1e-12);
        assert!(stats.cost < 1e-12);
    }

    #[test]
    fn empty_sequence_has_empty_profile() {
        let ham = preset("ising2").unwrap();
        let alphabet = Arc::new(crate::gates::hamiltonian_term_alphabet(&ham, 0.2, 0.5).unwrap());
        let seq = CompiledSequence::new(alphabet);
        let stats = compilation_stats(&seq, &ham, 0.5, &ComplexMatrix::identity(4)).unwrap();
        assert_eq!(stats.time, 0.0);
        assert_eq!(stats.mean_d, None);
        assert_eq!(stats.max_d, None);
        assert_eq!(stats.cost, 0.0);
    }

    #[test]
    fn spectral_route_matches_direct_costs() {
        let ham = preset("ising3").unwrap();
        let path = IdealPath::new(&ham, 0.5, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seq = randomized_trotter(&ham, 0.5, 2, &mut rng).unwrap();
        seq.for_each_prefix_product(|_, p| {
            for (&t, fast) in path.times().iter().zip(path.costs_along(p)) {
                let direct = cost(&ham.time_evolution(t).unwrap(), p).unwrap();
                assert!((fast - direct).abs() < 1e-12);
            }
        });
    }

    #[test]
    fn distance_is_phase_invariant_and_below_endpoint() {
        let ham = preset("ising3").unwrap();
        let path = IdealPath::new(&ham, 0.5, 101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let seq = randomized_trotter(&ham, 0.5, 3, &mut rng).unwrap();
        let end = ham.time_evolution(0.5).unwrap();
        seq.for_each_prefix_product(|_, p| {
            let d = path.distance(p);
            let rotated = p.scale(C64::from_polar(1.0, 0.77));
            assert!((path.distance(&rotated) - d).abs() < 1e-12);
            assert!(d <= cost(&end, p).unwrap() + 1e-15);
        });
    }

    #[test]
    fn nested_grid_refinement_never_increases_distance() {
        let ham = preset("ising3").unwrap();
        let coarse = IdealPath::new(&ham, 0.5, 51).unwrap();
        let fine = IdealPath::new(&ham, 0.5, 101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let seq = randomized_trotter(&ham, 0.5, 4, &mut rng).unwrap();
        seq.for_each_prefix_product(|_, p| {
            assert!(fine.distance(p) <= coarse.distance(p));
        });
    }

    #[test]
    fn grid_must_have_two_points() {
        let ham = preset("ising2").unwrap();
        assert!(IdealPath::new(&ham, 0.5, 1).is_err());
    }

    #[test]
    fn cumulative_time_accumulates() {
        let ham = preset("ising5").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let seq = randomized_trotter(&ham, 0.5, 10, &mut rng).unwrap();
        let profile = path_profile(&seq, &ham, 0.5, 101).unwrap();
        assert_eq!(profile.records.len(), 90);
        assert!((profile.records[0].cum_time.unwrap() - 0.05).abs() < 1e-15);
        assert!((profile.total_time.unwrap() - 4.5).abs() < 1e-12);
    }
}

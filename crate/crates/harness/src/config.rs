//! Experiment configuration: a TOML file and command-line flags layered over
//! per-experiment defaults. Flags win over the file.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use stoq::hamiltonian::{preset, MAX_DENSE_QUBITS};
use stoq::{ComplexMatrix, Hamiltonian};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    CostCurves,
    PathCompare,
    RandomUnitary,
    DepthSweep,
    ParamSweep,
    Compile,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::CostCurves => "cost-curves",
            Experiment::PathCompare => "path-compare",
            Experiment::RandomUnitary => "random-unitary",
            Experiment::DepthSweep => "depth-sweep",
            Experiment::ParamSweep => "param-sweep",
            Experiment::Compile => "compile",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    TimeEvolution,
    HaarRandom,
    RandomCircuit,
    File,
}

/// Gate alphabet used for compilation or for drawing random circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AlphabetKind {
    /// Single-qubit rotations on every qubit plus XX on every pair.
    Universal,
    /// One time-evolution gate per Hamiltonian term.
    Terms,
}

/// Every knob, all optional. Doubles as the config-file schema and the flag set.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    /// Built-in Hamiltonian: ising2, ising3, ising5 or ising8.
    #[arg(long)]
    pub preset: Option<String>,
    /// Hamiltonian text file, one `<coefficient> <pauli-string>` per line.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub delta_beta: Option<f64>,
    #[arg(long)]
    pub p_append: Option<f64>,
    #[arg(long)]
    pub cost_threshold: Option<f64>,
    /// Term gates may run for at most epsilon * tau.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Evolution time of the target.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub trotter_steps: Option<usize>,
    #[arg(long)]
    pub qdrift_reps: Option<usize>,
    /// Points on the ideal path used for path distances.
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Worker threads; 0 lets the thread pool decide. Never changes results.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Average circuit depths for depth-sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub depths: Option<Vec<f64>>,
    /// Haar runs used to measure the plateau in depth-sweep.
    #[arg(long)]
    pub plateau_runs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub sweep_delta_beta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub sweep_p_append: Option<Vec<f64>>,
    /// Compilation alphabet for `compile`.
    #[arg(long, value_enum)]
    pub alphabet: Option<AlphabetKind>,
    /// Alphabet the depth-sweep random circuits are drawn from.
    #[arg(long, value_enum)]
    pub circuit_alphabet: Option<AlphabetKind>,
    /// Target matrix file for `compile` (dim header, then rows of re,im pairs).
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Long runs: 20 x 100k iterations for depth-sweep, 32 x 100k on the 4 x 3 grid for param-sweep.
    #[arg(long)]
    #[serde(default)]
    pub full_scale: bool,
}

impl Overrides {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    /// `self` with every field set in `over` replaced.
    pub fn layer(mut self, over: Overrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            preset, hamiltonian, qubits, iterations, runs, seed, delta_beta, p_append, cost_threshold, epsilon, tau,
            trotter_steps, qdrift_reps, grid_points, jobs, out, depths, plateau_runs, sweep_delta_beta, sweep_p_append,
            alphabet, circuit_alphabet, target
        );
        self.full_scale |= over.full_scale;
        self
    }
}

/// Fully resolved configuration. `out` and `jobs` are left out of the
/// serialized echo so that summaries do not depend on where or how fast a
/// run happened.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub target: TargetKind,
    /// Preset name or Hamiltonian file path.
    pub hamiltonian_source: Option<String>,
    #[serde(skip)]
    pub hamiltonian: Option<Hamiltonian>,
    pub target_file: Option<PathBuf>,
    #[serde(skip)]
    pub target_matrix: Option<ComplexMatrix>,
    pub qubits: usize,
    pub iterations: usize,
    pub runs: usize,
    pub seed: u64,
    pub delta_beta: f64,
    pub p_append: f64,
    pub cost_threshold: Option<f64>,
    pub epsilon: f64,
    pub tau: f64,
    pub trotter_steps: usize,
    pub qdrift_reps: usize,
    pub grid_points: usize,
    pub depths: Vec<f64>,
    pub plateau_runs: usize,
    pub sweep_delta_beta: Vec<f64>,
    pub sweep_p_append: Vec<f64>,
    pub alphabet: AlphabetKind,
    pub circuit_alphabet: AlphabetKind,
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    pub out: PathBuf,
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

impl ExperimentConfig {
    /// Fills unset fields with the defaults of `experiment` and validates.
    pub fn resolve(experiment: Experiment, o: Overrides) -> Result<Self> {
        use Experiment::*;
        let full = o.full_scale;
        let (runs, iterations) = match experiment {
            CostCurves => (16, 10_000),
            PathCompare => (5, 10_000),
            RandomUnitary => (20, 10_000),
            DepthSweep if full => (20, 100_000),
            DepthSweep => (8, 30_000),
            ParamSweep if full => (32, 100_000),
            ParamSweep => (8, 30_000),
            Compile => (1, 10_000),
        };
        let (sweep_db, sweep_pa) = if full {
            (vec![0.001, 0.01, 0.1, 0.5], vec![0.2, 0.5, 0.8])
        } else {
            (vec![0.01, 0.1], vec![0.2, 0.8])
        };

        let needs_hamiltonian = match experiment {
            CostCurves | PathCompare => true,
            Compile => o.target.is_none() || o.alphabet == Some(AlphabetKind::Terms),
            DepthSweep => o.circuit_alphabet == Some(AlphabetKind::Terms),
            RandomUnitary | ParamSweep => false,
        };
        let (hamiltonian, hamiltonian_source) = match (&o.preset, &o.hamiltonian) {
            (Some(_), Some(_)) => return Err(config_err("give either a preset or a hamiltonian file, not both")),
            (Some(name), None) => (Some(preset(name)?), Some(name.clone())),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
                let ham: Hamiltonian = text.parse().map_err(|e: stoq::Error| config_err(format!("{}: {e}", path.display())))?;
                (Some(ham), Some(path.display().to_string()))
            }
            (None, None) if needs_hamiltonian => {
                let name = if experiment == PathCompare { "ising5" } else { "ising2" };
                (Some(preset(name)?), Some(name.to_string()))
            }
            (None, None) => (None, None),
        };
        if needs_hamiltonian && hamiltonian.is_none() {
            return Err(config_err(format!("{experiment} needs a hamiltonian")));
        }

        let target_matrix = match &o.target {
            Some(path) if experiment == Compile => {
                let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
                Some(ComplexMatrix::from_text(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?)
            }
            _ => None,
        };

        let default_qubits = match experiment {
            RandomUnitary => 2,
            DepthSweep => 5,
            ParamSweep => 3,
            _ => 0,
        };
        let qubits = match (&hamiltonian, o.qubits) {
            _ if target_matrix.is_some() => {
                let m = target_matrix.as_ref().expect("checked");
                let n = m.num_qubits().map_err(|e| config_err(format!("target: {e}")))?;
                if hamiltonian.as_ref().is_some_and(|h| h.num_qubits() != n) {
                    return Err(config_err("target and hamiltonian qubit counts differ"));
                }
                n
            }
            (Some(h), Some(q)) if h.num_qubits() != q && needs_hamiltonian => {
                return Err(config_err(format!("--qubits {q} disagrees with the {}-qubit hamiltonian", h.num_qubits())))
            }
            (Some(h), _) if needs_hamiltonian => h.num_qubits(),
            (_, Some(q)) => q,
            _ => default_qubits,
        };

        let target = match experiment {
            CostCurves | PathCompare => TargetKind::TimeEvolution,
            RandomUnitary | ParamSweep => TargetKind::HaarRandom,
            DepthSweep => TargetKind::RandomCircuit,
            Compile if o.target.is_some() => TargetKind::File,
            Compile => TargetKind::TimeEvolution,
        };
        let runs = o.runs.unwrap_or(runs);
        let cfg = ExperimentConfig {
            experiment,
            target,
            hamiltonian_source,
            hamiltonian,
            target_file: o.target,
            target_matrix,
            qubits,
            iterations: o.iterations.unwrap_or(iterations),
            runs,
            seed: o.seed.unwrap_or(0),
            delta_beta: o.delta_beta.unwrap_or(0.01),
            p_append: o.p_append.unwrap_or(0.5),
            cost_threshold: o.cost_threshold,
            epsilon: o.epsilon.unwrap_or(0.2),
            tau: o.tau.unwrap_or(0.5),
            trotter_steps: o.trotter_steps.unwrap_or(10),
            qdrift_reps: o.qdrift_reps.unwrap_or(1000),
            grid_points: o.grid_points.unwrap_or(stoq::analysis::DEFAULT_GRID_POINTS),
            depths: o.depths.unwrap_or_else(|| vec![1.0, 5.0, 10.0, 20.0, 40.0]),
            plateau_runs: o.plateau_runs.unwrap_or(runs),
            sweep_delta_beta: o.sweep_delta_beta.unwrap_or(sweep_db),
            sweep_p_append: o.sweep_p_append.unwrap_or(sweep_pa),
            alphabet: o.alphabet.unwrap_or(if target == TargetKind::File {
                AlphabetKind::Universal
            } else {
                AlphabetKind::Terms
            }),
            circuit_alphabet: o.circuit_alphabet.unwrap_or(AlphabetKind::Universal),
            jobs: o.jobs.unwrap_or(0),
            out: o.out.unwrap_or_else(|| PathBuf::from("out").join(experiment.name())),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let min_runs = if self.experiment == Experiment::PathCompare { 0 } else { 1 };
        if self.runs < min_runs {
            return Err(config_err("runs must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(config_err("iterations must be at least 1"));
        }
        if self.qubits == 0 || self.qubits > MAX_DENSE_QUBITS {
            return Err(config_err(format!("qubits must lie in 1..={MAX_DENSE_QUBITS}, got {}", self.qubits)));
        }
        let betas = std::iter::once(self.delta_beta).chain(self.sweep_delta_beta.iter().copied());
        if betas.into_iter().any(|b| !(b > 0.0 && b.is_finite())) {
            return Err(config_err("delta-beta values must be positive"));
        }
        let appends = std::iter::once(self.p_append).chain(self.sweep_p_append.iter().copied());
        if appends.into_iter().any(|p| !(p > 0.0 && p < 1.0)) {
            return Err(config_err("p-append values must lie in (0, 1)"));
        }
        if let Some(t) = self.cost_threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(config_err("cost-threshold must lie in [0, 1]"));
            }
        }
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.epsilon) || !positive(self.tau) {
            return Err(config_err("epsilon and tau must be positive"));
        }
        if self.trotter_steps == 0 || self.qdrift_reps == 0 {
            return Err(config_err("trotter-steps and qdrift-reps must be at least 1"));
        }
        if self.grid_points < 2 {
            return Err(config_err("grid-points must be at least 2"));
        }
        if self.experiment == Experiment::DepthSweep {
            if self.depths.is_empty() || self.depths.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
                return Err(config_err("depths must be a nonempty list of positive numbers"));
            }
            if self.plateau_runs == 0 {
                return Err(config_err("plateau-runs must be at least 1"));
            }
        }
        if self.experiment == Experiment::ParamSweep && (self.sweep_delta_beta.is_empty() || self.sweep_p_append.is_empty()) {
            return Err(config_err("sweep grids must be nonempty"));
        }
        Ok(())
    }

    pub fn stoq_config(&self, seed: u64) -> stoq::StoqConfig {
        stoq::StoqConfig {
            num_iterations: self.iterations,
            delta_beta: self.delta_beta,
            p_append: self.p_append,
            cost_threshold: self.cost_threshold,
            seed,
        }
    }

    /// Seed of run `index`.
    pub fn run_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }

    pub fn hamiltonian(&self) -> Result<&Hamiltonian> {
        self.hamiltonian.as_ref().ok_or_else(|| config_err(format!("{} needs a hamiltonian", self.experiment)))
    }
}

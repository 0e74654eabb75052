//! The experiment runners. Each `compute_*` function does the numerical work
//! and returns a report; [`run`] also writes the report's artifacts.
//!
//! Runs are independent and are spread over a rayon pool. Every run owns its
//! seed (`base + index`) and random streams, and results are collected in
//! index order, so the thread count never changes an output byte.

use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use stoq::analysis::{PathAnalyzer, PathProfile};
use stoq::baselines::{qdrift, randomized_trotter};
use stoq::gates::{hamiltonian_term_alphabet, universal_alphabet};
use stoq::matrix::cost;
use stoq::random_targets::{circuit_gate_count, haar_random_unitary, random_circuit};
use stoq::{compile, CompilationTrace, CompiledSequence, ComplexMatrix, GateAlphabet};

use crate::config::{AlphabetKind, Experiment, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::output::{f6, opt6, ArtifactDir};
use crate::stats::{fit_saturation, mean, median, std_err, SaturationFit};

/// Random stream for drawing a run's target. The chain itself uses stream 0.
pub const TARGET_STREAM: u64 = 1;
pub const TROTTER_STREAM: u64 = 2;
pub const QDRIFT_STREAM: u64 = 3;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn haar_target(qubits: usize, seed: u64) -> ComplexMatrix {
    haar_random_unitary(1 << qubits, &mut stream_rng(seed, TARGET_STREAM))
}

fn par_map<T: Send>(jobs: usize, count: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    pool.install(|| (0..count).into_par_iter().map(f).collect())
}

fn alphabet(cfg: &ExperimentConfig, kind: AlphabetKind) -> Result<Arc<GateAlphabet>> {
    Ok(Arc::new(match kind {
        AlphabetKind::Universal => universal_alphabet(cfg.qubits)?,
        AlphabetKind::Terms => hamiltonian_term_alphabet(cfg.hamiltonian()?, cfg.epsilon, cfg.tau)?,
    }))
}

/// One chain, with everything it produced.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub index: usize,
    pub seed: u64,
    pub sequence: CompiledSequence,
    pub trace: CompilationTrace,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub index: usize,
    pub seed: u64,
    pub final_cost: f64,
    pub length: usize,
    /// Sum of gate durations; absent for alphabets without durations.
    pub total_time: Option<f64>,
    #[serde(skip)]
    pub seconds: f64,
}

impl RunResult {
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            index: self.index,
            seed: self.seed,
            final_cost: self.trace.final_cost,
            length: self.sequence.len(),
            total_time: self.sequence.total_time().ok(),
            seconds: self.seconds,
        }
    }
}

fn run_chain(cfg: &ExperimentConfig, target: &ComplexMatrix, alphabet: Arc<GateAlphabet>, index: usize) -> Result<RunResult> {
    let seed = cfg.run_seed(index);
    let start = Instant::now();
    let (sequence, trace) = compile(target, alphabet, &cfg.stoq_config(seed))?;
    Ok(RunResult { index, seed, sequence, trace, seconds: start.elapsed().as_secs_f64() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub runs: usize,
    pub mean_final_cost: f64,
    pub std_err: f64,
    pub min_final_cost: f64,
    pub max_final_cost: f64,
}

impl Aggregate {
    pub fn of(costs: &[f64]) -> Self {
        Aggregate {
            runs: costs.len(),
            mean_final_cost: mean(costs),
            std_err: std_err(costs),
            min_final_cost: costs.iter().copied().fold(f64::INFINITY, f64::min),
            max_final_cost: costs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Seeds and files of one invocation. Wall-clock durations are kept apart
/// in `timings.json`.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub version: &'static str,
    pub base_seed: u64,
    pub seeds: Vec<u64>,
    pub artifacts: Vec<String>,
}

#[derive(Serialize)]
struct Summary<'a, R: Serialize> {
    experiment: Experiment,
    config: &'a ExperimentConfig,
    manifest: RunManifest,
    results: R,
}

#[derive(Serialize)]
struct Timing {
    label: String,
    seconds: f64,
}

fn finish<R: Serialize>(
    out: &mut ArtifactDir,
    cfg: &ExperimentConfig,
    seeds: Vec<u64>,
    results: R,
    timings: Vec<Timing>,
) -> Result<()> {
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION"),
        base_seed: cfg.seed,
        seeds,
        artifacts: out.written().to_vec(),
    };
    out.json("summary.json", &Summary { experiment: cfg.experiment, config: cfg, manifest, results })?;
    let total: f64 = timings.iter().map(|t| t.seconds).sum();
    out.json("timings.json", &serde_json::json!({ "total_run_seconds": total, "runs": timings }))
}

fn trace_rows(trace: &CompilationTrace) -> impl Iterator<Item = Vec<String>> + '_ {
    trace.records.iter().map(|r| {
        vec![r.iteration.to_string(), f6(r.beta), f6(r.cost), u8::from(r.accepted).to_string(), r.seq_len.to_string()]
    })
}

const TRACE_HEADER: [&str; 5] = ["iteration", "beta", "cost", "accepted", "seq_len"];

/// Per-iteration mean and standard error across runs. A run that stopped
/// early at the cost threshold holds its last cost.
pub fn mean_curve(runs: &[RunResult]) -> Vec<(usize, f64, f64)> {
    let len = runs.iter().map(|r| r.trace.records.len()).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let costs: Vec<f64> = runs
                .iter()
                .map(|r| r.trace.records.get(i).map_or(r.trace.final_cost, |rec| rec.cost))
                .collect();
            (i + 1, mean(&costs), std_err(&costs))
        })
        .collect()
}

// ---------------------------------------------------------------------------

/// Cost curves of repeated compilations of one fixed or per-run target.
#[derive(Clone, Debug)]
pub struct CurveReport {
    pub runs: Vec<RunResult>,
    /// Per-run targets, present for random targets.
    pub targets: Option<Vec<ComplexMatrix>>,
}

impl CurveReport {
    pub fn final_costs(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.trace.final_cost).collect()
    }

    pub fn aggregate(&self) -> Aggregate {
        Aggregate::of(&self.final_costs())
    }

    fn write(&self, cfg: &ExperimentConfig, out: &mut ArtifactDir) -> Result<()> {
        for r in &self.runs {
            out.csv(&format!("traces/run_{:03}.csv", r.index), &TRACE_HEADER, trace_rows(&r.trace))?;
        }
        if let Some(targets) = &self.targets {
            for (r, t) in self.runs.iter().zip(targets) {
                out.text(&format!("targets/run_{:03}.txt", r.index), &t.to_text())?;
            }
        }
        let curve = mean_curve(&self.runs);
        out.csv(
            "mean_curve.csv",
            &["iteration", "mean_cost", "std_err"],
            curve.iter().map(|(i, m, s)| vec![i.to_string(), f6(*m), f6(*s)]),
        )?;
        #[derive(Serialize)]
        struct Results {
            aggregate: Aggregate,
            runs: Vec<RunSummary>,
        }
        let results = Results { aggregate: self.aggregate(), runs: self.runs.iter().map(RunResult::summary).collect() };
        let timings = self.runs.iter().map(|r| Timing { label: format!("run {}", r.index), seconds: r.seconds }).collect();
        finish(out, cfg, self.runs.iter().map(|r| r.seed).collect(), results, timings)
    }
}

/// Compiles `e^{iH tau}` over the Hamiltonian-term alphabet, `cfg.runs` times.
pub fn compute_cost_curves(cfg: &ExperimentConfig) -> Result<CurveReport> {
    let ham = cfg.hamiltonian()?;
    let target = ham.time_evolution(cfg.tau)?;
    let alphabet = alphabet(cfg, AlphabetKind::Terms)?;
    let runs = par_map(cfg.jobs, cfg.runs, |i| run_chain(cfg, &target, alphabet.clone(), i))?;
    Ok(CurveReport { runs, targets: None })
}

/// Compiles a fresh Haar-random target per run over the universal alphabet.
pub fn compute_random_unitary(cfg: &ExperimentConfig) -> Result<CurveReport> {
    let alphabet = alphabet(cfg, AlphabetKind::Universal)?;
    let pairs = par_map(cfg.jobs, cfg.runs, |i| {
        let target = haar_target(cfg.qubits, cfg.run_seed(i));
        let run = run_chain(cfg, &target, alphabet.clone(), i)?;
        Ok((run, target))
    })?;
    let (runs, targets) = pairs.into_iter().unzip();
    Ok(CurveReport { runs, targets: Some(targets) })
}

// ---------------------------------------------------------------------------

/// One row of the comparison table; `None` prints as a dash.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsRow {
    pub method: String,
    pub time: Option<f64>,
    pub mean_d: Option<f64>,
    pub max_d: Option<f64>,
    pub cost: Option<f64>,
}

impl StatsRow {
    fn from_profile(method: &str, profile: &PathProfile) -> Self {
        StatsRow {
            method: method.to_string(),
            time: profile.total_time,
            mean_d: profile.mean_distance(),
            max_d: profile.max_distance(),
            cost: profile.final_cost,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PathReport {
    pub trotter: (CompiledSequence, PathProfile),
    pub qdrift: (CompiledSequence, PathProfile),
    pub stoq: Vec<(RunResult, PathProfile)>,
    pub stats: Vec<StatsRow>,
    pub baseline_seconds: f64,
}

impl PathReport {
    pub fn row(&self, method: &str) -> Option<&StatsRow> {
        self.stats.iter().find(|r| r.method == method)
    }

    fn write(&self, cfg: &ExperimentConfig, out: &mut ArtifactDir) -> Result<()> {
        let header = ["step", "cum_time", "path_distance"];
        let rows = |p: &PathProfile| {
            p.records
                .iter()
                .map(|r| vec![r.step.to_string(), opt6(r.cum_time), f6(r.distance)])
                .collect::<Vec<_>>()
        };
        out.csv("profiles/trotter.csv", &header, rows(&self.trotter.1))?;
        out.csv("profiles/qdrift.csv", &header, rows(&self.qdrift.1))?;
        for (run, profile) in &self.stoq {
            out.csv(&format!("profiles/stoq_run_{:03}.csv", run.index), &header, rows(profile))?;
            out.text(&format!("sequences/stoq_run_{:03}.txt", run.index), &run.sequence.to_string())?;
        }
        out.text("sequences/trotter.txt", &self.trotter.0.to_string())?;
        out.text("sequences/qdrift.txt", &self.qdrift.0.to_string())?;
        out.csv(
            "stats.csv",
            &["method", "time", "mean_d", "max_d", "cost"],
            self.stats.iter().map(|r| vec![r.method.clone(), opt6(r.time), opt6(r.mean_d), opt6(r.max_d), opt6(r.cost)]),
        )?;
        #[derive(Serialize)]
        struct Results<'a> {
            stats: &'a [StatsRow],
            stoq_runs: Vec<RunSummary>,
        }
        let results = Results { stats: &self.stats, stoq_runs: self.stoq.iter().map(|(r, _)| r.summary()).collect() };
        let mut timings = vec![Timing { label: "baselines".into(), seconds: self.baseline_seconds }];
        timings.extend(self.stoq.iter().map(|(r, _)| Timing { label: format!("stoq run {}", r.index), seconds: r.seconds }));
        finish(out, cfg, self.stoq.iter().map(|(r, _)| r.seed).collect(), results, timings)
    }
}

pub const STOQ_MEDIAN: &str = "STOQ median";

/// Path profiles and the comparison table for Trotter, QDRIFT and STOQ runs.
/// Both baselines use the base seed on their own streams.
pub fn compute_path_comparison(cfg: &ExperimentConfig) -> Result<PathReport> {
    let ham = cfg.hamiltonian()?;
    let analyzer = PathAnalyzer::new(ham, cfg.tau, cfg.grid_points)?;
    let start = Instant::now();
    let trotter = randomized_trotter(ham, cfg.tau, cfg.trotter_steps, &mut stream_rng(cfg.seed, TROTTER_STREAM))?;
    let trotter_profile = analyzer.profile(&trotter, "Trotter")?;
    let drift = qdrift(ham, cfg.tau, cfg.qdrift_reps, &mut stream_rng(cfg.seed, QDRIFT_STREAM))?;
    let drift_profile = analyzer.profile(&drift, "QDRIFT")?;
    let baseline_seconds = start.elapsed().as_secs_f64();

    let target = ham.time_evolution(cfg.tau)?;
    let alphabet = alphabet(cfg, AlphabetKind::Terms)?;
    let stoq = par_map(cfg.jobs, cfg.runs, |i| {
        let run = run_chain(cfg, &target, alphabet.clone(), i)?;
        let profile = analyzer.profile(&run.sequence, "STOQ")?;
        Ok((run, profile))
    })?;

    let mut stats = vec![
        StatsRow { method: "Ideal".into(), time: Some(cfg.tau), mean_d: None, max_d: None, cost: None },
        StatsRow::from_profile("Trotter", &trotter_profile),
        StatsRow::from_profile("QDRIFT", &drift_profile),
    ];
    let stoq_rows: Vec<StatsRow> =
        stoq.iter().map(|(r, p)| StatsRow::from_profile(&format!("STOQ run {}", r.index), p)).collect();
    if !stoq_rows.is_empty() {
        let col = |f: fn(&StatsRow) -> Option<f64>| -> Option<f64> {
            let xs: Option<Vec<f64>> = stoq_rows.iter().map(f).collect();
            xs.map(|v| median(&v))
        };
        let median_row = StatsRow {
            method: STOQ_MEDIAN.into(),
            time: col(|r| r.time),
            mean_d: col(|r| r.mean_d),
            max_d: col(|r| r.max_d),
            cost: col(|r| r.cost),
        };
        stats.extend(stoq_rows);
        stats.push(median_row);
    }
    Ok(PathReport {
        trotter: (trotter, trotter_profile),
        qdrift: (drift, drift_profile),
        stoq,
        stats,
        baseline_seconds,
    })
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct DepthPoint {
    pub depth: f64,
    pub gates: usize,
    pub aggregate: Aggregate,
    pub runs: Vec<RunSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthReport {
    /// Mean final cost of Haar-random targets at the same size and iteration count.
    pub plateau: Aggregate,
    pub plateau_runs: Vec<RunSummary>,
    pub points: Vec<DepthPoint>,
    /// Absent when fewer than two depths were run.
    pub fit: Option<SaturationFit>,
}

impl DepthReport {
    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.aggregate.mean_final_cost).collect()
    }

    fn write(&self, cfg: &ExperimentConfig, out: &mut ArtifactDir) -> Result<()> {
        out.csv(
            "depth_summary.csv",
            &["depth", "gates", "runs", "mean_cost", "std_err"],
            self.points.iter().map(|p| {
                vec![f6(p.depth), p.gates.to_string(), p.aggregate.runs.to_string(), f6(p.aggregate.mean_final_cost), f6(p.aggregate.std_err)]
            }),
        )?;
        out.json("fit.json", &serde_json::json!({ "model": "c_rand * (1 - exp(-d / kappa))", "fit": self.fit }))?;
        let mut timings: Vec<Timing> =
            self.plateau_runs.iter().map(|r| Timing { label: format!("plateau run {}", r.index), seconds: r.seconds }).collect();
        for p in &self.points {
            timings.extend(p.runs.iter().map(|r| Timing { label: format!("depth {} run {}", p.depth, r.index), seconds: r.seconds }));
        }
        let seeds = (0..cfg.runs.max(cfg.plateau_runs)).map(|i| cfg.run_seed(i)).collect();
        finish(out, cfg, seeds, self, timings)
    }
}

/// Final costs for random circuits of each average depth, plus the Haar plateau
/// and a one-parameter saturation fit through the means.
pub fn compute_depth_sweep(cfg: &ExperimentConfig) -> Result<DepthReport> {
    let compile_alphabet = alphabet(cfg, AlphabetKind::Universal)?;
    let circuit_alphabet = alphabet(cfg, cfg.circuit_alphabet)?;

    let plateau_runs = par_map(cfg.jobs, cfg.plateau_runs, |i| {
        let target = haar_target(cfg.qubits, cfg.run_seed(i));
        Ok(run_chain(cfg, &target, compile_alphabet.clone(), i)?.summary())
    })?;
    let plateau = Aggregate::of(&plateau_runs.iter().map(|r| r.final_cost).collect::<Vec<_>>());

    let jobs: Vec<(usize, usize)> = (0..cfg.depths.len()).flat_map(|d| (0..cfg.runs).map(move |i| (d, i))).collect();
    let finals = par_map(cfg.jobs, jobs.len(), |k| {
        let (d, i) = jobs[k];
        let seed = cfg.run_seed(i);
        let circuit = random_circuit(cfg.qubits, cfg.depths[d], circuit_alphabet.clone(), &mut stream_rng(seed, TARGET_STREAM))?;
        Ok(run_chain(cfg, &circuit.product(), compile_alphabet.clone(), i)?.summary())
    })?;
    let points: Vec<DepthPoint> = cfg
        .depths
        .iter()
        .enumerate()
        .map(|(d, &depth)| {
            let runs = finals[d * cfg.runs..(d + 1) * cfg.runs].to_vec();
            let costs: Vec<f64> = runs.iter().map(|r| r.final_cost).collect();
            DepthPoint { depth, gates: circuit_gate_count(cfg.qubits, depth), aggregate: Aggregate::of(&costs), runs }
        })
        .collect();
    let means: Vec<f64> = points.iter().map(|p| p.aggregate.mean_final_cost).collect();
    let fit = fit_saturation(&cfg.depths, &means, plateau.mean_final_cost);
    Ok(DepthReport { plateau, plateau_runs, points, fit })
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct SweepCell {
    pub delta_beta: f64,
    pub p_append: f64,
    pub aggregate: Aggregate,
    pub runs: Vec<RunSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    fn write(&self, cfg: &ExperimentConfig, out: &mut ArtifactDir) -> Result<()> {
        out.csv(
            "grid.csv",
            &["delta_beta", "p_append", "runs", "mean_cost", "std_err"],
            self.cells.iter().map(|c| {
                vec![f6(c.delta_beta), f6(c.p_append), c.aggregate.runs.to_string(), f6(c.aggregate.mean_final_cost), f6(c.aggregate.std_err)]
            }),
        )?;
        let mut timings = Vec::new();
        for c in &self.cells {
            timings.extend(c.runs.iter().map(|r| Timing {
                label: format!("delta_beta {} p_append {} run {}", c.delta_beta, c.p_append, r.index),
                seconds: r.seconds,
            }));
        }
        finish(out, cfg, (0..cfg.runs).map(|i| cfg.run_seed(i)).collect(), self, timings)
    }
}

/// Mean final cost on Haar-random targets for every (delta_beta, p_append)
/// pair. Run `i` of every cell compiles the same target.
pub fn compute_param_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let alphabet = alphabet(cfg, AlphabetKind::Universal)?;
    let grid: Vec<(f64, f64)> =
        cfg.sweep_delta_beta.iter().flat_map(|&b| cfg.sweep_p_append.iter().map(move |&p| (b, p))).collect();
    let targets: Vec<ComplexMatrix> = (0..cfg.runs).map(|i| haar_target(cfg.qubits, cfg.run_seed(i))).collect();
    let finals = par_map(cfg.jobs, grid.len() * cfg.runs, |k| {
        let (b, p) = grid[k / cfg.runs];
        let i = k % cfg.runs;
        let cell_cfg = ExperimentConfig { delta_beta: b, p_append: p, ..cfg.clone() };
        Ok(run_chain(&cell_cfg, &targets[i], alphabet.clone(), i)?.summary())
    })?;
    let cells = grid
        .iter()
        .enumerate()
        .map(|(c, &(delta_beta, p_append))| {
            let runs = finals[c * cfg.runs..(c + 1) * cfg.runs].to_vec();
            let costs: Vec<f64> = runs.iter().map(|r| r.final_cost).collect();
            SweepCell { delta_beta, p_append, aggregate: Aggregate::of(&costs), runs }
        })
        .collect();
    Ok(SweepReport { cells })
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CompileReport {
    pub run: RunResult,
    /// Cost of the final sequence recomputed from scratch.
    pub recomputed_cost: f64,
}

impl CompileReport {
    fn write(&self, cfg: &ExperimentConfig, out: &mut ArtifactDir) -> Result<()> {
        out.text("sequence.txt", &self.run.sequence.to_string())?;
        out.csv("trace.csv", &TRACE_HEADER, trace_rows(&self.run.trace))?;
        #[derive(Serialize)]
        struct Results {
            run: RunSummary,
            recomputed_cost: f64,
        }
        let results = Results { run: self.run.summary(), recomputed_cost: self.recomputed_cost };
        let timings = vec![Timing { label: "run 0".into(), seconds: self.run.seconds }];
        finish(out, cfg, vec![self.run.seed], results, timings)
    }
}

/// One compilation of a target file or of `e^{iH tau}`.
pub fn compute_compile(cfg: &ExperimentConfig) -> Result<CompileReport> {
    let target = match &cfg.target_matrix {
        Some(m) => m.clone(),
        None => cfg.hamiltonian()?.time_evolution(cfg.tau)?,
    };
    let run = run_chain(cfg, &target, alphabet(cfg, cfg.alphabet)?, 0)?;
    let recomputed_cost = cost(&target, &run.sequence.product()).map_err(stoq::Error::from)?;
    Ok(CompileReport { run, recomputed_cost })
}

// ---------------------------------------------------------------------------

/// Runs the configured experiment and writes its artifacts under `cfg.out`.
/// Returns the list of files written, relative to `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<String>> {
    let mut out = ArtifactDir::create(&cfg.out)?;
    match cfg.experiment {
        Experiment::CostCurves => compute_cost_curves(cfg)?.write(cfg, &mut out)?,
        Experiment::RandomUnitary => compute_random_unitary(cfg)?.write(cfg, &mut out)?,
        Experiment::PathCompare => compute_path_comparison(cfg)?.write(cfg, &mut out)?,
        Experiment::DepthSweep => compute_depth_sweep(cfg)?.write(cfg, &mut out)?,
        Experiment::ParamSweep => compute_param_sweep(cfg)?.write(cfg, &mut out)?,
        Experiment::Compile => compute_compile(cfg)?.write(cfg, &mut out)?,
    }
    Ok(out.written().to_vec())
}

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

fn stoq(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_stoq")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = stoq(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

/// Every file under `dir` except the wall-clock timings.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().unwrap() != "timings.json" {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    files
}

#[test]
fn trace_has_one_row_per_iteration() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("cc");
    ok(&["cost-curves", "--runs", "1", "--iterations", "10", "--out", out.to_str().unwrap()]);
    let trace = fs::read_to_string(out.join("traces/run_000.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines[0], "iteration,beta,cost,accepted,seq_len");
    assert_eq!(lines.len(), 11);
    assert!(lines[10].starts_with("10,0.100000,"));
}

#[test]
fn flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("exp.toml");
    fs::write(&cfg, "runs = 3\nseed = 5\niterations = 50\nqubits = 2\n").unwrap();
    let out = tmp.path().join("ru");
    ok(&["random-unitary", "--config", cfg.to_str().unwrap(), "--runs", "2", "--out", out.to_str().unwrap()]);
    let s = summary(&out);
    assert_eq!(s["manifest"]["seeds"], serde_json::json!([5, 6]));
    assert_eq!(s["config"]["iterations"], 50);
}

#[test]
fn run_seed_is_base_plus_index() {
    let tmp = TempDir::new().unwrap();
    let (all, single) = (tmp.path().join("all"), tmp.path().join("single"));
    ok(&["random-unitary", "--runs", "3", "--seed", "10", "--iterations", "300", "--out", all.to_str().unwrap()]);
    ok(&["random-unitary", "--runs", "1", "--seed", "12", "--iterations", "300", "--out", single.to_str().unwrap()]);
    assert_eq!(fs::read(all.join("traces/run_002.csv")).unwrap(), fs::read(single.join("traces/run_000.csv")).unwrap());
    assert_eq!(fs::read(all.join("targets/run_002.txt")).unwrap(), fs::read(single.join("targets/run_000.txt")).unwrap());
}

#[test]
fn summary_mean_is_plain_mean_of_finals() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("cc");
    ok(&["cost-curves", "--preset", "ising3", "--runs", "4", "--iterations", "500", "--out", out.to_str().unwrap()]);
    let s = summary(&out);
    let finals: Vec<f64> = s["results"]["runs"].as_array().unwrap().iter().map(|r| r["final_cost"].as_f64().unwrap()).collect();
    let mean = s["results"]["aggregate"]["mean_final_cost"].as_f64().unwrap();
    assert_eq!(finals.len(), 4);
    assert!((mean - finals.iter().sum::<f64>() / 4.0).abs() < 1e-12);
}

#[test]
fn thread_count_does_not_change_outputs() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let base = ["param-sweep", "--runs", "3", "--iterations", "400", "--sweep-delta-beta", "0.01,0.1"];
    let with = |dir: &Path, jobs: &str| {
        let mut args = base.to_vec();
        args.extend(["--jobs", jobs, "--out", dir.to_str().unwrap()]);
        ok(&args);
    };
    with(&a, "1");
    with(&b, "3");
    assert_eq!(snapshot(&a), snapshot(&b));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("x");
    let o = out.to_str().unwrap();
    assert_eq!(stoq(&["cost-curves", "--preset", "ising4", "--out", o]).status.code(), Some(2));
    assert_eq!(stoq(&["random-unitary", "--iterations", "0", "--out", o]).status.code(), Some(2));
    assert_eq!(stoq(&["random-unitary", "--p-append", "1.5", "--out", o]).status.code(), Some(2));

    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "itterations = 5\n").unwrap();
    assert_eq!(stoq(&["random-unitary", "--config", cfg.to_str().unwrap(), "--out", o]).status.code(), Some(2));

    let target = tmp.path().join("t.txt");
    fs::write(&target, "2\n1,0 0,0\n0,0 2,0\n").unwrap();
    assert_eq!(stoq(&["compile", "--target", target.to_str().unwrap(), "--out", o]).status.code(), Some(3));
}

#[test]
fn path_compare_without_stoq_runs() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("pc");
    ok(&["path-compare", "--runs", "0", "--grid-points", "101", "--out", out.to_str().unwrap()]);
    let stats = fs::read_to_string(out.join("stats.csv")).unwrap();
    let methods: Vec<&str> = stats.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(methods, ["Ideal", "Trotter", "QDRIFT"]);
    assert!(stats.contains("Ideal,0.500000,—,—,—"));
    assert!(stats.contains("Trotter,4.500000,"));
    assert!(stats.contains("QDRIFT,5.500000,"));
}

#[test]
fn single_cell_and_single_depth() {
    let tmp = TempDir::new().unwrap();
    let grid = tmp.path().join("grid");
    ok(&[
        "param-sweep", "--runs", "2", "--iterations", "200", "--sweep-delta-beta", "0.1", "--sweep-p-append", "0.5",
        "--out", grid.to_str().unwrap(),
    ]);
    assert_eq!(fs::read_to_string(grid.join("grid.csv")).unwrap().lines().count(), 2);

    let depth = tmp.path().join("depth");
    ok(&[
        "depth-sweep", "--qubits", "3", "--depths", "4", "--runs", "2", "--iterations", "200", "--out",
        depth.to_str().unwrap(),
    ]);
    let fit: Value = serde_json::from_str(&fs::read_to_string(depth.join("fit.json")).unwrap()).unwrap();
    assert!(fit["fit"].is_null());
    assert_eq!(fs::read_to_string(depth.join("depth_summary.csv")).unwrap().lines().count(), 2);
}

#[test]
fn hamiltonian_file_input() {
    let tmp = TempDir::new().unwrap();
    let ham = tmp.path().join("h.txt");
    fs::write(&ham, "# two-qubit chain\n1.27 XX\n1.54 YI\n1.19 IY\n").unwrap();
    let (from_file, from_preset) = (tmp.path().join("f"), tmp.path().join("p"));
    ok(&["cost-curves", "--hamiltonian", ham.to_str().unwrap(), "--runs", "1", "--iterations", "300", "--out", from_file.to_str().unwrap()]);
    ok(&["cost-curves", "--preset", "ising2", "--runs", "1", "--iterations", "300", "--out", from_preset.to_str().unwrap()]);
    assert_eq!(fs::read(from_file.join("traces/run_000.csv")).unwrap(), fs::read(from_preset.join("traces/run_000.csv")).unwrap());
}

#[test]
fn compile_sequence_round_trips() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("c");
    ok(&["compile", "--preset", "ising2", "--iterations", "2000", "--seed", "3", "--out", out.to_str().unwrap()]);
    let s = summary(&out);
    let reported = s["results"]["run"]["final_cost"].as_f64().unwrap();
    let recomputed = s["results"]["recomputed_cost"].as_f64().unwrap();
    assert!((reported - recomputed).abs() < 1e-8);

    let ham = stoq::hamiltonian::preset("ising2").unwrap();
    let alphabet = std::sync::Arc::new(stoq::gates::hamiltonian_term_alphabet(&ham, 0.2, 0.5).unwrap());
    let text = fs::read_to_string(out.join("sequence.txt")).unwrap();
    let seq = stoq::CompiledSequence::parse(&text, alphabet).unwrap();
    assert_eq!(seq.to_string(), text);
    let cost = stoq::matrix::cost(&ham.time_evolution(0.5).unwrap(), &seq.product()).unwrap();
    // 12-decimal parameters reproduce the cost closely
    assert!((cost - recomputed).abs() < 1e-9);
}

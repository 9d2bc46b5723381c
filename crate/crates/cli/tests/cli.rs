use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use popdist::io::parse_distribution_csv;
use popdist::AtomicDistribution;

fn popdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_popdist"))
        .args(args)
        .env_remove("POPDIST_SEED")
        .output()
        .unwrap()
}

fn toy(dir: &Path) -> String {
    let path = dir.join("toy.csv");
    fs::write(&path, "t=2\n0\n1\n1\n2\n").unwrap();
    path.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn empirical_toy_estimate() {
    let tmp = tempfile::tempdir().unwrap();
    let input = toy(tmp.path());
    let out = tmp.path().join("out");
    let o = popdist(&["estimate", "--input", &input, "--method", "empirical", "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let d = parse_distribution_csv(&fs::read_to_string(out.join("distribution.csv")).unwrap()).unwrap();
    assert_eq!(d, AtomicDistribution::new([(0.0, 0.25), (0.5, 0.5), (1.0, 0.25)]).unwrap());
    let moments = fs::read_to_string(out.join("moments.csv")).unwrap();
    assert_eq!(moments.lines().count(), 3);
    assert!(moments.starts_with("order,estimated,observed\n1,0.5,0.5\n"));
}

#[test]
fn mle_on_two_point_grid_fits_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let input = toy(tmp.path());
    let out = tmp.path().join("out");
    let o = popdist(&["estimate", "--input", &input, "--method", "mle", "--grid-size", "2", "--out-dir", s(&out)]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report["final_objective"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["elapsed_ms"].as_f64(), Some(0.0));
    assert_eq!(report["N"], 4);
}

#[test]
fn local_matching_needs_trials() {
    let tmp = tempfile::tempdir().unwrap();
    let input = toy(tmp.path());
    let o = popdist(&["estimate", "--input", &input, "--method", "local_moment_matching", "--out-dir", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("raw trials required"));
}

#[test]
fn parse_errors_name_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.csv");
    fs::write(&path, "t=3\n1\n2\nfour\n").unwrap();
    let o = popdist(&["estimate", "--input", s(&path), "--out-dir", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn conflicting_flags_rejected_before_compute() {
    let tmp = tempfile::tempdir().unwrap();
    let input = toy(tmp.path());
    let out = tmp.path().join("out");
    let o = popdist(&["estimate", "--input", &input, "--method", "mle", "--c1", "2", "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn moment_matching_from_trials_file() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("trials.csv");
    fs::write(&path, "trials,t=4\n1101\n0110\n1111\n0001\n1000\n0111\n1010\n0011\n").unwrap();
    let out = tmp.path().join("out");
    let o = popdist(&["estimate", "--input", s(&path), "--method", "moment_matching", "--moments", "3", "--grid-size", "100", "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(out.join("moments.csv")).unwrap().lines().count(), 5);
}

#[test]
fn simulate_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let o = popdist(&[
        "simulate", "--truth", "spike:0.5", "--N", "1000", "--t", "10", "--methods", "mle,empirical", "--seed", "1",
        "--out-dir", s(tmp.path()),
    ]);
    assert!(o.status.success());
    let results = fs::read_to_string(tmp.path().join("results.csv")).unwrap();
    let lines: Vec<&str> = results.lines().collect();
    assert_eq!(lines[0], "scenario_id,estimator,N,t,rep,w1,runtime_ms");
    assert_eq!(lines.len(), 1 + 2 * 5);
    for rep in 0..5 {
        let rows: Vec<_> = lines[1..].iter().filter(|l| l.split(',').nth(4) == Some(&rep.to_string())).collect();
        assert_eq!(rows.len(), 2);
    }
    let summary = fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn invalid_method_lists_valid_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let o = popdist(&["simulate", "--truth", "uniform", "--N", "10", "--t", "2", "--methods", "mle,bogus", "--out-dir", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for m in ["mle", "empirical", "moment_matching", "local_moment_matching"] {
        assert!(err.contains(m));
    }
}

#[test]
fn spec_file_and_env_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("spec.txt");
    fs::write(&spec, "# smoke\ntruth = three_spikes\nN = 300\nt = 6\nreps = 2\nmethods = empirical\nid = demo\n").unwrap();
    let run = |dir: &str, seed: Option<&str>, extra: &[&str]| {
        let out = tmp.path().join(dir);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_popdist"));
        cmd.args(["simulate", "--spec", s(&spec), "--out-dir", s(&out)]).args(extra).env_remove("POPDIST_SEED");
        if let Some(v) = seed {
            cmd.env("POPDIST_SEED", v);
        }
        assert!(cmd.output().unwrap().status.success());
        fs::read_to_string(out.join("results.csv")).unwrap()
    };
    let env5 = run("a", Some("5"), &[]);
    let flag5 = run("b", None, &["--seed", "5"]);
    let env6 = run("c", Some("6"), &[]);
    assert_eq!(env5, flag5);
    assert_ne!(env5, env6);
    assert!(env5.lines().nth(1).unwrap().starts_with("demo,empirical,300,6,0,"));
    // flags win over the file
    let more = run("d", None, &["--reps", "3"]);
    assert_eq!(more.lines().count(), 4);
}

#[test]
fn bad_spec_file_reports_line() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("spec.txt");
    fs::write(&spec, "truth = uniform\nN = lots\nt = 4\n").unwrap();
    let o = popdist(&["simulate", "--spec", s(&spec), "--out-dir", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn custom_truth_from_file() {
    let tmp = tempfile::tempdir().unwrap();
    let dist = tmp.path().join("truth.csv");
    fs::write(&dist, "location,mass\n0.2,0.5\n0.8,0.5\n").unwrap();
    let truth = format!("custom:{}", s(&dist));
    let o = popdist(&["simulate", "--truth", &truth, "--N", "200", "--t", "4", "--reps", "1", "--methods", "mle", "--out-dir", s(tmp.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_sweeps() {
    let tmp = tempfile::tempdir().unwrap();
    let o = popdist(&["verify", "--t-max", "10", "--out-dir", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(0));
    let one = tmp.path().join("one");
    let o = popdist(&["verify", "--t-max", "1", "--out-dir", s(&one)]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(one.join("coeff_bounds.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(csv.lines().next().unwrap(), "t,m,max_abs_coeff,lemma4_bound,conjecture_bound,lemma4_ok,conjecture_ok");
}

#[test]
fn verify_full_range_is_fast() {
    let tmp = tempfile::tempdir().unwrap();
    let start = std::time::Instant::now();
    let o = popdist(&["verify", "--t-max", "50", "--k-max", "30", "--out-dir", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(start.elapsed().as_secs() < 60);
    assert_eq!(fs::read_to_string(tmp.path().join("coeff_bounds.csv")).unwrap().lines().count(), 51);
}

#[test]
fn compare_and_scenario_emit_json() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("p.csv");
    let q = tmp.path().join("q.csv");
    fs::write(&p, "location,mass\n0.5,1\n").unwrap();
    fs::write(&q, "location,mass\n0,0.5\n1,0.5\n").unwrap();
    let o = popdist(&["compare", "--p", s(&p), "--q", s(&q), "--t", "3"]);
    assert!(o.status.success());
    let records: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(records[0]["metric"], "w1");
    assert_eq!(records[0]["value"].as_f64(), Some(0.5));
    assert_eq!(records.as_array().unwrap().len(), 4);

    let o = popdist(&["scenario", "--N", "2.718281828459045", "--t", "4"]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["s"], 40);
    assert_eq!(r["interval"][0].as_f64(), Some(0.0));
    assert_eq!(r["interval"][1].as_f64(), Some(1.0));

    let o = popdist(&["scenario", "--N", "1", "--t", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

use std::path::{Path, PathBuf};
use std::process::Command;

use paretoset::artifact::RunArtifact;
use paretoset::bundle::UiBundle;
use paretoset::model::distance_to_chain;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paretoset"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("paretoset-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn train(args: &[&str], out: &Path) -> RunArtifact {
    let status = bin()
        .arg("train")
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    RunArtifact::load(out).unwrap()
}

/// Artifact JSON with the wall-clock fields zeroed.
fn without_timings(mut a: RunArtifact) -> String {
    a.timings.optimize_ms = 0.0;
    a.timings.sample_ms = 0.0;
    for r in &mut a.metrics.rows {
        r.wall_time_ms = 0.0;
    }
    a.to_json().unwrap()
}

#[test]
fn plain_training_respects_the_budget() {
    let dir = scratch("budget");
    let a = train(
        &["--problem", "syn", "--variant", "plain", "--iters", "1000", "--n-pref", "5", "--k-es", "5", "--seed", "1"],
        &dir.join("plain.json"),
    );
    assert!(a.metrics.rows.iter().all(|r| r.eval_count <= 30000));
    assert_eq!(a.log.last().unwrap().eval_count, 30000);
    assert_eq!(a.samples.iter().map(|s| s.triples.len()).collect::<Vec<_>>(), vec![100, 1000]);
    assert_eq!(a.consistency_error().unwrap(), 0.0);
    assert!(dir.join("plain.log.jsonl").exists());
    let lines = std::fs::read_to_string(dir.join("plain.log.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 1000);
}

#[test]
fn chain_samples_lie_on_the_chain() {
    let dir = scratch("chain");
    let a = train(
        &["--problem", "syn", "--variant", "chain", "--vertices", "4", "--iters", "200", "--seed", "2"],
        &dir.join("chain.json"),
    );
    let model = a.model().unwrap();
    let bounds = paretoset::problems::by_name::<f64>("syn").unwrap().spec().bounds.clone();
    let vertices = model.chain_vertices(&bounds).unwrap();
    assert_eq!(vertices.len(), 4);
    for set in &a.samples {
        for t in &set.triples {
            assert!(distance_to_chain(&vertices, &t.x) < 1e-12);
        }
    }
}

#[test]
fn identical_commands_give_identical_artifacts() {
    let dir = scratch("determinism");
    let args = ["--problem", "syn", "--variant", "shared", "--shared-idx", "2", "--iters", "300", "--seed", "7"];
    let a = train(&args, &dir.join("a.json"));
    let b = train(&args, &dir.join("b.json"));
    assert_eq!(a.loss_history(), b.loss_history());
    assert_eq!(without_timings(a), without_timings(b));
}

#[test]
fn unknown_problem_fails() {
    let out = bin().args(["train", "--problem", "zdt99"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("zdt99"));
}

#[test]
fn malformed_flag_fails() {
    let out = bin().args(["train", "--iters", "many"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn export_bundle_from_trained_artifact() {
    let dir = scratch("export");
    let path = dir.join("run.json");
    train(&["--problem", "syn", "--iters", "50", "--seed", "3"], &path);
    let bundle_path = dir.join("run.bundle.json");
    let out = bin()
        .args(["export-ui", path.to_str().unwrap(), "--grid", "201", "--out", bundle_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bundle = UiBundle::load(&bundle_path).unwrap();
    assert_eq!(bundle.grid.len(), 201);
    assert!(bundle.grid.windows(2).all(|w| w[0].pref[0] < w[1].pref[0]));
    assert!(bundle.consistency.consistent);
    assert!(bundle.pf_samples.is_some());
}

#[test]
fn compare_reports_one_row_per_method() {
    let out = bin()
        .args(["compare", "--problem", "syn", "--seeds", "4", "--iters", "20"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    for method in ["EPSL", "EPSL(1000)", "MOEA/D-TCH"] {
        let rows = text
            .lines()
            .filter(|l| l.split('\t').nth(1) == Some(method) && l.split('\t').nth(2) == Some("4"))
            .count();
        assert_eq!(rows, 1, "{method}");
    }
    assert!(text.contains("median_dhv"));
}

#[test]
fn sample_and_metrics_commands() {
    let dir = scratch("sample");
    let path = dir.join("run.json");
    train(&["--problem", "re21", "--iters", "20", "--seed", "5"], &path);
    let out = bin().args(["sample", path.to_str().unwrap(), "--count", "3"]).output().unwrap();
    assert!(out.status.success());
    let triples: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(triples.as_array().unwrap().len(), 3);
    let out = bin().args(["metrics", path.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("re21\tEPSL(1000)"));
}

#[test]
fn output_directory_from_environment() {
    let dir = scratch("envdir");
    let out = bin()
        .args(["train", "--problem", "syn", "--iters", "5", "--seed", "9"])
        .env("PARETOSET_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("syn_plain_seed9.json").exists());
}

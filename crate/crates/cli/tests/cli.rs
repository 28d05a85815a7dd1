use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn iteqd(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_iteqd"));
    for (k, _) in std::env::vars() {
        if k.starts_with("ITEQD_") {
            cmd.env_remove(k);
        }
    }
    cmd.args(args).output().expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn arm_map(dir: &TempDir, name: &str, iterations: &str, seed: &str) -> PathBuf {
    let out = dir.path().join(name);
    ok(&iteqd(&["map", "create", "--task", "arm", "--iterations", iterations, "--seed", seed, "--out", p(&out)]));
    out
}

fn jsonl(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn map_create_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = arm_map(&dir, "a.arc", "100000", "1");
    let b = arm_map(&dir, "b.arc", "100000", "1");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = arm_map(&dir, "c.arc", "100000", "2");
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());

    let progress = jsonl(&dir.path().join("a.arc.progress.jsonl"));
    assert_eq!(progress[0]["meta"]["tool"], "iteqd 0.1.0");
    let last = progress.last().unwrap();
    assert_eq!(last["iterations"], 100000);
    for key in ["filled", "mean_perf", "max_perf", "wall_seconds"] {
        assert!(last.get(key).is_some(), "{key}");
    }
    let text = std::fs::read_to_string(&a).unwrap();
    let hash = progress[0]["meta"]["config_hash"].as_str().unwrap();
    assert!(text.contains(&format!("config_hash,{hash}")));
}

#[test]
fn empty_run_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = iteqd(&["map", "create", "--iterations", "0", "--out", p(&dir.path().join("x.arc"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty run"));
}

#[test]
fn exit_codes() {
    assert_eq!(iteqd(&["nonsense"]).status.code(), Some(1));
    assert_eq!(iteqd(&["--version"]).status.code(), Some(0));
    let missing = iteqd(&["adapt", "run", "--archive", "/nonexistent/map.arc"]);
    assert_eq!(missing.status.code(), Some(2));
    let schema = iteqd(&["adapt", "run", "--archive", p(&fixture("one_cell.arc"))]);
    assert_eq!(schema.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&schema.stderr).contains("schema"));
}

#[test]
fn map_stats_and_export() {
    let stats = ok(&iteqd(&["map", "stats", p(&fixture("one_cell.arc"))]));
    assert!(stats.lines().any(|l| l == "filled=1"), "{stats}");
    let csv = ok(&iteqd(&["map", "export", p(&fixture("one_cell.arc"))]));
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# tool=iteqd"));
    assert_eq!(lines[1], "cell,bin1,d1,performance,g1,g2,g3");
    assert_eq!(lines.len(), 3);
}

#[test]
fn descriptors_on_all_contact_fixture() {
    let out = ok(&iteqd(&["descriptors", "compute", "--kind", "duty_factor", "--traj", p(&fixture("all_contact.csv"))]));
    let values: Vec<f64> = out.trim().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(values, vec![1.0; 6]);
    let bad = iteqd(&["descriptors", "compute", "--kind", "nope", "--traj", p(&fixture("all_contact.csv"))]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn adapt_run_outputs() {
    let dir = TempDir::new().unwrap();
    let map = arm_map(&dir, "m.arc", "100000", "3");
    let log = dir.path().join("one.jsonl");
    ok(&iteqd(&["adapt", "run", "--archive", p(&map), "--damage-case", "c1_j1_stuck_45", "--max-trials", "1", "--log", p(&log)]));
    let lines = jsonl(&log);
    assert_eq!(lines.iter().filter(|l| l.get("trial").is_some()).count(), 1);

    // The intact arm matches its own map, so a reachable bin is hit at once.
    let summary = dir.path().join("s.csv");
    ok(&iteqd(&["adapt", "run", "--archive", p(&map), "--bin-x", "-0.1", "--bin-y", "0.4", "--log", p(&log), "--summary", p(&summary)]));
    let text = std::fs::read_to_string(&summary).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert!(rows[0].starts_with("# tool=iteqd 0.1.0 config_hash="));
    assert_eq!(rows[1], "condition,map_id,trials,seconds,best_perf,best_truth,best_cell,stop_reason");
    let fields: Vec<&str> = rows[2].split(',').collect();
    assert_eq!(fields[0], "intact");
    assert_eq!(fields[1], "m");
    let trials: usize = fields[2].parse().unwrap();
    assert!((1..=3).contains(&trials), "{trials}");
    assert_eq!(fields[7], "target_radius");

    let a = ok(&iteqd(&["adapt", "run", "--archive", p(&map), "--damage-case", "c2_j2_offset_45"]));
    let b = ok(&iteqd(&["adapt", "run", "--archive", p(&map), "--damage-case", "c2_j2_offset_45"]));
    assert_eq!(a, b);
}

#[test]
fn trigger_drop_gates_adaptation() {
    let dir = TempDir::new().unwrap();
    let map = arm_map(&dir, "m.arc", "50000", "4");
    let quiet = ok(&iteqd(&["adapt", "run", "--archive", p(&map), "--trigger-drop", "0.05"]));
    let lines: Vec<Value> = quiet.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[1]["trigger"]["triggered"], false);
    assert_eq!(lines.len(), 2);

    let loud = ok(&iteqd(&["adapt", "run", "--archive", p(&map), "--damage-case", "c1_j1_stuck_45", "--trigger-drop", "0.05"]));
    let lines: Vec<Value> = loud.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[1]["trigger"]["triggered"], true);
    assert!(lines.len() > 2);
}

#[test]
fn settings_layering() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# map settings\ntask = arm\niterations = 3000\nseed = 5\n").unwrap();
    let run = |extra: &[&str], env: Option<(&str, &str)>| {
        let out = dir.path().join("x.arc");
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_iteqd"));
        cmd.args(["map", "create", "--config", p(&cfg), "--out", p(&out)]).args(extra);
        if let Some((k, v)) = env {
            cmd.env(k, v);
        }
        ok(&cmd.output().unwrap());
        jsonl(&dir.path().join("x.arc.progress.jsonl"))[0]["meta"]["settings"].clone()
    };
    let s = run(&[], None);
    assert_eq!((s["seed"].as_str(), s["iterations"].as_str()), (Some("5"), Some("3000")));
    let s = run(&[], Some(("ITEQD_SEED", "6")));
    assert_eq!(s["seed"], "6");
    let s = run(&["--seed", "7"], Some(("ITEQD_SEED", "6")));
    assert_eq!(s["seed"], "7");

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let out = iteqd(&["map", "create", "--config", p(&cfg), "--out", p(&dir.path().join("y.arc"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_variants_writes_one_row_per_variant() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bench.csv");
    let raw = dir.path().join("raw.jsonl");
    ok(&iteqd(&[
        "bench",
        "variants",
        "--budget",
        "17",
        "--maps",
        "1",
        "--iterations",
        "20000",
        "--damage-cases",
        "c1_j1_stuck_45",
        "--out",
        p(&csv),
        "--raw",
        p(&raw),
    ]));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# tool=iteqd"));
    assert!(lines[1].starts_with("variant,damage,seed,cut,"));
    let rows = &lines[2..];
    assert_eq!(rows.len(), 6);
    for (row, name) in rows.iter().zip(["ite", "map_random", "map_bo_noprior", "map_policy_gradient", "raw_bo", "raw_policy_gradient"]) {
        assert!(row.starts_with(&format!("{name},c1_j1_stuck_45,0,17,1,")), "{row}");
    }
    assert_eq!(jsonl(&raw).len(), 1 + 6 * 17);

    let short = iteqd(&["bench", "variants", "--budget", "5", "--maps", "1", "--iterations", "2000"]);
    assert_eq!(short.status.code(), Some(1));
}

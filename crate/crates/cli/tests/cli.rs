use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tightcycle"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_solve_exact_verify_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let h3 = dir.path().join("k12.h3");
    let cyc = dir.path().join("k12.cycle");

    let out = run(&["gen", "--kind", "complete", "--n", "12", "--out", path_str(&h3)]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let out = run(&["solve-exact", "--in", path_str(&h3), "--out", path_str(&cyc)]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let out = run(&["verify", "--in", path_str(&h3), "--cycle", path_str(&cyc)]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("valid"));
}

#[test]
fn exact_proves_extremal_instances_acyclic() {
    let dir = tempfile::tempdir().unwrap();
    let h3 = dir.path().join("ex.h3");
    run(&["gen", "--kind", "i", "--n", "9", "--out", path_str(&h3)]);
    let out = run(&["solve-exact", "--in", path_str(&h3)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("no tight Hamilton cycle"));
}

#[test]
fn absorb_pipeline_solves_a_dense_instance() {
    let dir = tempfile::tempdir().unwrap();
    let h3 = dir.path().join("r.h3");
    let cyc = dir.path().join("r.cycle");
    run(&[
        "gen", "--kind", "random", "--n", "60", "--p", "0.85", "--seed", "3", "--out",
        path_str(&h3),
    ]);
    let out = run(&[
        "solve-absorb",
        "--in",
        path_str(&h3),
        "--seed",
        "5",
        "--out",
        path_str(&cyc),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["outcome"], "cycle");
    assert_eq!(v["certificate"]["accepted"], true);

    let out = run(&["verify", "--in", path_str(&h3), "--cycle", path_str(&cyc)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_rejects_a_corrupted_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let h3 = dir.path().join("k12.h3");
    let cyc = dir.path().join("bad.cycle");
    run(&["gen", "--kind", "complete", "--n", "12", "--out", path_str(&h3)]);
    std::fs::write(&cyc, "0 1 2 3 4 5 6 7 8 9 10 10\n").unwrap();
    let out = run(&["verify", "--in", path_str(&h3), "--cycle", path_str(&cyc)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("invalid"));
}

#[test]
fn missing_and_malformed_inputs_exit_3() {
    let out = run(&["solve-exact", "--in", "/nonexistent/x.h3"]);
    assert_eq!(out.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let h3 = dir.path().join("bad.h3");
    std::fs::write(&h3, "h3 5 1\n2 1 0\n").unwrap();
    let out = run(&["solve-exact", "--in", path_str(&h3)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn exhausted_search_budget_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let h3 = dir.path().join("e2.h3");
    run(&["gen", "--kind", "ii", "--n", "30", "--out", path_str(&h3)]);
    let out = run(&["solve-exact", "--in", path_str(&h3), "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("nothing claimed"));
}

#[test]
fn report_emits_stage_array_and_config_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let h3 = dir.path().join("s.h3");
    run(&[
        "gen", "--kind", "random", "--n", "20", "--p", "0.9", "--seed", "1", "--out",
        path_str(&h3),
    ]);
    let out = run(&["report", "--in", path_str(&h3)]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["stage_reports"][0]["stage"], "config");
}

#[test]
fn graph_verbs_count_and_measure() {
    let dir = tempfile::tempdir().unwrap();
    let g2 = dir.path().join("p.g2");
    std::fs::write(&g2, "g2 6 7\n0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n1 4\n").unwrap();

    let out = run(&["count-paths", "--in", path_str(&g2), "--from", "0", "--to", "5", "--len", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "1");

    let out = run(&[
        "count-paths", "--in", path_str(&g2), "--from", "0", "--to", "5", "--len", "5", "--walks",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["count"], "21");

    let out = run(&["longest-path", "--in", path_str(&g2)]);
    assert_eq!(stdout(&out).trim(), "5");
}

#[test]
fn thread_env_var_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let h3 = dir.path().join("k6.h3");
    run(&["gen", "--kind", "complete", "--n", "6", "--out", path_str(&h3)]);
    let out = bin()
        .args(["matching", "--in", path_str(&h3)])
        .env("TIGHTCYCLE_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "2");

    let out = bin()
        .args(["matching", "--in", path_str(&h3)])
        .env("TIGHTCYCLE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

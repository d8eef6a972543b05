use std::path::Path;
use std::process::{Command, Output};

fn vigraal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vigraal"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_csv_and_sidecar_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = vigraal(&[
            "run",
            "--problem",
            "matrix-game",
            "--geometry",
            "kl",
            "--solver",
            "adaptive",
            "--size",
            "6",
            "--iters",
            "40",
            "--reps",
            "3",
            "--seed",
            "7",
            "--out",
            path(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 3);
    }
    let csv = std::fs::read_to_string(&a).unwrap();
    assert_eq!(csv, std::fs::read_to_string(&b).unwrap());
    assert_eq!(csv.lines().count(), 1 + 3 * 40);

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["config"]["seed"], 7);
}

#[test]
fn gen_then_run_replays_the_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("cournot.json");
    let o = vigraal(&[
        "gen",
        "--problem",
        "cournot",
        "--size",
        "4",
        "--seed",
        "2",
        "--out",
        path(&inst),
    ]);
    assert!(o.status.success());
    let out = dir.path().join("run.csv");
    let o = vigraal(&[
        "run",
        "--problem",
        "cournot",
        "--geometry",
        "hellinger",
        "--solver",
        "adaptive",
        "--iters",
        "30",
        "--reps",
        "2",
        "--instance",
        path(&inst),
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read_to_string(&out).unwrap().lines().count(),
        1 + 2 * 30
    );

    let stdout = vigraal(&["gen", "--problem", "gaussian", "--size", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&stdout.stdout).unwrap();
    assert_eq!(v["size"], 3);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    // Cournot has no global Lipschitz hint, so the fixed step cannot be chosen.
    let o = vigraal(&[
        "run",
        "--problem",
        "cournot",
        "--geometry",
        "euclidean",
        "--solver",
        "fixed",
        "--size",
        "3",
        "--iters",
        "5",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    // The entropy geometry does not fit a box.
    let o = vigraal(&[
        "run",
        "--problem",
        "cournot",
        "--geometry",
        "kl",
        "--solver",
        "adaptive",
        "--size",
        "3",
        "--iters",
        "5",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        vigraal(&["run", "--problem", "nonsense"]).status.code(),
        Some(2)
    );
}

#[test]
fn io_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = vigraal(&[
        "run",
        "--problem",
        "gaussian",
        "--geometry",
        "euclidean",
        "--solver",
        "adaptive",
        "--size",
        "3",
        "--iters",
        "5",
        "--out",
        path(&dir.path().join("missing/dir/x.csv")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = vigraal(&[
        "run",
        "--problem",
        "gaussian",
        "--geometry",
        "euclidean",
        "--solver",
        "adaptive",
        "--iters",
        "5",
        "--instance",
        path(&dir.path().join("absent.json")),
        "--out",
        path(&dir.path().join("x.csv")),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_passes() {
    let o = vigraal(&["check", "--cases", "100"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}

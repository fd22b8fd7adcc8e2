use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_stellar-zeros");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn parse_zeros(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .map(|l| {
            let mut it = l.split_whitespace().map(|x| x.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect()
}

#[test]
fn fock_two_zeros_are_plus_minus_inverse_sqrt2() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "f2.json", r#"{"rank":2,"core":[[0,0],[0,0],[1,0]],"alpha":[0,0],"chi":[0,0]}"#);
    let out = run(&["zeros", "--state", &state]);
    assert!(out.status.success());
    let mut z = parse_zeros(&stdout(&out));
    z.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(z.len(), 2);
    assert!((z[0].0 + FRAC_1_SQRT_2).abs() < 1e-15 && z[0].1.abs() < 1e-15);
    assert!((z[1].0 - FRAC_1_SQRT_2).abs() < 1e-15 && z[1].1.abs() < 1e-15);
}

#[test]
fn vacuum_trajectory_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "v.json", r#"{"rank":0,"core":[[1,0]],"alpha":[0,0],"chi":[0,0]}"#);
    let csv = dir.path().join("traj.csv");
    let out = run(&[
        "evolve",
        "--state",
        &state,
        "--hamiltonian",
        "0.5,0.5,0,0,0,0",
        "--time",
        "0,3,16",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(csv).unwrap(), "t,k,re,im,method\n");
}

#[test]
fn evolve_reports_both_methods() {
    let out = run(&["evolve", "--random", "2,4", "--time", "0,1,3", "--method", "both"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 3);
    assert_eq!(text.lines().filter(|l| l.ends_with(",ode")).count(), 6);
    assert_eq!(text.lines().filter(|l| l.ends_with(",closed")).count(), 6);
}

#[test]
fn rank_one_zero_at_i_crosses_twice() {
    let dir = tempfile::tempdir().unwrap();
    let form = write(
        dir.path(),
        "r1.json",
        r#"{"g2":[-0.5,0],"g1":[0,0],"g0":[0,0],"zeros":[[0,1]],"leading":[1,0]}"#,
    );
    let out = run(&["audit", "--state", &form]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("events=2"), "{}", stdout(&out));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let p = dir.path().join(name);
        let out = run(&[
            "evolve",
            "--random",
            "3,11",
            "--hamiltonian",
            "0.6,0.4,0.1,0.2,-0.1,0",
            "--time",
            "0,2,9",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        files.push(fs::read(p).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let again = |_: usize| stdout(&run(&["crossings", "--random", "2,5"]));
    assert_eq!(again(0), again(1));
}

#[test]
fn build_then_zeros_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let form = dir.path().join("form.json");
    let built = run(&["build", "--random", "4,21", "--out", form.to_str().unwrap()]);
    assert!(built.status.success());
    let direct = parse_zeros(&stdout(&run(&["zeros", "--random", "4,21"])));
    let reread = parse_zeros(&stdout(&run(&["zeros", "--state", form.to_str().unwrap()])));
    assert_eq!(direct.len(), 4);
    for (a, b) in direct.iter().zip(&reread) {
        assert!((a.0 - b.0).abs() <= 1e-12 && (a.1 - b.1).abs() <= 1e-12);
    }
}

#[test]
fn config_file_supplies_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", r#"{"random":[2,8],"time":[0,1,4],"method":"ode"}"#);
    let out = run(&["evolve", "--config", &cfg]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1 + 2 * 4);
    // the flag overrides the file's method
    let out = run(&["evolve", "--config", &cfg, "--method", "both"]);
    assert_eq!(stdout(&out).lines().count(), 1 + 2 * 2 * 4);
}

#[test]
fn verify_passes_on_a_mild_fixture() {
    let out = run(&["verify", "--random", "3,7", "--scale", "0.3", "--hamiltonian", "0.5,0.55,0.05,0.1,-0.2,0.3"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("verdict=ok"));
}

#[test]
fn verify_signals_violation_with_exit_2() {
    let out = run(&["verify", "--random", "2,7", "--scale", "0.3", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("verdict=violation"));
}

#[test]
fn input_errors_are_one_line_with_exit_1() {
    for args in [
        vec!["zeros", "--state", "/nonexistent/state.json"],
        vec!["zeros", "--bogus"],
        vec!["evolve", "--random", "2,1", "--time", "0,1,1"],
        vec!["zeros"],
        vec!["zeros", "--random", "2,1", "--hamiltonian", "1,2"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with("error: kind="), "{err}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn thread_count_comes_from_environment() {
    let out = Command::new(BIN)
        .args(["zeros", "--random", "1,1"])
        .env("STELLAR_ZEROS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(BIN)
        .args(["verify", "--random", "1,1", "--scale", "0.3"])
        .env("STELLAR_ZEROS_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}

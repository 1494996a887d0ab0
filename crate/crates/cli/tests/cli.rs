//! End-to-end checks of the command-line surface: generate/verify round
//! trips for every built-in construction, detection and simulation
//! plumbing, deterministic reports, and the bounds tables.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phasedet"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("phasedet-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn generate_verify_round_trips() {
    let dir = tempdir("roundtrip");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("lfsr.json", vec!["gen", "lfsr", "--poly", "0,1,2,4,5", "--k", "9"]),
        ("db.json", vec!["gen", "debruijn", "--order", "5"]),
        (
            "concat.json",
            vec!["gen", "concat", "--code", "rep:3", "--l", "4", "--tau", "3"],
        ),
        ("mm.json", vec!["gen", "mac-mod2", "--poly1", "0,1,3", "--poly2", "0,1,4", "--k", "7"]),
        ("ms.json", vec!["gen", "mac-split", "--preset", "mod2-u"]),
        ("ze.json", vec!["gen", "zero-error", "--r", "1"]),
    ];
    for (file, mut args) in cases {
        args.push("--out");
        args.push(file);
        let out = run_in(&dir, &args);
        assert!(out.status.success(), "gen {file}: {:?}", out);
        let verify = run_in(&dir, &["verify", file]);
        assert!(
            verify.status.success(),
            "verify {file}: {}",
            stdout(&verify)
        );
        assert!(stdout(&verify).contains("PASS"));
    }
}

#[test]
fn gen_reports_expected_parameters() {
    let dir = tempdir("params");
    let out = run_in(
        &dir,
        &["gen", "lfsr", "--poly", "0,1,2,4,5", "--k", "9", "--out", "s.json"],
    );
    assert!(stdout(&out).contains("n=31 k=9"));
    let out = run_in(&dir, &["gen", "debruijn", "--order", "5", "--out", "d.json"]);
    assert!(stdout(&out).contains("n=32"));
    let out = run_in(
        &dir,
        &["gen", "mac-mod2", "--poly1", "0,1,3", "--poly2", "0,1,4", "--k", "7", "--out", "m.json"],
    );
    assert!(stdout(&out).contains("n1=7 n2=15"));
}

#[test]
fn verify_reports_card_trick_distance() {
    let dir = tempdir("distance");
    run_in(
        &dir,
        &["gen", "lfsr", "--poly", "0,1,2,4,5", "--k", "9", "--out", "s.json"],
    );
    let out = run_in(&dir, &["verify", "s.json"]);
    assert!(stdout(&out).contains("min_distance=3 PASS"));
}

#[test]
fn verify_fails_on_corrupted_scheme() {
    let dir = tempdir("corrupt");
    run_in(
        &dir,
        &["gen", "lfsr", "--poly", "0,1,2,4,5", "--k", "9", "--out", "s.json"],
    );
    let path = dir.join("s.json");
    let mut file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // flip one symbol
    let sym = file["symbols"][4].as_u64().unwrap();
    file["symbols"][4] = serde_json::Value::from(1 - sym);
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let out = run_in(&dir, &["verify", "s.json"]);
    assert!(!out.status.success());
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn detect_round_trip_via_observation_string() {
    let dir = tempdir("detect");
    run_in(
        &dir,
        &["gen", "lfsr", "--poly", "0,1,2,4,5", "--k", "9", "--out", "s.json"],
    );
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("s.json")).unwrap()).unwrap();
    let symbols: Vec<u64> = file["symbols"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    // observation = clean window at phase 4
    let obs: String = (0..9).map(|i| symbols[(3 + i) % 31].to_string()).collect();
    let out = run_in(&dir, &["detect", "s.json", &obs]);
    assert_eq!(stdout(&out).trim(), "phase,4");
}

#[test]
fn simulate_noiseless_concat_has_zero_errors() {
    let dir = tempdir("sim0");
    run_in(
        &dir,
        &["gen", "concat", "--code", "rep:3", "--l", "4", "--tau", "3", "--out", "c.json"],
    );
    let out = run_in(
        &dir,
        &["simulate", "c.json", "bsc:0", "--trials", "300", "--format", "csv"],
    );
    let text = stdout(&out);
    let line = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = line.split(',').collect();
    assert_eq!(fields[3], "0", "errors: {line}");
}

#[test]
fn simulate_mod2_scheme_is_exact() {
    let dir = tempdir("simmod2");
    run_in(
        &dir,
        &["gen", "mac-mod2", "--poly1", "0,1,3", "--poly2", "0,1,4", "--k", "7", "--out", "m.json"],
    );
    let out = run_in(
        &dir,
        &["simulate", "m.json", "mod2", "--trials", "500", "--format", "csv"],
    );
    let line = stdout(&out).lines().nth(1).unwrap().to_string();
    assert_eq!(line.split(',').nth(3).unwrap(), "0", "errors: {line}");
}

#[test]
fn simulate_error_rate_improves_with_block_length() {
    let dir = tempdir("simrate");
    let mut rates = Vec::new();
    for (file, t) in [("c5.json", "5"), ("c15.json", "15")] {
        run_in(
            &dir,
            &[
                "gen", "concat", "--code", &format!("rep:{t}"), "--l", "8", "--tau", t, "--seed",
                "1", "--out", file,
            ],
        );
        let out = run_in(
            &dir,
            &[
                "simulate", file, "bsc:0.05", "--trials", "4000", "--seed", "9", "--format", "csv",
            ],
        );
        let text = stdout(&out);
        let line = text.lines().nth(1).unwrap();
        let rate: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        rates.push(rate);
    }
    assert!(
        rates[1] < rates[0],
        "error rate should drop with block length: {rates:?}"
    );
}

#[test]
fn simulate_reports_identical_for_identical_seeds() {
    let dir = tempdir("simdet");
    run_in(
        &dir,
        &["gen", "concat", "--code", "rep:3", "--l", "4", "--tau", "3", "--out", "c.json"],
    );
    let strip_wall = |text: &str| -> String {
        let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
        v.as_object_mut().unwrap().remove("wall_clock_secs");
        serde_json::to_string(&v).unwrap()
    };
    let args = ["simulate", "c.json", "bsc:0.1", "--trials", "400", "--seed", "7"];
    let a = strip_wall(&stdout(&run_in(&dir, &args)));
    let b = strip_wall(&stdout(&run_in(&dir, &args)));
    assert_eq!(a, b, "same seed must give byte-identical reports");
    let c = strip_wall(&stdout(&run_in(
        &dir,
        &["simulate", "c.json", "bsc:0.1", "--trials", "400", "--seed", "8"],
    )));
    assert_ne!(a, c, "different seeds should differ");
}

#[test]
fn bounds_tables() {
    let dir = tempdir("bounds");
    let out = stdout(&run_in(&dir, &["bounds", "thm4", "--r", "20", "--t", "5", "--c", "3"]));
    assert!(out.starts_with("param,value"));
    assert!(out.contains("min_k,42"));

    let out = stdout(&run_in(&dir, &["bounds", "gv", "--p", "0"]));
    assert!(out.contains("rate,1"));

    let out = stdout(&run_in(
        &dir,
        &["bounds", "newub", "--p", "0.05", "--R", "0.6927"],
    ));
    assert!(out.contains("violated,true"));

    let out = stdout(&run_in(&dir, &["bounds", "lll", "--k", "20", "--d", "0"]));
    assert!(out.contains("n_max,3276"));

    let out = stdout(&run_in(&dir, &["bounds", "capacity", "bsc:0.11"]));
    let cap: f64 = out
        .lines()
        .find(|l| l.starts_with("capacity,"))
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((cap - 0.500074).abs() < 1e-3);

    let out = stdout(&run_in(
        &dir,
        &["bounds", "mac-region", "ptt", "--r1", "0.5", "--r2", "0.5"],
    ));
    assert!(out.contains("contained,false"));
    let out = stdout(&run_in(
        &dir,
        &["bounds", "mac-region", "mod2", "--r1", "0.5", "--r2", "0.5"],
    ));
    assert!(out.contains("contained,true"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempdir("usage");
    let out = run_in(&dir, &["gen", "lfsr", "--poly", "101", "--k", "9"]);
    // z^2 + 1 is not primitive
    assert_eq!(out.status.code(), Some(1));
    let out = run_in(&dir, &["bounds", "gv", "--p", "0.7"]);
    assert_eq!(out.status.code(), Some(1));
}

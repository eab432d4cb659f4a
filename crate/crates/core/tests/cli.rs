use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn specsim(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_specsim"));
    for a in args {
        c.arg(a);
    }
    c.env_clear();
    c
}

fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    specsim(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

const FIVE_SYMBOL: &str = "label,prob\nz1,0.025\nz2,0.075\nz3,0.2\nz4,0.3\nz5,0.4\n";
const U2: &str = "label,prob\nu,0.5\nv,0.5\n";
const U4: &str = "label,prob\na,0.25\nb,0.25\nc,0.25\nd,0.25\n";

fn close(v: &Value, want: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() < 1e-12
}

#[test]
fn spectrum_dump_has_one_row_per_symbol() {
    let w = Work::new();
    let pmf = w.file("five_symbol.csv", FIVE_SYMBOL);
    let out = run(&[&"spectrum", &"--pmf", &pmf]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "delta_lo,delta_hi,c_value");
    assert_eq!(lines.len(), 6);
    let last: Vec<f64> = lines[5].split(',').map(|s| s.parse().unwrap()).collect();
    assert!((last[0] - 0.975).abs() < 1e-12 && last[1] == 1.0);
    assert!((last[2] - 40f64.ln()).abs() < 1e-12);
}

#[test]
fn point_mass_spectrum_is_zero() {
    let w = Work::new();
    let pmf = w.file("pt.json", r#"{"labels":["a"],"probs":[1.0]}"#);
    let out = run(&[&"spectrum", &"--pmf", &pmf, &"--format", &"json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["rows"], serde_json::json!([[0.0, 1.0, 0.0]]));
    assert_eq!(v["manifest"]["command"], "spectrum");
    let digest = &v["manifest"]["inputs"][pmf.display().to_string()];
    assert_eq!(digest.as_str().unwrap().len(), 64);
}

#[test]
fn malformed_probability_exits_with_parse_code() {
    let w = Work::new();
    let pmf = w.file("bad.csv", "label,prob\na,0.5\nb,zero point five\n");
    let out = run(&[&"spectrum", &"--pmf", &pmf]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains('3'));
}

#[test]
fn simulate_uniform_four_to_two() {
    let w = Work::new();
    let (coin, target) = (w.file("u4.csv", U4), w.file("u2.csv", U2));
    let map = w.path("map.csv");
    let out = run(&[
        &"simulate", &"--coin", &coin, &"--target", &target, &"--eps", &"0.3", &"--gamma", &"1.21",
        &"--out-map", &map,
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["d"], 0.0);
    assert_eq!(v["pass"], true);
    assert_eq!(std::fs::read_to_string(&map).unwrap().lines().count(), 5);
}

#[test]
fn simulate_rejects_gamma_below_threshold() {
    let w = Work::new();
    let (coin, target) = (w.file("u4.csv", U4), w.file("u2.csv", U2));
    let out = run(&[&"simulate", &"--coin", &coin, &"--target", &target, &"--eps", &"0.1", &"--gamma", &"0.5"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn sufficient_sweep_on_identical_sources() {
    let w = Work::new();
    let p = w.file("five_symbol.csv", FIVE_SYMBOL);
    let out = run(&[
        &"check", &"--coin", &p, &"--target", &p, &"--mode", &"sufficient", &"--gamma", &"-1,0,1", &"--format",
        &"json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let rows = v["sweep"].as_array().unwrap();
    let got: Vec<f64> = rows.iter().map(|r| r["measure"]["value"].as_f64().unwrap()).collect();
    assert_eq!(got, vec![0.0, 0.0, 1.0]);
}

#[test]
fn necessary_sweep_on_constant_gap() {
    let w = Work::new();
    let (coin, target) = (w.file("u2.csv", U2), w.file("u4.csv", U4));
    let out = run(&[
        &"check", &"--coin", &coin, &"--target", &target, &"--mode", &"necessary", &"--eps", &"0.25", &"--gamma",
        &"0.1", &"--format", &"json",
    ]);
    assert_eq!(code(&out), 0);
    let row = &json(&out)["sweep"][0];
    assert!(close(&row["sublevel_measure"], 0.75));
    assert!(close(&row["inf"], -2f64.ln()));
}

const INPUT: &str = "label,prob\na,0.5\nb,0.5\n";
const IDENTITY: &str = "x,y,prob\na,a,1\nb,b,1\n";

#[test]
fn identity_channel_has_zero_joint_distance() {
    let w = Work::new();
    let input = w.file("in.csv", INPUT);
    let chan = w.file("chan.csv", IDENTITY);
    let coupling = w.file("coin.csv", "x,z,prob\na,a,1\nb,b,1\n");
    let map = w.path("map.csv");
    let out = run(&[
        &"channel", &"--input", &input, &"--channel", &chan, &"--coupling", &coupling, &"--eps", &"0.5",
        &"--gamma", &"1", &"--out-map", &map,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["joint_distance"], 0.0);
    assert_eq!(v["pass"], true);
    assert!(std::fs::read_to_string(&map).unwrap().lines().count() >= 3);
}

#[test]
fn mismatched_channel_names_the_row() {
    let w = Work::new();
    let input = w.file("in.csv", "label,prob\na,0.5\nb,0.25\nc,0.25\n");
    let chan = w.file("chan.csv", IDENTITY);
    let coupling = w.file("coin.csv", "x,z,prob\na,a,1\nb,b,1\nc,c,1\n");
    let out = run(&[
        &"channel", &"--input", &input, &"--channel", &chan, &"--coupling", &coupling, &"--eps", &"0.5",
        &"--gamma", &"1",
    ]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains('c'));
}

fn example(w: &Work, body: &str) -> Output {
    let params = w.file("params.json", body);
    run(&[&"example", &"--params", &params])
}

#[test]
fn example_one_verdicts() {
    let w = Work::new();
    let base = r#""example":1,"n":2000,"q1":0.05,"p1":0.11,"q2":0.2,"p2":0.3"#;
    let out = example(&w, &format!(r#"{{{base},"alpha":0.2,"beta":0.4}}"#));
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["verdict"], "sufficient-condition trend");
    let out = example(&w, &format!(r#"{{{base},"alpha":0.4,"beta":0.2}}"#));
    assert_eq!(json(&out)["verdict"], "necessity violated");
}

#[test]
fn example_four_splits() {
    let w = Work::new();
    let out = example(&w, r#"{"example":4,"n":256}"#);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "necessity violated; independent-coupling surrogate non-negative");
    assert!(close(&v["quantity"], 4f64.ln() - 16f64.ln()));
}

#[test]
fn example_constraint_violation() {
    let w = Work::new();
    let out = example(&w, r#"{"example":1,"n":10,"q1":0.2,"p1":0.11,"q2":0.3,"p2":0.4,"alpha":0.1,"beta":0.2}"#);
    assert_eq!(code(&out), 5);
    assert!(!out.stderr.is_empty());
}

#[test]
fn oracle_subcommands_report_their_exact_values() {
    let w = Work::new();
    let (coin, target) = (w.file("five_symbol.csv", FIVE_SYMBOL), w.file("u2.csv", U2));
    let out = run(&[&"oracle", &"grid", &"--coin", &coin, &"--target", &target, &"--gamma", &"0.3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["oracle"], "grid_measure");
    assert!((v["value"].as_f64().unwrap() - 0.4).abs() <= 1e-5);

    let out = run(&[&"oracle", &"brute", &"--coin", &coin, &"--target", &target]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["value"].as_f64().unwrap() < 0.05 + 1e-12);

    let out = run(&[
        &"oracle", &"mc", &"--coin", &coin, &"--target", &target, &"--eps", &"0.3", &"--gamma", &"1.21",
        &"--samples", &"100000",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["abs_err"].as_f64().unwrap() < 0.02);
    assert_eq!(v["config"]["rng"], "ChaCha8Rng");
}

fn strip_clock(mut v: Value) -> Value {
    let m = v["manifest"].as_object_mut().unwrap();
    m.remove("started_unix_ms");
    m.remove("elapsed_ms");
    v
}

#[test]
fn reruns_match_apart_from_the_clock() {
    let w = Work::new();
    let (coin, target) = (w.file("five_symbol.csv", FIVE_SYMBOL), w.file("u2.csv", U2));
    let args: [&dyn AsRef<std::ffi::OsStr>; 13] = [
        &"oracle", &"mc", &"--coin", &coin, &"--target", &target, &"--eps", &"0.3", &"--gamma", &"1.21",
        &"--samples", &"20000", &"--seed=7",
    ];
    let a = strip_clock(json(&run(&args)));
    let b = strip_clock(json(&run(&args)));
    assert_eq!(a, b);
    assert_eq!(a["manifest"]["seed"], 7);
}

#[test]
fn flags_fall_back_to_environment() {
    let w = Work::new();
    let (coin, target) = (w.file("u4.csv", U4), w.file("u2.csv", U2));
    let report = w.path("report.json");
    let out = specsim(&[&"simulate", &"--eps", &"0.3"])
        .env("SPECSIM_COIN", &coin)
        .env("SPECSIM_TARGET", &target)
        .env("SPECSIM_GAMMA", "1.21")
        .env("SPECSIM_EPS", "0.01")
        .env("SPECSIM_OUT", &report)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    // the flag wins over the environment
    assert_eq!(v["eps"], 0.3);
    assert_eq!(v["manifest"]["command"], "simulate");
}

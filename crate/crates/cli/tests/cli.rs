use std::ffi::OsString;
use std::path::Path;
use std::process::Command as Process;

use serde_json::Value;

use ghz_cli::main_with;
use ghz_cli::run::sample_f;
use ghz_core::ghz::Arrangement;
use ghz_core::homodyne::{estimate_f, EfficiencyModel};
use ghz_core::TripletState;

struct Run {
    code: u8,
    stdout: String,
    stderr: String,
}

fn ghz(args: &[&str]) -> Run {
    let argv: Vec<OsString> = std::iter::once("ghz").chain(args.iter().copied()).map(Into::into).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(args: &[&str]) -> Value {
    let r = ghz(args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

/// Header and data rows, skipping `#` config lines.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rd.headers().unwrap().iter().map(String::from).collect();
    let rows = rd
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn discrete_maximal_is_four() {
    let v = json(&["discrete", "--c0", "0.70710678", "--arrangement", "eq14"]);
    let f = v["results"][0]["F"].as_f64().unwrap();
    assert!((f - 4.0).abs() < 1e-7, "{f}");
    assert_eq!(v["config"]["arrangement"], "eq14");
}

#[test]
fn lhv_bound() {
    for arr in ["eq14", "eq1", "triplet", "mermin"] {
        let v = json(&["lhv", "--arrangement", arr]);
        assert_eq!(v["results"][0]["F"], 2);
    }
}

#[test]
fn threshold_near_paper_value() {
    let v = json(&["threshold", "--c0", "0.70710678"]);
    let eta = v["results"][0]["eta_star"].as_f64().unwrap();
    assert!((eta - 0.995).abs() < 1e-3, "{eta}");
    assert_eq!(v["results"][0]["loss"], "detector-failure");

    let v = json(&["threshold", "--c0", "0.6"]);
    assert!(v["results"][0]["eta_star"].is_null());
}

#[test]
fn evolve_quarter_period() {
    let v = json(&["evolve", "--chi-t", "pi/4", "--dims", "4x4x4"]);
    let row = &v["results"][0];
    assert!((row["F"].as_f64().unwrap() - 4.0).abs() < 1e-10);
    assert!((row["p001"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(row["leakage"].as_f64().unwrap() < 1e-10);
    assert!(row["c1"].as_f64().unwrap() < 0.0);
}

#[test]
fn scan_layout() {
    let r = ghz(&["scan", "--c0", "0.2,0.5,0.8", "--format", "csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (header, rows) = csv_rows(&r.stdout);
    assert_eq!(
        header,
        ["c0", "c1", "term1", "term2", "term3", "term4", "F", "n_shots", "seed"]
    );
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let c0: f64 = row[0].parse().unwrap();
        let c1: f64 = row[1].parse().unwrap();
        let f: f64 = row[6].parse().unwrap();
        assert!((f - 8.0 * c0 * c1).abs() < 1e-12);
        // 17 significant digits.
        assert_eq!(row[6].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    }
}

#[test]
fn json_matches_csv() {
    for cmd in [
        &["scan", "--points", "5", "--measurement", "homodyne"][..],
        &["sample", "--n-shots", "5000", "--eta", "0.9"][..],
        &["threshold"][..],
        &["lhv"][..],
    ] {
        let mut a = cmd.to_vec();
        a.extend(["--format", "csv"]);
        let (header, rows) = csv_rows(&ghz(&a).stdout);
        let mut b = cmd.to_vec();
        b.extend(["--format", "json"]);
        let v = json(&b);
        let results = v["results"].as_array().unwrap();
        assert_eq!(results.len(), rows.len());
        for (obj, row) in results.iter().zip(&rows) {
            let keys: Vec<&String> = obj.as_object().unwrap().keys().collect();
            assert_eq!(keys, header.iter().collect::<Vec<_>>());
            for (k, cell) in header.iter().zip(row) {
                match &obj[k] {
                    Value::Number(n) => assert_eq!(n.as_f64().unwrap(), cell.parse::<f64>().unwrap(), "{k}"),
                    Value::String(s) => assert_eq!(s, cell),
                    Value::Null => assert_eq!(cell, ""),
                    other => panic!("unexpected {other}"),
                }
            }
        }
        // Config echo is identical apart from the format key.
        let cfg = v["config"].as_object().unwrap();
        let csv_text = ghz(&a).stdout;
        for line in csv_text.lines().filter(|l| l.starts_with("# ")) {
            let (k, val) = line[2..].split_once('=').unwrap();
            if k != "format" {
                assert_eq!(cfg[k], val, "{k}");
            }
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.csv");
    let p2 = dir.path().join("b.csv");
    for p in [&p1, &p2] {
        let r = ghz(&["sample", "--n-shots", "20000", "--seed", "5", "--format", "csv", "--output", p.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert!(r.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    let other = ghz(&["sample", "--n-shots", "20000", "--seed", "6", "--format", "csv"]);
    assert_ne!(other.stdout.as_bytes(), std::fs::read(&p1).unwrap());
}

#[test]
fn parallel_sampling_matches_core_estimator() {
    let t = TripletState::from_c0(0.6).unwrap();
    let arr = Arrangement::triplet();
    let m = EfficiencyModel::ideal();
    let n = 3 * ghz_core::homodyne::BLOCK_LEN + 17;
    let par = sample_f(&t, &arr, [0.0; 3], &m, n, 99).unwrap();
    let seq = estimate_f(&t, &arr, n, 99, &m).unwrap();
    assert_eq!(par, seq);
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.conf");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# scan setup\nc0 = 0.6\nformat=csv\nseed = 41\n");
    let r = ghz(&["discrete", "--config", &cfg]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("# c0=0.6\n"));
    assert!(r.stdout.contains("# seed=41\n"));

    // Command-line flags win, including over the other half of an exclusive pair.
    let v = json(&["discrete", "--config", &cfg, "--format", "json", "--state", "maximal"]);
    assert_eq!(v["config"]["state"], "maximal");
    assert_eq!(v["config"]["seed"], "41");
    assert!((v["results"][0]["F"].as_f64().unwrap() - 4.0).abs() < 1e-12);

    let bad = write_config(dir.path(), "command=lhv\n");
    assert_eq!(ghz(&["discrete", "--config", &bad]).code, 2);
    let unknown = write_config(dir.path(), "colour=blue\n");
    assert_eq!(ghz(&["discrete", "--config", &unknown]).code, 2);
}

#[test]
fn echoed_config_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["homodyne", "--c0", "0.8", "--psi0", "pi/8", "--eta", "0.97", "--loss", "detector-failure"][..],
        &["sample", "--state", "evolve:chi_t=0.7", "--n-shots", "9000", "--seed", "3"][..],
        &["discrete", "--s", "3", "--thetas", "0.1,0.2,-0.3"][..],
        &["scan", "--points", "4", "--c0-start", "0.5"][..],
        &["evolve", "--chi-t", "0.1,0.2", "--dims", "3x3x3"][..],
    ] {
        let first = json(args);
        let text: String = first["config"]
            .as_object()
            .unwrap()
            .iter()
            .map(|(k, v)| format!("{k}={}\n", v.as_str().unwrap()))
            .collect();
        let cfg = write_config(dir.path(), &text);
        let command = first["config"]["command"].as_str().unwrap();
        let again = ghz(&[command, "--config", &cfg]);
        assert_eq!(again.code, 0, "{}", again.stderr);
        assert_eq!(serde_json::from_str::<Value>(&again.stdout).unwrap(), first, "{args:?}");
    }
}

#[test]
fn binned_measurement_loses_violation() {
    let v = json(&["discrete", "--s", "3"]);
    assert!((v["results"][0]["F"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["config"]["binning"], "0,0,1,1");
    let v = json(&["discrete", "--s", "3", "--binning", "0,1,1,0"]);
    assert!(v["results"][0]["F"].as_f64().unwrap() < 4.0);
}

#[test]
fn errors_are_single_machine_lines() {
    for (args, code, kind) in [
        (&["discrete", "--psi0", "45deg"][..], 2, "config"),
        (&["discrete", "--thetas", "0,90°,0"][..], 2, "config"),
        (&["homodyne", "--eta", "0"][..], 2, "config"),
        (&["discrete", "--s", "2"][..], 2, "config"),
        (&["discrete", "--binning", "0,1,1"][..], 2, "config"),
        (&["scan", "--points", "0"][..], 2, "config"),
        (&["sample", "--n-shots", "0"][..], 2, "config"),
        (&["frobnicate"][..], 2, "config"),
        (&["lhv", "--output", "/nonexistent-dir/out.json"][..], 4, "io"),
        (&["lhv", "--config", "/nonexistent-dir/ghz.conf"][..], 4, "io"),
    ] {
        let r = ghz(args);
        assert_eq!(r.code, code, "{args:?}: {}", r.stderr);
        assert_eq!(r.stderr.lines().count(), 1, "{args:?}: {}", r.stderr);
        assert!(r.stderr.starts_with(&format!("error kind={kind} code={code} message=\"")), "{}", r.stderr);
        assert!(r.stdout.is_empty());
    }
}

#[test]
fn accuracy_failures_map_to_exit_three() {
    let e: ghz_cli::error::CliError = ghz_core::Error::Accuracy {
        estimate: 1e-6,
        tolerance: 1e-11,
    }
    .into();
    assert_eq!(e.kind.code(), 3);
    assert!(e.to_string().starts_with("error kind=numerical code=3"));
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_ghz");
    let ok = Process::new(exe).args(["lhv", "--format", "csv"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("form,strategy,term1"));
    let bad = Process::new(exe).args(["discrete", "--c0", "2"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let io = Process::new(exe).args(["lhv", "--output", "/nonexistent-dir/x"]).output().unwrap();
    assert_eq!(io.status.code(), Some(4));
    let help = Process::new(exe).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cdperc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdperc"))
        .args(args)
        .current_dir(dir)
        .env_remove("CDPERC_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn artifact(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("cdperc-out").join(name)).unwrap()).unwrap()
}

#[test]
fn oracle_prints_probability() {
    let dir = tempfile::tempdir().unwrap();
    let o = cdperc(dir.path(), &["oracle", "--graph", "path2", "--kappa", "1", "--t", "0.5", "--event", "edge:0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.375\n");
    let a = artifact(dir.path(), "oracle.json");
    assert_eq!(a["format_version"], 1);
    assert_eq!(a["result"]["probability"], 0.375);
    assert_eq!(a["config"]["oracle"]["kappa"], 1);
}

#[test]
fn sweep_exits_zero_with_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = cdperc(dir.path(), &["bounds", "verify-theorem1", "--kappa", "10", "--d-max", "4000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let a = artifact(dir.path(), "bounds-verify-theorem1.json");
    assert_eq!(a["result"]["all_pass"], true);
    assert_eq!(a["result"]["rows"].as_array().unwrap().len(), 3995);
    let csv = fs::read_to_string(dir.path().join("cdperc-out/bounds-verify-theorem1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3996);
}

#[test]
fn curve_starts_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = cdperc(dir.path(), &["curve", "emit", "--b-min", "0.5", "--b-max", "1.0", "--step", "0.005"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("cdperc-out/curve-emit.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("b,sc_upper,hammersley_s,region"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.5);
    assert_eq!(first[1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(csv.lines().count(), 102);
}

#[test]
fn failed_verification_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = cdperc(dir.path(), &["--no-artifacts", "bounds", "theorem3", "--t", "0.62", "--p", "0.53"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
    assert!(!dir.path().join("cdperc-out").exists());
    let o = cdperc(dir.path(), &["--no-artifacts", "bounds", "chen", "--c", "1.7", "--floor", "100"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["oracle", "--graph", "path2", "--kappa", "1", "--t", "0.5"],
        &["oracle", "--graph", "path2", "--kappa", "1", "--t", "0.5", "--event", "vertex:1"],
        &["oracle", "--graph", "nope", "--kappa", "1", "--t", "0.5", "--event", "edge:0"],
        &["bounds", "verify-theorem1", "--kappa", "9"],
        &["curve", "classify", "--s", "1.5", "--b", "0.6"],
        &["explore", "planar", "--kappa", "3"],
        &["explore", "check-trace", "missing.txt"],
        &["--threads", "0", "curve", "crossover"],
        &["--config", "missing.cfg", "curve", "crossover"],
    ] {
        let o = cdperc(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = cdperc(dir.path(), &["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.cfg"), "# theta run\nkappa = 2\nt = 0.5\nsamples = 50\nradius = 3\nseed = 9\n").unwrap();
    let o = cdperc(dir.path(), &["--config", "run.cfg", "simulate", "theta", "--samples", "80"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let a = artifact(dir.path(), "simulate-theta.json");
    assert_eq!(a["config"]["simulate"]["theta"]["samples"], 80);
    assert_eq!(a["config"]["simulate"]["theta"]["kappa"], 2);
    assert_eq!(a["result"][0]["seed"], 9);
}

#[test]
fn out_dir_from_environment_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cdperc"))
        .args(["curve", "crossover"])
        .current_dir(dir.path())
        .env("CDPERC_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("from-env/curve-crossover.json").exists());
    let o = cdperc(dir.path(), &["curve", "crossover", "--out-dir", "from-flag"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("from-flag/curve-crossover.json").exists());
}

#[test]
fn replay_reproduces_seeded_runs_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["simulate", "mixed", "--s", "0.9", "--b", "0.6", "--n", "4,8", "--samples", "300", "--seed", "5"],
        &["explore", "general", "--runs", "6", "--max-open", "200"],
        &["bounds", "table"],
        &["simulate", "russo", "--samples", "2000"],
    ];
    for args in runs {
        let o = cdperc(dir.path(), args);
        assert!(o.status.code() == Some(0) || o.status.code() == Some(1), "{args:?}");
        let name = if args[0] == "oracle" { args[0].to_string() } else { format!("{}-{}", args[0], args[1]) };
        let path = format!("cdperc-out/{name}.json");
        for threads in ["1", "3"] {
            let o = cdperc(dir.path(), &["--threads", threads, "report", "--replay", &path]);
            assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        }
    }
    let path = dir.path().join("cdperc-out/simulate-mixed.json");
    let mut a: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    a["result"][0]["hits"] = Value::from(0);
    fs::write(&path, a.to_string()).unwrap();
    let o = cdperc(dir.path(), &["report", "--replay", "cdperc-out/simulate-mixed.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn planar_trace_and_tally_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = cdperc(
        dir.path(),
        &["explore", "planar", "--runs", "10", "--max-open", "300", "--trace-out", "t.txt", "--tally-out", "tally.csv"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 replay violations"));
    let o = cdperc(dir.path(), &["explore", "check-trace", "t.txt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok:"));

    let o = cdperc(dir.path(), &["dominance", "--tally", "tally.csv", "--mode", "planar"]);
    assert_eq!(o.status.code(), Some(0));
    let a = artifact(dir.path(), "dominance.json");
    assert_eq!(a["result"]["rows"].as_array().unwrap().len(), 6);

    // An inconclusive verdict is not a failure.
    let o = cdperc(dir.path(), &["dominance", "--tally", "tally.csv", "--mode", "planar", "--p", "0.99"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("INCONCLUSIVE"));

    let text = fs::read_to_string(dir.path().join("t.txt")).unwrap();
    let tampered: String = text.replacen("\topen\t", "\tclosed-isolated\t", 1);
    fs::write(dir.path().join("bad.txt"), tampered).unwrap();
    let o = cdperc(dir.path(), &["explore", "check-trace", "bad.txt"]);
    assert_ne!(o.status.code(), Some(0));
}

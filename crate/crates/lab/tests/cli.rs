use std::path::Path;
use std::process::{Command, Output};

use tmslab::output::read_record;

fn tmslab(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tmslab"));
    cmd.args(args).env_remove("TMS_LAB_OUT").env_remove("TMS_LAB_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn only_record(out: &Path) -> tmslab::ResultRecord {
    let dirs: Vec<_> = std::fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_dir()).collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    read_record(&dirs[0].join("record.json")).unwrap()
}

#[test]
fn twobody_near_unit_bound_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tmslab(&["twobody", "--alpha", "-0.0795775", "--lambda", "1", "--out", out], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = only_record(dir.path());
    let e = rec.scalars["bound_state"].unwrap();
    assert!((e + 1.0).abs() < 1e-5, "{e}");
    assert_eq!(rec.checks["tms_residual"].value, Some(0.0));
    let d = dir.path().join(&rec.experiment_id);
    for f in ["record.json", "series_shell_asymptotics.csv", "plot_shell_asymptotics.svg"] {
        assert!(d.join(f).is_file(), "{f}");
    }
    let csv = std::fs::read_to_string(d.join("series_shell_asymptotics.csv")).unwrap();
    assert!(csv.starts_with("R,shell,remainder,R_times_remainder\n"));
}

#[test]
fn empty_config_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "").unwrap();
    let o = tmslab(&["kvb", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot parse config"));
}

#[test]
fn unknown_config_key_and_mismatched_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "command = \"kvb\"\n[grid]\nnodes = 3\n").unwrap();
    let o = tmslab(&["kvb", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, "command = \"kvb\"\n").unwrap();
    let o = tmslab(&["twobody", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_values_and_tolerance_names() {
    let o = tmslab(&["twobody", "--lambda", "-1"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = tmslab(&["twobody", "--tol-no-such-check", "1e-3"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = tmslab(&["twobody", "--tol-round-trip", "abc"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_check_sets_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    // The fitted exponent is about 3e-4 away from -1.
    let o = tmslab(&["twobody", "--tol-decay-exponent=1e-12", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stdout));
    let rec = only_record(dir.path());
    assert!(!rec.checks["decay_exponent"].passed);
    assert!(rec.checks["round_trip"].passed);
    let o = tmslab(&["twobody", "--tol-decay-exponent=-1"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_env_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let from_env = dir.path().join("env");
    let from_flag = dir.path().join("flag");
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "command = \"twobody\"\n[physics]\nalpha = -0.5\n[output]\ndir = \"never\"\nthreads = 2\n").unwrap();
    let env = [("TMS_LAB_OUT", from_env.to_str().unwrap()), ("TMS_LAB_THREADS", "3")];
    let o = tmslab(&["twobody", "--config", cfg.to_str().unwrap(), "--lambda", "2"], &env);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = only_record(&from_env);
    assert_eq!(rec.input["alpha"], -0.5);
    assert_eq!(rec.input["lambda"], 2.0);
    let o = tmslab(&["twobody", "--config", cfg.to_str().unwrap(), "--out", from_flag.to_str().unwrap()], &env);
    assert!(o.status.success());
    assert!(from_flag.is_dir());
}

#[test]
fn report_aggregates_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(tmslab(&["twobody", "--out", out], &[]).status.success());
    assert!(tmslab(&["kvb", "--out", out], &[]).status.success());
    let o = tmslab(&["report", "--out", out], &[]);
    assert!(o.status.success());
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().count(), 4, "{table}");
    assert!(table.contains("| kvb |") && table.contains("| twobody |"));
    assert_eq!(std::fs::read_to_string(dir.path().join("summary.md")).unwrap(), table);
}

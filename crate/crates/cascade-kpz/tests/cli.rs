//! End-to-end tests of the `cascade-kpz` binary: exit-code contract,
//! artifact formats, flag/file/env handling.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cascade-kpz")
}

fn tmp(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cascade-kpz-cli-{tag}"));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn help_and_version() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    let help = String::from_utf8(o.stdout).unwrap();
    for needle in [
        "validate",
        "mass-stats",
        "dimension",
        "energy",
        "kpz",
        "bound-check",
        "replay",
        "--master-seed",
        "CASCADE_KPZ_THREADS",
    ] {
        assert!(help.contains(needle), "usage text missing `{needle}`");
    }
    let o = run(&["--version"]);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().contains("hash v1"));
}

#[test]
fn validate_pass_and_fail_exit_codes() {
    let out = tmp("validate-ok");
    let o = run(&[
        "validate",
        "--d",
        "2",
        "--weight",
        "lognormal(sigma2=0.5)",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));

    let out = tmp("validate-bad");
    let o = run(&[
        "validate",
        "--d",
        "1",
        "--weight",
        "lognormal(sigma2=4)",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "degenerate model must exit 2");
    let r = report(&out);
    assert_eq!(r["report"]["nondegenerate"], serde_json::json!(false));
    assert_eq!(r["report"]["mean_ok"], serde_json::json!(true));
}

#[test]
fn parse_errors_exit_one_with_field() {
    let o = run(&["kpz", "--weight", "lognormal(sigma2=0.5)"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("set"), "error should name the field: {err}");

    let o = run(&["validate", "--weight", "gamma(k=2)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("weight"));
}

#[test]
fn kpz_small_run_passes_and_writes_artifacts() {
    let out = tmp("kpz");
    let o = run(&[
        "kpz",
        "--d",
        "2",
        "--weight",
        "lognormal(sigma2=0.5)",
        "--set",
        "cantor(keep=[0,3])",
        "--n-max",
        "9",
        "--seeds",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("zeta0=0.50000"), "summary line: {stdout}");
    assert!(stdout.contains("PASS(0.05)"));

    let r = report(&out);
    assert_eq!(r["report"]["zeta0"], serde_json::json!(0.5));
    assert!(r["report"]["zeta_predicted"].as_f64().unwrap() > 0.4);
    assert_eq!(r["report"]["provenance"]["hash_version"], "v1");
    for name in ["provenance.json", "partition.csv"] {
        assert!(out.join(name).exists(), "missing {name}");
    }
    // partition.csv: comments, header, cascade rows with seeds
    let csv = fs::read_to_string(out.join("partition.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# config: command = kpz"));
    assert!(lines.next().unwrap().starts_with("# master_seed: 42"));
    assert_eq!(lines.next().unwrap(), "set,measure,seed,n,s,log2_Z");
    assert!(csv.contains("cascade(lognormal(sigma2=0.5),tail=mean_one)"));
}

#[test]
fn mass_stats_small_run() {
    let out = tmp("mass-stats");
    let o = run(&[
        "mass-stats",
        "--d",
        "1",
        "--weight",
        "twopoint(a=0.5,b=1.5,p=0.5)",
        "--depth",
        "10",
        "--seeds",
        "800",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let r = report(&out);
    let mean = r["report"]["mean"].as_f64().unwrap();
    assert!((mean - 1.0).abs() < 0.15, "mean {mean}");
    assert!(out.join("mass.csv").exists());
}

#[test]
fn energy_run_writes_profiles() {
    let out = tmp("energy");
    let o = run(&[
        "energy",
        "--d",
        "2",
        "--set",
        "cantor(keep=[0,3])",
        "--s-grid",
        "0.3,0.7",
        "--n-min",
        "6",
        "--n-max",
        "9",
        "--points",
        "300",
        "--seeds",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("energy.csv")).unwrap();
    assert!(csv.contains("set,measure,seed,s,depth,energy"));
    assert!(csv.contains("cantor(keep=[0,3]),lebesgue,"));
    let r = report(&out);
    let profiles = r["report"]["profiles"].as_array().unwrap();
    assert_eq!(profiles.len(), 2);
    assert_eq!(profiles[0]["growth"], "Bounded");
    assert_eq!(profiles[1]["growth"], "Diverging");
}

#[test]
fn bound_check_run() {
    let out = tmp("bound");
    let o = run(&[
        "bound-check",
        "--d",
        "2",
        "--weight",
        "lognormal(sigma2=0.5)",
        "--depth",
        "5",
        "--s-grid",
        "0:1:0.25",
        "--seeds",
        "2000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let r = report(&out);
    let checks = r["report"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    assert!(checks.iter().all(|c| c["pass"] == serde_json::json!(true)));
}

#[test]
fn dimension_run_gates_on_analytic_value() {
    let out = tmp("dimension-gate");
    let o = run(&[
        "dimension",
        "--d",
        "2",
        "--set",
        "slice(axis=2,coord=0.25)",
        "--n-max",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["report"]["pass"], serde_json::json!(true));
    let zeta = r["report"]["estimate"]["zeta_hat"].as_f64().unwrap();
    assert!((zeta - 0.5).abs() < 1e-9);
}

#[test]
fn env_var_thread_budget_is_execution_only() {
    let out1 = tmp("env-threads-a");
    let o = Command::new(bin())
        .args([
            "dimension",
            "--d",
            "2",
            "--set",
            "cantor(keep=[0,3])",
            "--n-max",
            "9",
            "--out",
            out1.to_str().unwrap(),
        ])
        .env("CASCADE_KPZ_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));

    let out2 = tmp("env-threads-b");
    let o = Command::new(bin())
        .args([
            "dimension",
            "--d",
            "2",
            "--set",
            "cantor(keep=[0,3])",
            "--n-max",
            "9",
            "--out",
            out2.to_str().unwrap(),
        ])
        .env("CASCADE_KPZ_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));

    // identical artifacts modulo the differing out path in the config echo
    let norm = |p: &PathBuf, name: &str| {
        fs::read_to_string(p.join(name))
            .unwrap()
            .replace(p.to_str().unwrap(), "OUT")
    };
    for name in ["report.json", "partition.csv", "provenance.json"] {
        assert_eq!(norm(&out1, name), norm(&out2, name), "{name} differs");
    }
}

#[test]
fn replay_with_out_override() {
    let out = tmp("replay-src");
    let o = run(&[
        "validate",
        "--d",
        "3",
        "--weight",
        "lognormal(sigma2=0.5)",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out2 = tmp("replay-dst");
    let o = run(&[
        "replay",
        out.join("provenance.json").to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let a = report(&out);
    let b = report(&out2);
    assert_eq!(a["report"], b["report"]);
}

#[test]
fn extended_tail_runs_and_replays() {
    let out = tmp("tail-ext");
    let o = run(&[
        "kpz",
        "--d",
        "2",
        "--weight",
        "lognormal(sigma2=0.5)",
        "--set",
        "cantor(keep=[0,3])",
        "--n-max",
        "8",
        "--seeds",
        "2",
        "--tail",
        "extended(1)",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let snapshot = fs::read(out.join("report.json")).unwrap();
    let r = run(&["replay", out.join("provenance.json").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(snapshot, fs::read(out.join("report.json")).unwrap());
    let prov = fs::read_to_string(out.join("provenance.json")).unwrap();
    assert!(prov.contains("extended(1)"));
}

#[test]
fn config_file_drives_a_run() {
    let out = tmp("config-file");
    fs::create_dir_all(&out).unwrap();
    let conf = out.join("exp.conf");
    fs::write(
        &conf,
        format!(
            "# experiment\nd = 2\nweight = lognormal(sigma2=0.5)\nset = cantor(keep=[0,3])\n\
             n-max = 8\nseeds = 2\nout = {}\n",
            out.join("artifacts").display()
        ),
    )
    .unwrap();
    let o = run(&["kpz", "--config", conf.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(out.join("artifacts/report.json").exists());
}

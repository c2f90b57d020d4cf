use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use decouple_core::pulses::Family;
use decouple_core::sequencer::json::from_json;
use decouple_core::sequencer::{compile_iswap, BlockKind};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_decouple"));
    c.env_remove("DECOUPLE_SEED_OVERRIDE");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write_cfg(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn bundled(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name].iter().collect()
}

#[test]
fn run_writes_csv_with_frozen_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t1.csv");
    let o = run(&["run", "--config", s(&bundled("table1.cfg")), "--out", s(&out), "--jobs", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "experiment,n_qubits,t_p,shape,sigma,run_index,fidelity,wall_time_ms");
    assert_eq!(lines.len(), 6);
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&first[..2], &["iswap", "4"]);
    let f: f64 = first[6].parse().unwrap();
    assert!((f - 0.9922).abs() < 0.003, "{f}");
}

#[test]
fn json_output_and_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "c.cfg", "experiment = cns\nn_qubits = 2\nt_p = pi/32\n");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (out, jobs) in [(&a, "1"), (&b, "2")] {
        let o = run(&["run", "--config", s(&cfg), "--out", s(out), "--format", "json", "--jobs", jobs, "--no-timing"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v[0]["experiment"], "cns");
    assert!(v[0]["sigma"].is_null());
    assert_eq!(v[0]["wall_time_ms"], 0);
    assert!(v[0]["fidelity"].as_f64().unwrap() > 0.99);
}

#[test]
fn parse_errors_exit_one_with_locations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "bad.cfg", "experiment = iswap\nn_qubits = 4\nt_p = pi/8\ncolour = red\n");
    let o = run(&["run", "--config", s(&cfg), "--out", s(&dir.path().join("x.csv"))]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("pi/(16g)"), "{err}");
    assert!(err.contains("line 4") && err.contains("colour"), "{err}");
    assert!(!dir.path().join("x.csv").exists());

    let o = run(&["run", "--config", "/nonexistent/x.cfg", "--out", "x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["run", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "big.cfg", "experiment = iswap\nn_qubits = 2\nt_p = pi/16\ndetuning = 1e300, 0\n");
    let o = run(&["run", "--config", s(&cfg), "--out", s(&dir.path().join("x.csv"))]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_passes_and_injected_scheme_fails() {
    let o = run(&["verify"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 12);
    assert!(text.contains("chain selectivity n=9"));
    assert!(!text.contains("FAIL"));

    let o = run(&["verify", "--n-max", "4", "--inject-wrong-scheme"]);
    assert_eq!(o.status.code(), Some(3));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("FAIL chain selectivity n=3"));
    assert!(text.contains("surviving"));

    let o = run(&["verify", "--n-max", "3", "--pulse-errors"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("n=3 keep (0,1)"));
}

#[test]
fn export_schedule_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "n2.cfg", "experiment = iswap\nn_qubits = 2\nt_p = pi/16\n");
    let out = dir.path().join("iswap.json");
    let o = run(&["export-schedule", "--config", s(&cfg), "--gate", "iswap", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["segments"].as_array().unwrap().len(), 16);
    for key in ["qubit", "start", "duration", "family", "area", "axis_phase"] {
        assert!(v["segments"][0].get(key).is_some(), "{key}");
    }
    let back = from_json(&text).unwrap();
    let direct = compile_iswap(2, (0, 1), PI / 16.0, Family::Gaussian).unwrap();
    assert_eq!(back.total_duration, direct.total_duration);
    assert_eq!(back.segments.len(), direct.segments.len());

    let cfg3 = write_cfg(dir.path(), "n3.cfg", "experiment = single_gate\nn_qubits = 3\nt_p = pi/32\n");
    let o = run(&["export-schedule", "--config", s(&cfg3), "--gate", "rx(pi/2)", "--out", s(&out)]);
    assert!(o.status.success());
    let dcg = from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(dcg.segments_on(1).count(), 12);
    assert_eq!(dcg.total_duration, 16.0 * PI / 32.0);

    let o = run(&["export-schedule", "--config", s(&cfg3), "--gate", "cns", "--out", s(&out)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let d = v["total_duration"].as_f64().unwrap();
    assert!((d - (PI / 2.0 + 112.0 * PI / 32.0)).abs() < 1e-12, "{d}");

    let o = run(&["export-schedule", "--config", s(&cfg3), "--gate", "rz(pi)", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exported_ghz_has_all_cns_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "g.cfg", "experiment = ghz\nn_qubits = 5\nt_p = pi/32\n");
    let out = dir.path().join("ghz.json");
    assert!(run(&["export-schedule", "--config", s(&cfg), "--gate", "ghz", "--out", s(&out)]).status.success());
    let schedule = from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    schedule.validate().unwrap();
    let direct = decouple_core::sequencer::compile_ghz(5, PI / 32.0, Family::Gaussian).unwrap();
    assert_eq!(direct.blocks_of(BlockKind::Cns).count(), 4);
    assert_eq!(schedule.segments.len(), direct.segments.len());
}

#[test]
fn seed_override_controls_disorder() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "d.cfg",
        "experiment = ghz_disorder\nn_qubits = 2\nt_p = pi/16\nsigma = 1.0\nruns = 4\nseed = 1\nemit_runs = true\n",
    );
    let go = |seed: Option<&str>, name: &str| {
        let out = dir.path().join(name);
        let mut c = bin();
        c.args(["run", "--config", s(&cfg), "--out", s(&out), "--no-timing"]);
        if let Some(v) = seed {
            c.env("DECOUPLE_SEED_OVERRIDE", v);
        }
        let o = c.output().unwrap();
        (o.status.code(), fs::read_to_string(&out).unwrap_or_default())
    };
    let (code, base) = go(None, "a.csv");
    assert_eq!(code, Some(0));
    assert_eq!(base.lines().count(), 1 + 4 + 1);
    assert!(base.lines().nth(1).unwrap().starts_with("ghz_disorder,2,"));
    assert_eq!(go(Some("1"), "b.csv").1, base);
    let other = go(Some("77"), "c.csv").1;
    assert_ne!(other, base);
    assert_eq!(go(Some("77"), "d.csv").1, other);
    assert_eq!(go(Some("not-a-seed"), "e.csv").0, Some(1));
}

#[test]
fn plot_emits_gnuplot_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "d.cfg",
        "experiment = ghz_disorder\nn_qubits = 2\nt_p = pi/16, pi/32\nsigma = 0, 0.5\nruns = 2\n",
    );
    let csv = dir.path().join("r.csv");
    assert!(run(&["run", "--config", s(&cfg), "--out", s(&csv)]).status.success());
    let dat = dir.path().join("fig.dat");
    let gp = dir.path().join("fig.gp");
    let o = run(&["plot", "--input", s(&csv), "--out", s(&dat), "--script", s(&gp)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let data = fs::read_to_string(&dat).unwrap();
    assert_eq!(data.matches("# n_qubits=2").count(), 2);
    assert!(data.contains("t_p=pi/32"));
    assert!(fs::read_to_string(&gp).unwrap().contains("index 1"));

    let t1 = dir.path().join("t1.csv");
    let cfg1 = write_cfg(dir.path(), "i.cfg", "experiment = iswap\nn_qubits = 2\nt_p = pi/16\n");
    assert!(run(&["run", "--config", s(&cfg1), "--out", s(&t1)]).status.success());
    assert_eq!(run(&["plot", "--input", s(&t1), "--out", s(&dat)]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["run", "verify", "export-schedule", "plot"] {
        assert!(text.contains(sub), "{sub}");
    }
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}

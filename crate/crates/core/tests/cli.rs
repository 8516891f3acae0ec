use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use v2v_fso::cli::{DISPLACEMENT_HEADER, SWEEP_HEADER, TIMESERIES_HEADER};
use v2v_fso::config::{PerturbationSpec, ScenarioConfig};
use v2v_fso::dynamics::{ar_generate, ArModel, TraceAxis};

fn bin(args: &[&str], extra: &[&Path]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_v2v-fso"));
    cmd.args(args);
    for p in extra {
        cmd.arg(p);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, cfg: &ScenarioConfig) -> PathBuf {
    let path = dir.join("scenario.json");
    std::fs::write(&path, cfg.to_canonical_json()).unwrap();
    path
}

fn short() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.duration_s = 5.0;
    cfg.timestep_s = 0.01;
    cfg
}

fn run_in(dir: &Path, command: &str, cfg: &ScenarioConfig, out: &str) -> Output {
    let path = write_config(dir, cfg);
    let out = dir.join(out);
    bin(&[command, "--config"], &[&path, Path::new("--out"), &out])
}

#[test]
fn sweep_writes_full_grid_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "sweep", &short(), "a");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("a/sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    assert_eq!(lines.len(), 121);
    assert!(lines[1].starts_with("none,0.001,5.0,"));
    assert!(lines[120].starts_with("dynamic,0.01,100.0,"));

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "sweep");
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["outputs"][0], "sweep.csv");

    let again = run_in(dir.path(), "sweep", &short(), "b");
    assert!(again.status.success());
    assert_eq!(
        std::fs::read(dir.path().join("a/sweep.csv")).unwrap(),
        std::fs::read(dir.path().join("b/sweep.csv")).unwrap()
    );
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &short());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(bin(
        &["sweep", "--seed", "9", "--config"],
        &[&cfg, Path::new("--out"), &a]
    )
    .status
    .success());
    assert!(bin(&["sweep", "--config"], &[&cfg, Path::new("--out"), &b])
        .status
        .success());
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 9);
    assert_ne!(
        std::fs::read(a.join("sweep.csv")).unwrap(),
        std::fs::read(b.join("sweep.csv")).unwrap()
    );
}

#[test]
fn signaling_period_below_timestep_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = short();
    cfg.timestep_s = 0.05;
    let o = run_in(dir.path(), "sweep", &cfg, "out");
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("delta_t_s"), "{err}");
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"z_lst_m": [1.0]}"#).unwrap();
    let o = bin(&["sweep", "--config"], &[&path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("z_lst_m"));
}

#[test]
fn missing_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["sweep", "--config"], &[&dir.path().join("absent.json")]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = run_in(dir.path(), "displacement", &short(), "file/sub");
    assert_eq!(o.status.code(), Some(3));
    assert!(blocker.is_file());
}

#[test]
fn displacement_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = short();
    cfg.z_list_m = vec![5.0, 50.0];
    cfg.delta_grid_m = vec![0.0, 0.01, 0.05];
    let o = run_in(dir.path(), "displacement", &cfg, "out");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/displacement.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], DISPLACEMENT_HEADER);
    assert_eq!(lines.len(), 1 + 2 * 2 * 3);
    assert!(lines[1].starts_with("0.001,5.0,0.0,"));
}

#[test]
fn empty_displacement_grid_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = short();
    cfg.delta_grid_m.clear();
    let o = run_in(dir.path(), "displacement", &cfg, "out");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn timeseries_of_a_still_platoon_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::default();
    cfg.duration_s = 1.0;
    for v in [&mut cfg.vehicle1, &mut cfg.vehicle2] {
        v.ar_model_y = PerturbationSpec::Zero;
    }
    let o = run_in(dir.path(), "timeseries", &cfg, "out");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/timeseries.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], TIMESERIES_HEADER);
    assert_eq!(lines.len(), 1001);
    assert!(lines[1].starts_with("0.0,50.0,0.01,"));
    let rate = |l: &str| l.rsplit(',').next().unwrap().to_string();
    assert!(lines[1..].iter().all(|l| rate(l) == rate(lines[1])));
    let r: f64 = rate(lines[1]).parse().unwrap();
    assert!((4.0e9..4.1e9).contains(&r), "{r}");
}

#[test]
fn fit_ar_recovers_a_generated_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = ArModel::new(vec![0.6, -0.3], 2e-3, 100.0).unwrap();
    let trace = ar_generate(&model, 50_000, 5).unwrap();
    let path = dir.path().join("dy.csv");
    std::fs::write(&path, trace.to_csv(TraceAxis::Vertical)).unwrap();
    let out = dir.path().join("fit");
    let o = bin(
        &["fit-ar", "--order", "2", "--trace"],
        &[&path, Path::new("--out"), &out],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fitted: ArModel =
        serde_json::from_str(&std::fs::read_to_string(out.join("ar_model.json")).unwrap()).unwrap();
    assert_eq!(fitted.order(), 2);
    assert!((fitted.coefficients()[0] - 0.6).abs() < 0.03);
    assert!((fitted.coefficients()[1] + 0.3).abs() < 0.03);
    assert!((fitted.noise_std() / 2e-3 - 1.0).abs() < 0.03);
}

#[test]
fn fit_ar_defaults_to_the_bundled_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["fit-ar", "--out"], &[dir.path()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fitted: ArModel =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ar_model.json")).unwrap())
            .unwrap();
    assert_eq!(fitted.order(), 10);
}

#[test]
fn fit_ar_rejects_a_constant_trace_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..500)
        .map(|i| format!("{:?},0.01\n", i as f64 * 0.01))
        .collect();
    let path = dir.path().join("flat.csv");
    std::fs::write(&path, format!("time_s,dy_m\n{rows}")).unwrap();
    let o = bin(
        &["fit-ar", "--order", "2", "--trace"],
        &[&path, Path::new("--out"), dir.path()],
    );
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn fit_ar_rejects_malformed_and_short_traces_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "time_s,dy_m\n0.0,0.1\n0.01,abc\n").unwrap();
    let o = bin(
        &["fit-ar", "--trace"],
        &[&bad, Path::new("--out"), dir.path()],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let short = dir.path().join("short.csv");
    std::fs::write(&short, "time_s,dy_m\n0.0,0.1\n0.01,0.2\n0.02,0.1\n").unwrap();
    let o = bin(
        &["fit-ar", "--trace"],
        &[&short, Path::new("--out"), dir.path()],
    );
    assert_eq!(o.status.code(), Some(2));
}

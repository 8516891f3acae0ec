//! Command-line front end. Every command writes plain CSV (comma
//! separated, `\n` line endings, shortest round-trip number formatting)
//! plus a `manifest.json` describing the run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::dynamics::{ar_fit, reference_trace, PerturbationTrace, DEFAULT_AR_ORDER};
use crate::error::{Error, Result};
use crate::sim::{displacement_sweep, run_scenario, sweep, LinkSample};

pub const SWEEP_HEADER: &str = "strategy,p0_w,z_m,mean_r_bps,p5_r_bps,p95_r_bps,mean_pr_w";
pub const DISPLACEMENT_HEADER: &str = "p0_w,z_m,delta_m,r_bps";
pub const TIMESERIES_HEADER: &str =
    "t_s,z_m,p0_w,dx_m,dy_m,beta_x_rad,beta_y_rad,p_r_w,snr,r_bit_per_s";

#[derive(Debug, Parser)]
#[command(name = "v2v-fso", version, about = "Laser V2V link simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Throughput over distance, power and compensation strategy.
    Sweep(CommonArgs),
    /// Throughput against an imposed receiver displacement.
    Displacement(CommonArgs),
    /// Per-timestep link samples for one strategy.
    Timeseries(CommonArgs),
    /// Fit an AR model to a perturbation trace.
    FitAr(FitArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario JSON; defaults to the reference platoon setup.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Trace CSV (`time_s,dy_m` or `time_s,dx_m`); defaults to the bundled
    /// reference trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_AR_ORDER)]
    pub order: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Process exit status for an error: 2 for bad input, 3 for I/O, 4 for
/// numerical or model failures.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Config { .. }
        | Error::Parse { .. }
        | Error::InvalidParameter { .. }
        | Error::TraceTooShort { .. } => 2,
        Error::Io { .. } => 3,
        _ => 4,
    }
}

pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Sweep(a) => cmd_sweep(a.config.as_deref(), &a.out, a.seed),
        Command::Displacement(a) => cmd_displacement(a.config.as_deref(), &a.out, a.seed),
        Command::Timeseries(a) => cmd_timeseries(a.config.as_deref(), &a.out, a.seed),
        Command::FitAr(a) => cmd_fit_ar(a.trace.as_deref(), a.order, &a.out),
    };
    match outcome {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    /// Seconds since the Unix epoch; not part of the hash.
    pub timestamp: u64,
    pub outputs: Vec<String>,
}

/// SHA-256 of the canonical JSON of the resolved config.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    hex::encode(Sha256::digest(cfg.to_canonical_json().as_bytes()))
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<(ScenarioConfig, PathBuf)> {
    let (mut cfg, base) = match path {
        Some(p) => (
            ScenarioConfig::load(p)?,
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => (ScenarioConfig::default(), PathBuf::from(".")),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok((cfg, base))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn write_outputs(
    command: &str,
    cfg: &ScenarioConfig,
    out_dir: &Path,
    files: &[(&str, String)],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    for (name, body) in files {
        let path = out_dir.join(name);
        write_file(&path, body)?;
        written.push(path);
    }
    let manifest = RunManifest {
        command: command.to_string(),
        config_hash: config_hash(cfg),
        seed: cfg.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        outputs: files.iter().map(|(n, _)| n.to_string()).collect(),
    };
    let path = out_dir.join("manifest.json");
    let mut body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    body.push('\n');
    write_file(&path, &body)?;
    written.push(path);
    Ok(written)
}

pub fn cmd_sweep(config: Option<&Path>, out_dir: &Path, seed: Option<u64>) -> Result<Vec<PathBuf>> {
    let (cfg, base) = load_config(config, seed)?;
    let sc = cfg.resolve(&base)?;
    let result = sweep(&sc)?;
    let mut csv = format!("{SWEEP_HEADER}\n");
    for row in &result.rows {
        let s = row.summary;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            row.strategy.label(),
            fmt_num(row.p0_w),
            fmt_num(row.z_m),
            fmt_num(s.mean_r),
            fmt_num(s.p5_r),
            fmt_num(s.p95_r),
            fmt_num(s.mean_p_r),
        );
    }
    write_outputs("sweep", &cfg, out_dir, &[("sweep.csv", csv)])
}

pub fn cmd_displacement(
    config: Option<&Path>,
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<Vec<PathBuf>> {
    let (cfg, base) = load_config(config, seed)?;
    let sc = cfg.resolve(&base)?;
    let rows = displacement_sweep(&sc, &sc.delta_grid_m, &sc.z_list_m)?;
    let mut csv = format!("{DISPLACEMENT_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_num(r.p0_w),
            fmt_num(r.z_m),
            fmt_num(r.delta_m),
            fmt_num(r.r_bit_per_s)
        );
    }
    write_outputs("displacement", &cfg, out_dir, &[("displacement.csv", csv)])
}

pub fn timeseries_csv(samples: &[LinkSample]) -> String {
    let mut csv = format!("{TIMESERIES_HEADER}\n");
    for s in samples {
        let fields = [
            s.t_s,
            s.z_m,
            s.p0_w,
            s.dx_m,
            s.dy_m,
            s.beta_x_rad,
            s.beta_y_rad,
            s.p_r_w,
            s.snr,
            s.r_bit_per_s,
        ];
        let line: Vec<String> = fields.iter().map(|v| fmt_num(*v)).collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
    }
    csv
}

pub fn cmd_timeseries(
    config: Option<&Path>,
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<Vec<PathBuf>> {
    let (cfg, base) = load_config(config, seed)?;
    let sc = cfg.resolve(&base)?;
    let samples = run_scenario(&sc, &sc.strategy, sc.timeseries_z_m, sc.beam.power_w)?;
    write_outputs(
        "timeseries",
        &cfg,
        out_dir,
        &[("timeseries.csv", timeseries_csv(&samples))],
    )
}

/// Fits an AR(`order`) model and writes it to `out_dir/ar_model.json`.
pub fn cmd_fit_ar(trace: Option<&Path>, order: usize, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let owned;
    let trace: &PerturbationTrace = match trace {
        Some(path) => {
            owned = PerturbationTrace::load(path)?.0;
            &owned
        }
        None => reference_trace(),
    };
    let model = ar_fit(trace, order)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let path = out_dir.join("ar_model.json");
    let mut body = serde_json::to_string_pretty(&model).expect("model serializes");
    body.push('\n');
    write_file(&path, &body)?;
    Ok(vec![path])
}

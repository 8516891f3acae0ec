//! Time-stepped platoon runs and parameter sweeps.

use std::sync::Arc;

use rayon::prelude::*;

use crate::beam::{received_power, Aperture, BeamParams, PowerMethod};
use crate::dynamics::{ar_generate, derive_seed, ArModel, PerturbationTrace};
use crate::error::{Error, Result};
use crate::geometry::{
    displacement, link_rotation, pointing_angles, select_laser, CompensationStrategy, Displacement,
    LaserArray, RotationAngles, SignalHistory, VehicleStatic,
};
use crate::receiver::{snr, throughput, ReceiverParams};

/// Resolved stroke source for one vehicle axis.
#[derive(Debug, Clone)]
pub enum PerturbationSource {
    Zero,
    Model(ArModel),
    Trace(Arc<PerturbationTrace>),
}

/// A validated scenario, ready to run. Built by
/// [`ScenarioConfig::resolve`](crate::config::ScenarioConfig::resolve).
#[derive(Debug, Clone)]
pub struct Scenario {
    pub vehicle1: VehicleStatic,
    pub vehicle2: VehicleStatic,
    /// Stroke sources in the order `v1 x, v1 y, v2 x, v2 y`.
    pub sources: [PerturbationSource; 4],
    pub beam: BeamParams,
    pub rx: ReceiverParams,
    pub background_w_per_m2: f64,
    pub strategy: CompensationStrategy,
    pub sweep_strategies: Vec<CompensationStrategy>,
    pub laser_array: LaserArray,
    pub z_list_m: Vec<f64>,
    pub p0_list_w: Vec<f64>,
    pub n_steps: usize,
    pub timestep_s: f64,
    pub seed: u64,
    pub power_method: PowerMethod,
    pub delta_grid_m: Vec<f64>,
    pub timeseries_z_m: f64,
}

/// Realized stroke traces for one run, shared by every grid point so that
/// strategies and distances see the same road.
#[derive(Debug, Clone)]
pub struct Perturbations {
    pub v1x: Arc<PerturbationTrace>,
    pub v1y: Arc<PerturbationTrace>,
    pub v2x: Arc<PerturbationTrace>,
    pub v2y: Arc<PerturbationTrace>,
}

impl Scenario {
    pub fn last_time_s(&self) -> f64 {
        (self.n_steps - 1) as f64 * self.timestep_s
    }

    pub fn time_of(&self, step: usize) -> f64 {
        step as f64 * self.timestep_s
    }

    /// Draws every stroke trace over `[0, last_time_s]`. Each axis of each
    /// vehicle gets its own stream derived from `seed`.
    pub fn perturbations(&self, seed: u64) -> Result<Perturbations> {
        let end = self.last_time_s();
        let realize =
            |stream: u64, source: &PerturbationSource| -> Result<Arc<PerturbationTrace>> {
                match source {
                    PerturbationSource::Zero => {
                        Ok(Arc::new(PerturbationTrace::constant(0.0, end, 0.0)?))
                    }
                    PerturbationSource::Model(model) => {
                        let n = (end * model.sample_rate_hz()).ceil() as usize + 2;
                        Ok(Arc::new(ar_generate(model, n, derive_seed(seed, stream))?))
                    }
                    PerturbationSource::Trace(trace) => Ok(Arc::clone(trace)),
                }
            };
        Ok(Perturbations {
            v1x: realize(0, &self.sources[0])?,
            v1y: realize(1, &self.sources[1])?,
            v2x: realize(2, &self.sources[2])?,
            v2y: realize(3, &self.sources[3])?,
        })
    }

    fn link_budget(
        &self,
        p0_w: f64,
        z_m: f64,
        disp: &Displacement,
        rot: &RotationAngles,
    ) -> Result<(f64, f64, f64)> {
        let beam = self.beam.with_power(p0_w);
        let aperture: Aperture = self.rx.aperture;
        let p_r = received_power(&beam, z_m, disp, rot, &aperture, self.power_method)?;
        let s = snr(p_r, &self.rx, self.background_w_per_m2);
        Ok((p_r, s, throughput(s, self.rx.bandwidth_hz)))
    }

    /// With steering available, the nominal line of sight must be reachable
    /// by one array element and its mirror.
    fn check_steering(&self, strategy: &CompensationStrategy, z_m: f64) -> Result<()> {
        if matches!(strategy, CompensationStrategy::None) {
            return Ok(());
        }
        let s1 = self.vehicle1.state(0.0, 0.0, 0.0, 0.0);
        let s2 = self.vehicle2.state(0.0, z_m, 0.0, 0.0);
        let los = pointing_angles(&s1, &s2)?;
        select_laser(los.azimuth_rad, &self.laser_array)?;
        if !(los.elevation_rad.abs() <= self.laser_array.mems_range_rad) {
            return Err(Error::UnreachableElevation {
                elevation_rad: los.elevation_rad,
                range_rad: self.laser_array.mems_range_rad,
            });
        }
        Ok(())
    }
}

/// One timestep of link output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub t_s: f64,
    pub z_m: f64,
    pub p0_w: f64,
    pub dx_m: f64,
    pub dy_m: f64,
    pub beta_x_rad: f64,
    pub beta_y_rad: f64,
    pub p_r_w: f64,
    pub snr: f64,
    pub r_bit_per_s: f64,
}

/// Runs `strategy` at one `(z, P0)` point with strokes drawn from the
/// scenario seed.
pub fn run_scenario(
    sc: &Scenario,
    strategy: &CompensationStrategy,
    z_m: f64,
    p0_w: f64,
) -> Result<Vec<LinkSample>> {
    let perts = sc.perturbations(sc.seed)?;
    run_with(sc, &perts, strategy, z_m, p0_w)
}

/// As [`run_scenario`] with pre-drawn strokes.
pub fn run_with(
    sc: &Scenario,
    perts: &Perturbations,
    strategy: &CompensationStrategy,
    z_m: f64,
    p0_w: f64,
) -> Result<Vec<LinkSample>> {
    sc.check_steering(strategy, z_m)?;
    let history = SignalHistory {
        dx: &perts.v2x,
        dy: &perts.v2y,
    };
    (0..sc.n_steps)
        .map(|step| {
            let t = sc.time_of(step);
            step_link(sc, perts, history, strategy, t, z_m, p0_w).map_err(|e| Error::AtTime {
                t_s: t,
                source: Box::new(e),
            })
        })
        .collect()
}

fn step_link(
    sc: &Scenario,
    perts: &Perturbations,
    history: SignalHistory<'_>,
    strategy: &CompensationStrategy,
    t: f64,
    z_m: f64,
    p0_w: f64,
) -> Result<LinkSample> {
    let s1 = sc
        .vehicle1
        .state(t, 0.0, perts.v1x.value_at(t)?, perts.v1y.value_at(t)?);
    let s2 = sc
        .vehicle2
        .state(t, z_m, perts.v2x.value_at(t)?, perts.v2y.value_at(t)?);
    let disp = displacement(&sc.vehicle1, &s1, &s2, strategy, Some(history))?;
    let rot = link_rotation(&sc.vehicle1, &s1, &sc.vehicle2, &s2, strategy);
    let (p_r_w, snr, r_bit_per_s) = sc.link_budget(p0_w, z_m, &disp, &rot)?;
    Ok(LinkSample {
        t_s: t,
        z_m,
        p0_w,
        dx_m: disp.dx_m,
        dy_m: disp.dy_m,
        beta_x_rad: rot.beta_x_rad,
        beta_y_rad: rot.beta_y_rad,
        p_r_w,
        snr,
        r_bit_per_s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean_r: f64,
    pub p5_r: f64,
    pub p95_r: f64,
    pub mean_p_r: f64,
}

/// Nearest-rank percentile of sorted data, `pct` in whole percent.
fn nearest_rank(sorted: &[f64], pct: usize) -> f64 {
    let n = sorted.len();
    let rank = (pct * n).div_ceil(100).clamp(1, n);
    sorted[rank - 1]
}

pub fn summarize(samples: &[LinkSample]) -> Result<Summary> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let n = samples.len() as f64;
    let mut rates: Vec<f64> = samples.iter().map(|s| s.r_bit_per_s).collect();
    let mean_r = rates.iter().sum::<f64>() / n;
    let mean_p_r = samples.iter().map(|s| s.p_r_w).sum::<f64>() / n;
    rates.sort_by(f64::total_cmp);
    Ok(Summary {
        mean_r,
        p5_r: nearest_rank(&rates, 5),
        p95_r: nearest_rank(&rates, 95),
        mean_p_r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub strategy: CompensationStrategy,
    pub p0_w: f64,
    pub z_m: f64,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn get(&self, strategy_label: &str, p0_w: f64, z_m: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.strategy.label() == strategy_label && r.p0_w == p0_w && r.z_m == z_m)
    }
}

/// Every `(strategy, P0, z)` combination of the scenario, rows ordered by
/// strategy, then power, then distance. Grid points run in parallel on the
/// same stroke realization; the output does not depend on scheduling.
pub fn sweep(sc: &Scenario) -> Result<SweepResult> {
    let perts = sc.perturbations(sc.seed)?;
    let mut p0s = sc.p0_list_w.clone();
    p0s.sort_by(f64::total_cmp);
    let mut zs = sc.z_list_m.clone();
    zs.sort_by(f64::total_cmp);
    let mut strategies: Vec<CompensationStrategy> = sc.sweep_strategies.clone();
    strategies.sort_by_key(CompensationStrategy::rank);

    let mut grid: Vec<(CompensationStrategy, f64, f64)> = Vec::new();
    for s in &strategies {
        for &p in &p0s {
            grid.extend(zs.iter().map(|&z| (*s, p, z)));
        }
    }

    let rows = grid
        .par_iter()
        .map(|&(strategy, p0_w, z_m)| {
            let samples = run_with(sc, &perts, &strategy, z_m, p0_w)?;
            Ok(SweepRow {
                strategy,
                p0_w,
                z_m,
                summary: summarize(&samples)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementRow {
    pub p0_w: f64,
    pub z_m: f64,
    pub delta_m: f64,
    pub r_bit_per_s: f64,
}

/// Throughput for a receiver held `delta` off axis (vertically, no
/// rotation), for every power in the scenario.
pub fn displacement_sweep(
    sc: &Scenario,
    delta_grid_m: &[f64],
    z_list_m: &[f64],
) -> Result<Vec<DisplacementRow>> {
    if delta_grid_m.is_empty() {
        return Err(Error::config("delta_grid_m", "must not be empty"));
    }
    let mut rows = Vec::with_capacity(sc.p0_list_w.len() * z_list_m.len() * delta_grid_m.len());
    for &p0_w in &sc.p0_list_w {
        for &z_m in z_list_m {
            for &delta_m in delta_grid_m {
                let disp = Displacement {
                    dx_m: 0.0,
                    dy_m: delta_m,
                };
                let (_, _, r) = sc.link_budget(p0_w, z_m, &disp, &RotationAngles::default())?;
                rows.push(DisplacementRow {
                    p0_w,
                    z_m,
                    delta_m,
                    r_bit_per_s: r,
                });
            }
        }
    }
    Ok(rows)
}

/// Throughput of a perfectly aligned, unrotated link.
pub fn aligned_throughput(sc: &Scenario, z_m: f64, p0_w: f64) -> Result<f64> {
    let (_, _, r) = sc.link_budget(
        p0_w,
        z_m,
        &Displacement::default(),
        &RotationAngles::default(),
    )?;
    Ok(r)
}

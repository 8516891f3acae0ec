//! JSON scenario document. Every field is optional and defaults to the
//! reference platoon setup; unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::beam::{BeamParams, PowerMethod};
use crate::dynamics::{default_model, ArModel, PerturbationTrace, Quantizer};
use crate::error::{Error, Result};
use crate::geometry::{CompensationStrategy, LaserArray, VehicleStatic};
use crate::receiver::{background_irradiance, ReceiverParams, SolarSpectrum};
use crate::sim::{PerturbationSource, Scenario};

/// Background irradiance used when no spectrum is supplied, W/m².
pub const DEFAULT_BACKGROUND_W_PER_M2: f64 = 5.58;

/// Where a vehicle's stroke on one axis comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSpec {
    /// No perturbation.
    Zero,
    /// The bundled AR(10) stroke model.
    Default,
    /// A user-supplied AR model.
    Ar(ArModel),
    /// A measured trace file (`time_s,dy_m` or `time_s,dx_m`), relative to
    /// the config file.
    Trace { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleConfig {
    #[serde(default = "default_length")]
    pub length_m: f64,
    #[serde(default)]
    pub rest_lateral_m: f64,
    pub rest_height_m: f64,
    #[serde(default = "zero_spec")]
    pub ar_model_x: PerturbationSpec,
    #[serde(default = "default_spec")]
    pub ar_model_y: PerturbationSpec,
}

fn default_length() -> f64 {
    4.0
}

fn zero_spec() -> PerturbationSpec {
    PerturbationSpec::Zero
}

fn default_spec() -> PerturbationSpec {
    PerturbationSpec::Default
}

impl VehicleConfig {
    fn at_height(rest_height_m: f64) -> Self {
        Self {
            length_m: default_length(),
            rest_lateral_m: 0.0,
            rest_height_m,
            ar_model_x: zero_spec(),
            ar_model_y: default_spec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Follower, carrying the transmitter.
    pub vehicle1: VehicleConfig,
    /// Leader, carrying the receiver.
    pub vehicle2: VehicleConfig,
    pub beam: BeamParams,
    pub rx: ReceiverParams,
    /// Strategy for `timeseries`.
    pub strategy: CompensationStrategy,
    /// Strategies compared by `sweep`.
    pub sweep_strategies: Vec<CompensationStrategy>,
    pub laser_array: LaserArray,
    pub z_list_m: Vec<f64>,
    pub p0_list_w: Vec<f64>,
    pub duration_s: f64,
    pub timestep_s: f64,
    pub seed: u64,
    pub i_b_w_per_m2: Option<f64>,
    pub spectrum_path: Option<PathBuf>,
    pub power_method: PowerMethod,
    /// Imposed displacements for `displacement`.
    pub delta_grid_m: Vec<f64>,
    /// Range used by `timeseries`; power comes from `beam.power_w`.
    pub timeseries_z_m: f64,
}

fn dynamic_20ms() -> CompensationStrategy {
    CompensationStrategy::Dynamic {
        delta_t_s: 0.02,
        quantizer: Quantizer::default(),
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            vehicle1: VehicleConfig::at_height(1.4),
            vehicle2: VehicleConfig::at_height(1.7),
            beam: BeamParams::default(),
            rx: ReceiverParams::default(),
            strategy: dynamic_20ms(),
            sweep_strategies: vec![
                CompensationStrategy::None,
                CompensationStrategy::Static,
                dynamic_20ms(),
            ],
            laser_array: LaserArray::default(),
            z_list_m: (1..=20).map(|k| 5.0 * k as f64).collect(),
            p0_list_w: vec![1e-3, 10e-3],
            duration_s: 200.0,
            timestep_s: 1e-3,
            seed: 1,
            i_b_w_per_m2: None,
            spectrum_path: None,
            power_method: PowerMethod::ExactIntegral,
            delta_grid_m: (0..=100).map(|k| k as f64 / 1000.0).collect(),
            timeseries_z_m: 50.0,
        }
    }
}

fn check_list(key: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(key, "must not be empty"));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::config(
            key,
            format!("values must be finite and > 0, got {v}"),
        ));
    }
    Ok(())
}

fn check_positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(
            key,
            format!("must be finite and > 0, got {v}"),
        ))
    }
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            let reason = e.to_string();
            // serde reports the first bad key inside its message
            let key = reason
                .split('`')
                .nth(1)
                .filter(|_| {
                    reason.starts_with("unknown field") || reason.starts_with("missing field")
                })
                .unwrap_or("<document>")
                .to_string();
            Error::Config { key, reason }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Canonical JSON of the resolved document.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Number of simulated timesteps.
    pub fn n_steps(&self) -> usize {
        (self.duration_s / self.timestep_s).round() as usize
    }

    /// Validates the document and loads any referenced files. Relative paths
    /// resolve against `base_dir`.
    pub fn resolve(&self, base_dir: &Path) -> Result<Scenario> {
        self.beam.validate().map_err(|e| e.at_key("beam"))?;
        self.rx.validate().map_err(|e| e.at_key("rx"))?;
        self.laser_array
            .validate()
            .map_err(|e| e.at_key("laser_array"))?;
        check_list("z_list_m", &self.z_list_m)?;
        check_list("p0_list_w", &self.p0_list_w)?;
        check_positive("duration_s", self.duration_s)?;
        check_positive("timestep_s", self.timestep_s)?;
        check_positive("timeseries_z_m", self.timeseries_z_m)?;
        if self.n_steps() == 0 {
            return Err(Error::config("duration_s", "shorter than one timestep"));
        }
        if let Some(v) = self.delta_grid_m.iter().find(|v| !v.is_finite()) {
            return Err(Error::config(
                "delta_grid_m",
                format!("non-finite value {v}"),
            ));
        }

        let check_strategy = |key: &str, s: &CompensationStrategy| -> Result<()> {
            s.validate().map_err(|e| e.at_key(key))?;
            if let CompensationStrategy::Dynamic { delta_t_s, .. } = s {
                if *delta_t_s < self.timestep_s {
                    return Err(Error::config(
                        format!("{key}.delta_t_s"),
                        format!(
                            "{delta_t_s} s is shorter than timestep_s = {} s",
                            self.timestep_s
                        ),
                    ));
                }
            }
            Ok(())
        };
        check_strategy("strategy", &self.strategy)?;
        if self.sweep_strategies.is_empty() {
            return Err(Error::config("sweep_strategies", "must not be empty"));
        }
        for (i, s) in self.sweep_strategies.iter().enumerate() {
            check_strategy(&format!("sweep_strategies[{i}]"), s)?;
        }

        let background_w_per_m2 = match (&self.spectrum_path, self.i_b_w_per_m2) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "spectrum_path",
                    "set either spectrum_path or i_b_w_per_m2, not both",
                ))
            }
            (Some(path), None) => {
                let spectrum = SolarSpectrum::load(&base_dir.join(path))?;
                background_irradiance(&spectrum, self.rx.filter_center_m, self.rx.filter_bw_m)
                    .map_err(|e| Error::config("spectrum_path", e.to_string()))?
            }
            (None, Some(ib)) => {
                if !(ib.is_finite() && ib >= 0.0) {
                    return Err(Error::config(
                        "i_b_w_per_m2",
                        format!("must be >= 0, got {ib}"),
                    ));
                }
                ib
            }
            (None, None) => DEFAULT_BACKGROUND_W_PER_M2,
        };

        let last_t = (self.n_steps() - 1) as f64 * self.timestep_s;
        let source = |key: &str, spec: &PerturbationSpec| -> Result<PerturbationSource> {
            Ok(match spec {
                PerturbationSpec::Zero => PerturbationSource::Zero,
                PerturbationSpec::Default => PerturbationSource::Model(default_model().clone()),
                PerturbationSpec::Ar(model) => PerturbationSource::Model(model.clone()),
                PerturbationSpec::Trace { path } => {
                    let (trace, _) = PerturbationTrace::load(&base_dir.join(path))?;
                    if trace.t0_s() > 0.0 || trace.end_s() < last_t {
                        return Err(Error::config(
                            format!("{key}.path"),
                            format!(
                                "trace covers [{}, {}] s but the run needs [0, {last_t}] s",
                                trace.t0_s(),
                                trace.end_s()
                            ),
                        ));
                    }
                    PerturbationSource::Trace(Arc::new(trace))
                }
            })
        };
        let vehicle =
            |key: &str, v: &VehicleConfig| -> Result<(VehicleStatic, [PerturbationSource; 2])> {
                let stat = VehicleStatic::new(v.length_m, v.rest_lateral_m, v.rest_height_m)
                    .map_err(|e| e.at_key(key))?;
                Ok((
                    stat,
                    [
                        source(&format!("{key}.ar_model_x"), &v.ar_model_x)?,
                        source(&format!("{key}.ar_model_y"), &v.ar_model_y)?,
                    ],
                ))
            };
        let (vehicle1, [v1x, v1y]) = vehicle("vehicle1", &self.vehicle1)?;
        let (vehicle2, [v2x, v2y]) = vehicle("vehicle2", &self.vehicle2)?;

        Ok(Scenario {
            vehicle1,
            vehicle2,
            sources: [v1x, v1y, v2x, v2y],
            beam: self.beam,
            rx: self.rx,
            background_w_per_m2,
            strategy: self.strategy,
            sweep_strategies: self.sweep_strategies.clone(),
            laser_array: self.laser_array,
            z_list_m: self.z_list_m.clone(),
            p0_list_w: self.p0_list_w.clone(),
            n_steps: self.n_steps(),
            timestep_s: self.timestep_s,
            seed: self.seed,
            power_method: self.power_method,
            delta_grid_m: self.delta_grid_m.clone(),
            timeseries_z_m: self.timeseries_z_m,
        })
    }
}

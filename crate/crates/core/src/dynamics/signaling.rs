use serde::{Deserialize, Serialize};

use super::PerturbationTrace;
use crate::error::{ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantizerMode {
    MidRise,
    Identity,
}

/// Uniform quantizer over `[-range_m, range_m]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Quantizer {
    pub bits: u32,
    pub range_m: f64,
    pub mode: QuantizerMode,
}

impl Default for Quantizer {
    fn default() -> Self {
        Self {
            bits: 16,
            range_m: 0.1,
            mode: QuantizerMode::MidRise,
        }
    }
}

impl Quantizer {
    pub fn new(bits: u32, range_m: f64, mode: QuantizerMode) -> Result<Self> {
        let q = Self {
            bits,
            range_m,
            mode,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn identity() -> Self {
        Self {
            mode: QuantizerMode::Identity,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=52).contains(&self.bits) {
            return Err(Error::invalid(
                "bits",
                format!("must be in 1..=52, got {}", self.bits),
            ));
        }
        ensure_positive("range_m", self.range_m)
    }

    /// Distance between adjacent reconstruction levels.
    pub fn step(&self) -> f64 {
        2.0 * self.range_m / 2f64.powi(self.bits as i32)
    }
}

/// Reconstruction level for `value_m`. Mid-rise levels sit at
/// `(k + 1/2) * step`; values beyond full scale clamp to the outermost level.
pub fn quantize(value_m: f64, q: &Quantizer) -> f64 {
    match q.mode {
        QuantizerMode::Identity => value_m,
        QuantizerMode::MidRise => {
            let step = q.step();
            let half = 2f64.powi(q.bits as i32 - 1);
            let k = (value_m / step).floor().clamp(-half, half - 1.0);
            (k + 0.5) * step
        }
    }
}

/// Most recent update instant `k * delta_t_s` at or before `t_s`.
pub fn signaling_instant(t_s: f64, delta_t_s: f64) -> f64 {
    let k = (t_s / delta_t_s + 1e-9).floor();
    let t_sig = k * delta_t_s;
    if (t_s - t_sig).abs() <= 1e-12 * t_s.abs().max(1.0) {
        t_s
    } else {
        t_sig.min(t_s)
    }
}

/// Value the receiver side holds at `t_s` when updates are sent every
/// `delta_t_s` seconds: the trace sampled at the latest update instant
/// (zero-order hold).
pub fn sample_delayed(trace: &PerturbationTrace, t_s: f64, delta_t_s: f64) -> Result<f64> {
    ensure_positive("delta_t_s", delta_t_s)?;
    trace.value_at(signaling_instant(t_s, delta_t_s))
}

/// Side-channel rate in bit/s.
pub fn signaling_overhead(values_per_update: u32, bits: u32, delta_t_s: f64) -> Result<f64> {
    if values_per_update == 0 {
        return Err(Error::invalid("values_per_update", "must be >= 1"));
    }
    if bits == 0 {
        return Err(Error::invalid("bits", "must be >= 1"));
    }
    ensure_positive("delta_t_s", delta_t_s)?;
    Ok(f64::from(values_per_update) * f64::from(bits) / delta_t_s)
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::PerturbationTrace;
use crate::error::{ensure_positive, Error, Result};

/// Samples discarded per unit of model order before a generated trace
/// starts.
pub const WARM_UP_PER_ORDER: usize = 100;

/// Stationary autoregressive process
/// `x[t] = a1 x[t-1] + ... + ap x[t-p] + noise_std * e[t]`, `e ~ N(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArModelDoc", into = "ArModelDoc")]
pub struct ArModel {
    coefficients: Vec<f64>,
    noise_std: f64,
    sample_rate_hz: f64,
}

/// On-disk form; `order` is redundant but kept for readability.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArModelDoc {
    #[serde(default)]
    order: Option<usize>,
    coefficients: Vec<f64>,
    noise_std: f64,
    sample_rate_hz: f64,
}

impl TryFrom<ArModelDoc> for ArModel {
    type Error = Error;

    fn try_from(doc: ArModelDoc) -> Result<Self> {
        if let Some(order) = doc.order {
            if order != doc.coefficients.len() {
                return Err(Error::invalid(
                    "order",
                    format!(
                        "{order} does not match {} coefficients",
                        doc.coefficients.len()
                    ),
                ));
            }
        }
        ArModel::new(doc.coefficients, doc.noise_std, doc.sample_rate_hz)
    }
}

impl From<ArModel> for ArModelDoc {
    fn from(m: ArModel) -> Self {
        ArModelDoc {
            order: Some(m.coefficients.len()),
            coefficients: m.coefficients,
            noise_std: m.noise_std,
            sample_rate_hz: m.sample_rate_hz,
        }
    }
}

impl ArModel {
    pub fn new(coefficients: Vec<f64>, noise_std: f64, sample_rate_hz: f64) -> Result<Self> {
        if coefficients.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("coefficients", "must be finite"));
        }
        if !(noise_std.is_finite() && noise_std >= 0.0) {
            return Err(Error::invalid(
                "noise_std",
                format!("must be >= 0, got {noise_std}"),
            ));
        }
        ensure_positive("sample_rate_hz", sample_rate_hz)?;
        if !is_stationary(&coefficients) {
            return Err(Error::NonStationary);
        }
        Ok(Self {
            coefficients,
            noise_std,
            sample_rate_hz,
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn warm_up_len(&self) -> usize {
        WARM_UP_PER_ORDER * self.order()
    }
}

/// True when every root of `1 - a1 z^-1 - ... - ap z^-p` lies strictly inside
/// the unit circle. Uses the step-down recursion: the model is stationary
/// iff every reflection coefficient has magnitude below one.
pub fn is_stationary(coefficients: &[f64]) -> bool {
    let mut a = coefficients.to_vec();
    while let Some(&k) = a.last() {
        if !(k.abs() < 1.0) {
            return false;
        }
        let m = a.len();
        let denom = 1.0 - k * k;
        let prev: Vec<f64> = (0..m - 1)
            .map(|i| (a[i] + k * a[m - 2 - i]) / denom)
            .collect();
        a = prev;
    }
    true
}

/// Draws `n` samples starting at `t = 0`, after discarding
/// [`ArModel::warm_up_len`] samples. Deterministic in `seed`.
pub fn ar_generate(model: &ArModel, n: usize, seed: u64) -> Result<PerturbationTrace> {
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // noise_std is validated finite and non-negative
    let normal = Normal::new(0.0, model.noise_std).expect("valid normal");
    let warm = model.warm_up_len();
    let a = model.coefficients();
    let mut x: Vec<f64> = Vec::with_capacity(warm + n);
    for t in 0..warm + n {
        let ar: f64 = a
            .iter()
            .enumerate()
            .take_while(|(i, _)| *i < t)
            .map(|(i, ai)| ai * x[t - 1 - i])
            .sum();
        x.push(ar + normal.sample(&mut rng));
    }
    PerturbationTrace::new(model.sample_rate_hz, 0.0, x.split_off(warm))
}

/// Yule-Walker estimate of an AR(`order`) model, solved with the
/// Levinson-Durbin recursion on the biased sample autocovariance.
pub fn ar_fit(trace: &PerturbationTrace, order: usize) -> Result<ArModel> {
    if order == 0 {
        return Err(Error::invalid("order", "must be >= 1"));
    }
    let x = trace.samples();
    let needed = 10 * order;
    if x.len() < needed {
        return Err(Error::TraceTooShort {
            len: x.len(),
            order,
            needed,
        });
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let acov: Vec<f64> = (0..=order)
        .map(|lag| {
            centered[..x.len() - lag]
                .iter()
                .zip(&centered[lag..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n
        })
        .collect();

    let power = x.iter().map(|v| v * v).sum::<f64>() / n;
    if !(acov[0] > 1e-12 * power) {
        return Err(Error::SingularSystem);
    }

    let mut a: Vec<f64> = Vec::with_capacity(order);
    let mut err = acov[0];
    for m in 1..=order {
        let acc = acov[m] - (0..m - 1).map(|i| a[i] * acov[m - 1 - i]).sum::<f64>();
        let k = acc / err;
        if !(k.abs() < 1.0) {
            return Err(Error::SingularSystem);
        }
        let prev = a.clone();
        for i in 0..m - 1 {
            a[i] = prev[i] - k * prev[m - 2 - i];
        }
        a.push(k);
        err *= 1.0 - k * k;
        if !(err > 1e-15 * acov[0]) {
            return Err(Error::SingularSystem);
        }
    }
    ArModel::new(a, err.sqrt(), trace.sample_rate_hz())
}

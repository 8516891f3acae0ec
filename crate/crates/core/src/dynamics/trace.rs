use std::fmt::Write as _;
use std::path::Path;

use crate::error::{ensure_positive, Error, Result};

/// Which transverse axis a trace file describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceAxis {
    Lateral,
    Vertical,
}

impl TraceAxis {
    pub fn column(self) -> &'static str {
        match self {
            TraceAxis::Lateral => "dx_m",
            TraceAxis::Vertical => "dy_m",
        }
    }
}

/// Uniformly sampled perturbation time series, in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationTrace {
    sample_rate_hz: f64,
    t0_s: f64,
    samples: Vec<f64>,
}

// Query times within this fraction of a sample period of a grid point read
// that sample directly.
const GRID_SNAP: f64 = 1e-9;

impl PerturbationTrace {
    pub fn new(sample_rate_hz: f64, t0_s: f64, samples: Vec<f64>) -> Result<Self> {
        ensure_positive("sample_rate_hz", sample_rate_hz)?;
        if !t0_s.is_finite() {
            return Err(Error::invalid("t0_s", "must be finite"));
        }
        if samples.is_empty() {
            return Err(Error::invalid("samples", "trace is empty"));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "samples",
                format!("sample {i} is not finite"),
            ));
        }
        Ok(Self {
            sample_rate_hz,
            t0_s,
            samples,
        })
    }

    /// A trace holding `value` over `[start_s, end_s]`.
    pub fn constant(start_s: f64, end_s: f64, value: f64) -> Result<Self> {
        let span = end_s - start_s;
        if span > 0.0 {
            Self::new(1.0 / span, start_s, vec![value, value])
        } else {
            Self::new(1.0, start_s, vec![value])
        }
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn t0_s(&self) -> f64 {
        self.t0_s
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn end_s(&self) -> f64 {
        self.t0_s + (self.samples.len() - 1) as f64 / self.sample_rate_hz
    }

    /// Time of sample `i`.
    pub fn time_of(&self, i: usize) -> f64 {
        self.t0_s + i as f64 / self.sample_rate_hz
    }

    /// Linearly interpolated value at `t_s`.
    pub fn value_at(&self, t_s: f64) -> Result<f64> {
        let last = (self.samples.len() - 1) as f64;
        let pos = (t_s - self.t0_s) * self.sample_rate_hz;
        if !(pos >= -GRID_SNAP && pos <= last + GRID_SNAP) {
            return Err(Error::OutOfSupport {
                t_s,
                start_s: self.t0_s,
                end_s: self.end_s(),
            });
        }
        let nearest = pos.round();
        if (pos - nearest).abs() <= GRID_SNAP {
            return Ok(self.samples[nearest.clamp(0.0, last) as usize]);
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        let (a, b) = (self.samples[i], self.samples[i + 1]);
        Ok(a + (b - a) * frac)
    }

    /// Parses `time_s,dy_m` (or `time_s,dx_m`) text. Timestamps must be
    /// uniformly spaced.
    pub fn from_csv_str(text: &str, what: &str) -> Result<(Self, TraceAxis)> {
        let parse_err = |line: usize, reason: String| Error::Parse {
            what: what.to_string(),
            line,
            reason,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header".into()))?;
        let axis = match header {
            "time_s,dy_m" => TraceAxis::Vertical,
            "time_s,dx_m" => TraceAxis::Lateral,
            other => {
                return Err(parse_err(
                    hline,
                    format!("expected header `time_s,dy_m` or `time_s,dx_m`, got `{other}`"),
                ))
            }
        };

        let mut times = Vec::new();
        let mut values = Vec::new();
        for (line, row) in lines {
            let mut cols = row.split(',');
            let (t, v) = match (cols.next(), cols.next(), cols.next()) {
                (Some(t), Some(v), None) => (t.trim(), v.trim()),
                _ => return Err(parse_err(line, "expected two columns".into())),
            };
            let t: f64 = t
                .parse()
                .map_err(|_| parse_err(line, format!("bad time `{t}`")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| parse_err(line, format!("bad value `{v}`")))?;
            if !t.is_finite() || !v.is_finite() {
                return Err(parse_err(line, "non-finite number".into()));
            }
            times.push((line, t));
            values.push(v);
        }
        if times.len() < 2 {
            return Err(parse_err(hline, "need at least two samples".into()));
        }

        let (_, first) = times[0];
        let (_, last) = times[times.len() - 1];
        let dt = (last - first) / (times.len() - 1) as f64;
        if !(dt > 0.0) {
            return Err(parse_err(hline, "timestamps must be increasing".into()));
        }
        for (k, w) in times.windows(2).enumerate() {
            let step = w[1].1 - w[0].1;
            let expected = first + (k + 1) as f64 * dt;
            if (step - dt).abs() > 1e-6 * dt || (w[1].1 - expected).abs() > 1e-6 * dt {
                return Err(parse_err(
                    w[1].0,
                    format!("non-uniform sampling: step {step} s, expected {dt} s"),
                ));
            }
        }
        let trace =
            Self::new(1.0 / dt, first, values).map_err(|e| parse_err(hline, e.to_string()))?;
        Ok((trace, axis))
    }

    pub fn load(path: &Path) -> Result<(Self, TraceAxis)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text, &path.display().to_string())
    }

    pub fn to_csv(&self, axis: TraceAxis) -> String {
        let mut out = format!("time_s,{}\n", axis.column());
        for (i, v) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{:?},{:?}", self.time_of(i), v);
        }
        out
    }
}

//! PIN photodetector chain: solar background, SNR and Shannon throughput.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::beam::Aperture;
use crate::error::{ensure_positive, Error, Result};

/// Elementary charge, C (exact in the 2019 SI).
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReceiverParams {
    pub aperture: Aperture,
    /// Photodiode active area. Not used by the noise model, which collects
    /// background over the full aperture.
    pub pd_area_m2: f64,
    pub responsivity_a_per_w: f64,
    pub filter_center_m: f64,
    pub filter_bw_m: f64,
    pub nep_w_per_sqrthz: f64,
    pub bandwidth_hz: f64,
}

impl Default for ReceiverParams {
    fn default() -> Self {
        Self {
            aperture: Aperture::default(),
            pd_area_m2: 0.1e-6,
            responsivity_a_per_w: 0.8,
            filter_center_m: 1550e-9,
            filter_bw_m: 50e-9,
            nep_w_per_sqrthz: 20e-12,
            bandwidth_hz: 1e9,
        }
    }
}

impl ReceiverParams {
    pub fn validate(&self) -> Result<()> {
        self.aperture.validate().map_err(|e| e.at_key("aperture"))?;
        ensure_positive("pd_area_m2", self.pd_area_m2)?;
        ensure_positive("responsivity_a_per_w", self.responsivity_a_per_w)?;
        ensure_positive("filter_center_m", self.filter_center_m)?;
        ensure_positive("filter_bw_m", self.filter_bw_m)?;
        ensure_positive("nep_w_per_sqrthz", self.nep_w_per_sqrthz)?;
        ensure_positive("bandwidth_hz", self.bandwidth_hz)
    }
}

/// Spectral irradiance samples, SI units: wavelength in m, irradiance in
/// W/m²/m.
#[derive(Debug, Clone, PartialEq)]
pub struct SolarSpectrum {
    samples: Vec<(f64, f64)>,
}

impl SolarSpectrum {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("samples", "need at least two points"));
        }
        for (i, &(wl, e)) in samples.iter().enumerate() {
            if !(wl.is_finite() && e.is_finite() && e >= 0.0) {
                return Err(Error::invalid(
                    "samples",
                    format!("point {i} ({wl}, {e}) must be finite with irradiance >= 0"),
                ));
            }
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::invalid(
                "samples",
                "wavelengths must be strictly increasing",
            ));
        }
        Ok(Self { samples })
    }

    /// Uniform irradiance `e_w_per_m2_per_m` over `[lo_m, hi_m]`.
    pub fn flat(lo_m: f64, hi_m: f64, e_w_per_m2_per_m: f64) -> Result<Self> {
        Self::new(vec![(lo_m, e_w_per_m2_per_m), (hi_m, e_w_per_m2_per_m)])
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Parses `wavelength_nm,irradiance_w_m2_nm` text.
    pub fn from_csv_str(text: &str, what: &str) -> Result<Self> {
        let parse_err = |line: usize, reason: String| Error::Parse {
            what: what.to_string(),
            line,
            reason,
        };
        let mut rows = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        match rows.next() {
            Some((_, "wavelength_nm,irradiance_w_m2_nm")) => {}
            Some((line, other)) => {
                return Err(parse_err(
                    line,
                    format!("expected header `wavelength_nm,irradiance_w_m2_nm`, got `{other}`"),
                ))
            }
            None => return Err(parse_err(1, "missing header".into())),
        }
        let mut samples = Vec::new();
        for (line, row) in rows {
            let cols: Vec<&str> = row.split(',').map(str::trim).collect();
            if cols.len() != 2 {
                return Err(parse_err(line, "expected two columns".into()));
            }
            let nums: Vec<f64> = cols
                .iter()
                .map(|c| c.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err(line, format!("bad number in `{row}`")))?;
            samples.push((nums[0] * 1e-9, nums[1] * 1e9));
        }
        Self::new(samples).map_err(|e| parse_err(0, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text, &path.display().to_string())
    }

    fn value_at(&self, wl: f64) -> f64 {
        let i = self.samples.partition_point(|&(w, _)| w <= wl);
        if i == 0 {
            return self.samples[0].1;
        }
        if i == self.samples.len() {
            return self.samples[i - 1].1;
        }
        let (w0, e0) = self.samples[i - 1];
        let (w1, e1) = self.samples[i];
        e0 + (e1 - e0) * (wl - w0) / (w1 - w0)
    }
}

/// Background irradiance in W/m² passed by a filter of width `bw_m` centred
/// on `center_m`: trapezoidal integral of the spectrum over the band, with
/// linear interpolation at the band edges.
pub fn background_irradiance(spec: &SolarSpectrum, center_m: f64, bw_m: f64) -> Result<f64> {
    ensure_positive("filter_bw_m", bw_m)?;
    let (lo, hi) = (center_m - bw_m / 2.0, center_m + bw_m / 2.0);
    let s = spec.samples();
    let (min, max) = (s[0].0, s[s.len() - 1].0);
    if lo < min || hi > max {
        return Err(Error::BandOutsideSpectrum {
            lo_m: lo,
            hi_m: hi,
            min_m: min,
            max_m: max,
        });
    }
    let mut knots = vec![(lo, spec.value_at(lo))];
    knots.extend(s.iter().copied().filter(|&(w, _)| w > lo && w < hi));
    knots.push((hi, spec.value_at(hi)));
    Ok(knots
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum())
}

/// Electrical SNR of the detected signal, limited by signal and background
/// shot noise plus the receiver NEP.
pub fn snr(p_r_w: f64, rx: &ReceiverParams, i_b_w_per_m2: f64) -> f64 {
    let eta = rx.responsivity_a_per_w;
    let b = rx.bandwidth_hz;
    let signal = (p_r_w * eta).powi(2);
    let shot =
        2.0 * ELEMENTARY_CHARGE_C * b * (i_b_w_per_m2 * rx.aperture.area_m2() * eta + p_r_w * eta);
    let thermal = (rx.nep_w_per_sqrthz * eta).powi(2) * b;
    signal / (shot + thermal)
}

/// Shannon rate `0.5 B log2(1 + SNR)` in bit/s for intensity modulation.
pub fn throughput(snr: f64, bandwidth_hz: f64) -> f64 {
    0.5 * bandwidth_hz * snr.ln_1p() / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_spectrum_reproduces_table_background() {
        // 0.1116 W/m²/nm
        let spec = SolarSpectrum::flat(1400e-9, 1700e-9, 0.1116e9).unwrap();
        let ib = background_irradiance(&spec, 1550e-9, 50e-9).unwrap();
        assert!((ib / 5.58 - 1.0).abs() < 1e-12, "{ib}");
    }

    #[test]
    fn zero_spectrum_gives_zero() {
        let spec = SolarSpectrum::flat(1e-6, 2e-6, 0.0).unwrap();
        assert_eq!(background_irradiance(&spec, 1.55e-6, 5e-8).unwrap(), 0.0);
    }

    #[test]
    fn triangular_spectrum_area() {
        // peak 2 at 1550 nm, zero at 1525 and 1575 nm: area = 0.5 * 50e-9 * 2
        let spec = SolarSpectrum::new(vec![
            (1500e-9, 0.0),
            (1525e-9, 0.0),
            (1550e-9, 2.0),
            (1575e-9, 0.0),
            (1600e-9, 0.0),
        ])
        .unwrap();
        let ib = background_irradiance(&spec, 1550e-9, 50e-9).unwrap();
        assert!((ib - 50e-9).abs() < 1e-21);
        // half band on the rising edge only: triangle up to 1550 from 1537.5
        let ib = background_irradiance(&spec, 1543.75e-9, 12.5e-9).unwrap();
        let expected = 0.5 * (1.0 + 2.0) * 12.5e-9;
        assert!((ib - expected).abs() < 1e-21, "{ib} vs {expected}");
    }

    #[test]
    fn band_outside_support_errors() {
        let spec = SolarSpectrum::flat(1500e-9, 1560e-9, 1.0).unwrap();
        assert!(matches!(
            background_irradiance(&spec, 1550e-9, 50e-9),
            Err(Error::BandOutsideSpectrum { .. })
        ));
    }

    #[test]
    fn spectrum_csv_units() {
        let text = "wavelength_nm,irradiance_w_m2_nm\n1500,0.1116\n1600,0.1116\n";
        let spec = SolarSpectrum::from_csv_str(text, "s").unwrap();
        assert_eq!(spec.samples()[0].0, 1500e-9);
        let ib = background_irradiance(&spec, 1550e-9, 50e-9).unwrap();
        assert!((ib / 5.58 - 1.0).abs() < 1e-12);
        assert!(SolarSpectrum::from_csv_str("nm,w\n1,2\n3,4\n", "s").is_err());
        let descending = "wavelength_nm,irradiance_w_m2_nm\n1600,1\n1500,1\n";
        assert!(SolarSpectrum::from_csv_str(descending, "s").is_err());
        let negative = "wavelength_nm,irradiance_w_m2_nm\n1500,-1\n1600,1\n";
        assert!(SolarSpectrum::from_csv_str(negative, "s").is_err());
    }

    #[test]
    fn snr_examples() {
        let rx = ReceiverParams::default();
        assert_eq!(snr(0.0, &rx, 0.0), 0.0);

        let s = snr(1.044e-5, &rx, 5.58);
        assert!((s - 268.0).abs() < 1.0, "{s}");

        // NEP-only noise: halving NEP quadruples SNR
        let weak = 1e-9;
        let half = ReceiverParams {
            nep_w_per_sqrthz: rx.nep_w_per_sqrthz / 2.0,
            ..rx
        };
        let no_shot = |r: &ReceiverParams| {
            let eta = r.responsivity_a_per_w;
            (weak * eta).powi(2) / ((r.nep_w_per_sqrthz * eta).powi(2) * r.bandwidth_hz)
        };
        assert!((no_shot(&half) / no_shot(&rx) - 4.0).abs() < 1e-12);
        // with shot noise present the gain is below 4x
        let gain = snr(weak, &half, 0.0) / snr(weak, &rx, 0.0);
        assert!(gain > 3.99 && gain <= 4.0);
    }

    #[test]
    fn nep_term_scales_quadratically() {
        let rx = ReceiverParams::default();
        let p = 1e-6;
        let denom = |r: &ReceiverParams| {
            let eta = r.responsivity_a_per_w;
            (p * eta).powi(2) / snr(p, r, 0.0)
                - 2.0 * ELEMENTARY_CHARGE_C * r.bandwidth_hz * p * eta
        };
        let ten = ReceiverParams {
            nep_w_per_sqrthz: rx.nep_w_per_sqrthz * 10.0,
            ..rx
        };
        assert!((denom(&ten) / denom(&rx) - 100.0).abs() < 1e-6);
    }

    #[test]
    fn snr_monotonicity() {
        let rx = ReceiverParams::default();
        let mut last = 0.0;
        for k in 1..200 {
            let p = 1e-9 * 1.1f64.powi(k);
            let s = snr(p, &rx, 5.58);
            assert!(s > last);
            last = s;
            let wide = ReceiverParams {
                bandwidth_hz: 2.0 * rx.bandwidth_hz,
                ..rx
            };
            assert!(snr(p, &wide, 5.58) < s);
        }
    }

    #[test]
    fn throughput_examples() {
        assert_eq!(throughput(0.0, 1e9), 0.0);
        assert!((throughput(3.0, 1e9) - 1e9).abs() < 1e-3);
        let r = throughput(268.0, 1e9);
        assert!((r - 4.03e9).abs() < 0.01e9, "{r}");
        let mut last = -1.0;
        for k in 0..100 {
            let r = throughput(k as f64 * 0.37, 1e9);
            assert!(r > last);
            last = r;
        }
    }
}

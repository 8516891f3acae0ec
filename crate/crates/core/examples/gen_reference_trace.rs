//! Regenerates `data/reference_dy.csv`, the synthetic vertical-stroke trace
//! the default AR(10) model is fitted to.
//!
//! Band-limited noise: a lightly damped resonance at 0.2 Hz followed by a
//! 2 Hz one-pole smoother, sampled at 100 Hz for 200 s and scaled to 6 mm
//! rms.
//!
//! Run with: cargo run --example gen_reference_trace > data/reference_dy.csv

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const SAMPLE_RATE_HZ: f64 = 100.0;
const DURATION_S: f64 = 200.0;
const RESONANCE_HZ: f64 = 0.2;
const POLE_RADIUS: f64 = 0.995;
const SMOOTHER_HZ: f64 = 2.0;
const RMS_M: f64 = 6e-3;
const WARM_UP: usize = 5000;
const SEED: u64 = 12345;

fn main() {
    let n = (DURATION_S * SAMPLE_RATE_HZ) as usize + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let w = 2.0 * PI * RESONANCE_HZ / SAMPLE_RATE_HZ;
    let (a1, a2) = (2.0 * POLE_RADIUS * w.cos(), -POLE_RADIUS * POLE_RADIUS);
    let p = (-2.0 * PI * SMOOTHER_HZ / SAMPLE_RATE_HZ).exp();

    let (mut r1, mut r2, mut smooth) = (0.0f64, 0.0f64, 0.0f64);
    let mut out = Vec::with_capacity(n);
    for i in 0..WARM_UP + n {
        let e: f64 = StandardNormal.sample(&mut rng);
        let r = a1 * r1 + a2 * r2 + e;
        r2 = r1;
        r1 = r;
        smooth = (1.0 - p) * r + p * smooth;
        if i >= WARM_UP {
            out.push(smooth);
        }
    }

    let mean = out.iter().sum::<f64>() / n as f64;
    let rms = (out.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();

    let mut csv = String::from("time_s,dy_m\n");
    for (i, v) in out.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{:.2},{:.9}",
            i as f64 / SAMPLE_RATE_HZ,
            (v - mean) / rms * RMS_M
        );
    }
    print!("{csv}");
}

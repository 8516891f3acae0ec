//! Test oracles that do not share code paths with the crate: adaptive
//! Gauss-Kronrod quadrature and a direct evaluation of the link chain.

#![allow(dead_code, clippy::excessive_precision)]

use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, rel: f64, abs: f64, depth: u32) -> f64 {
    let (k, err) = kronrod(f, a, b);
    if err <= abs.max(rel * k.abs()) || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, rel, abs / 2.0, depth - 1) + adapt(f, m, b, rel, abs / 2.0, depth - 1)
}

/// Adaptive G7-K15 quadrature of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel: f64, abs: f64) -> f64 {
    adapt(&mut f, a, b, rel, abs, 40)
}

/// Nested quadrature of `f(x, y)` over `x ∈ [x0, x1]`,
/// `y ∈ [y_lo(x), y_hi(x)]`.
pub fn integrate_2d<F, L, H>(
    f: F,
    (x0, x1): (f64, f64),
    y_lo: L,
    y_hi: H,
    rel: f64,
    abs: f64,
) -> f64
where
    F: Fn(f64, f64) -> f64,
    L: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    integrate(
        |x| {
            let (lo, hi) = (y_lo(x), y_hi(x));
            if hi <= lo {
                0.0
            } else {
                integrate(|y| f(x, y), lo, hi, rel, abs)
            }
        },
        x0,
        x1,
        rel,
        abs,
    )
}

pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Reference link parameters.
pub struct LinkOracle {
    pub p0_w: f64,
    pub wavelength_m: f64,
    pub waist_m: f64,
    pub area_m2: f64,
    pub eta: f64,
    pub bandwidth_hz: f64,
    pub nep: f64,
    pub ib: f64,
}

impl LinkOracle {
    pub fn table(p0_w: f64) -> Self {
        Self {
            p0_w,
            wavelength_m: 1550e-9,
            waist_m: 1e-3,
            area_m2: 1e-6,
            eta: 0.8,
            bandwidth_hz: 1e9,
            nep: 20e-12,
            ib: 5.58,
        }
    }

    /// Received power, SNR and rate with the small-aperture approximation,
    /// aligned and unrotated.
    pub fn aligned_point(&self, z_m: f64) -> (f64, f64, f64) {
        let theta = self.wavelength_m / (PI * self.waist_m);
        let zr = PI * self.waist_m * self.waist_m / self.wavelength_m;
        let w = self.waist_m * (1.0 + (z_m / zr).powi(2)).sqrt();
        debug_assert!(z_m < zr || (w - theta * z_m).abs() / w < 0.2);
        let peak = 2.0 * self.p0_w / (PI * w * w);
        let pr = peak * self.area_m2;
        let num = (pr * self.eta).powi(2);
        let den = 2.0
            * E_CHARGE
            * self.bandwidth_hz
            * (self.ib * self.area_m2 * self.eta + pr * self.eta)
            + self.nep.powi(2) * self.eta.powi(2) * self.bandwidth_hz;
        let snr = num / den;
        (pr, snr, 0.5 * self.bandwidth_hz * (1.0 + snr).log2())
    }
}

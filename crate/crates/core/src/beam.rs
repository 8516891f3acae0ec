//! TEM00 Gaussian beam with an elliptical waist at the transmitter, and the
//! power it delivers to a rectangular receiver aperture.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{Displacement, RotationAngles};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamParams {
    pub power_w: f64,
    pub wavelength_m: f64,
    pub waist_x_m: f64,
    pub waist_y_m: f64,
}

impl Default for BeamParams {
    fn default() -> Self {
        Self {
            power_w: 10e-3,
            wavelength_m: 1550e-9,
            waist_x_m: 1e-3,
            waist_y_m: 1e-3,
        }
    }
}

impl BeamParams {
    pub fn new(power_w: f64, wavelength_m: f64, waist_x_m: f64, waist_y_m: f64) -> Result<Self> {
        let beam = Self {
            power_w,
            wavelength_m,
            waist_x_m,
            waist_y_m,
        };
        beam.validate()?;
        Ok(beam)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("power_w", self.power_w)?;
        ensure_positive("wavelength_m", self.wavelength_m)?;
        ensure_positive("waist_x_m", self.waist_x_m)?;
        ensure_positive("waist_y_m", self.waist_y_m)?;
        let min_waist = self.waist_x_m.min(self.waist_y_m);
        if self.wavelength_m >= min_waist / 10.0 {
            return Err(Error::invalid(
                "wavelength_m",
                format!(
                    "must be below a tenth of the waist ({min_waist} m) for paraxial propagation"
                ),
            ));
        }
        Ok(())
    }

    pub fn with_power(self, power_w: f64) -> Self {
        Self { power_w, ..self }
    }

    /// `π W0² / λ` per axis.
    pub fn rayleigh_range_m(&self) -> (f64, f64) {
        (
            PI * self.waist_x_m.powi(2) / self.wavelength_m,
            PI * self.waist_y_m.powi(2) / self.wavelength_m,
        )
    }
}

/// Far-field half-angle divergence `λ / (π W0)` per axis.
pub fn divergence(beam: &BeamParams) -> (f64, f64) {
    (
        beam.wavelength_m / (PI * beam.waist_x_m),
        beam.wavelength_m / (PI * beam.waist_y_m),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpotMode {
    Exact,
    FarField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotSize {
    pub w_x_m: f64,
    pub w_y_m: f64,
    pub z_m: f64,
    /// Set when a far-field spot was requested inside the Rayleigh range.
    pub far_field_invalid: bool,
}

fn exact_radius(waist: f64, wavelength: f64, z: f64) -> f64 {
    waist * (1.0 + (wavelength * z / (PI * waist * waist)).powi(2)).sqrt()
}

pub fn spot_size(beam: &BeamParams, z_m: f64, mode: SpotMode) -> SpotSize {
    debug_assert!(z_m >= 0.0);
    match mode {
        SpotMode::Exact => SpotSize {
            w_x_m: exact_radius(beam.waist_x_m, beam.wavelength_m, z_m),
            w_y_m: exact_radius(beam.waist_y_m, beam.wavelength_m, z_m),
            z_m,
            far_field_invalid: false,
        },
        SpotMode::FarField => {
            let (tx, ty) = divergence(beam);
            let (zx, zy) = beam.rayleigh_range_m();
            SpotSize {
                w_x_m: tx * z_m,
                w_y_m: ty * z_m,
                z_m,
                far_field_invalid: z_m < zx.max(zy),
            }
        }
    }
}

/// Transverse intensity in W/m² at `(x_m, y_m)` on the plane `z_m`.
pub fn intensity(beam: &BeamParams, z_m: f64, x_m: f64, y_m: f64) -> f64 {
    let spot = spot_size(beam, z_m, SpotMode::Exact);
    let (wx, wy) = (spot.w_x_m, spot.w_y_m);
    2.0 * beam.power_w / (PI * wx * wy)
        * (-2.0 * x_m * x_m / (wx * wx)).exp()
        * (-2.0 * y_m * y_m / (wy * wy)).exp()
}

/// `erf(b) - erf(a)` for `a <= b`, evaluated through `erfc` in the tails
/// so that far off-axis intervals keep their relative precision.
fn erf_diff(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        libm::erfc(a) - libm::erfc(b)
    } else if b <= 0.0 {
        libm::erfc(-b) - libm::erfc(-a)
    } else {
        libm::erf(b) + libm::erf(-a)
    }
}

/// Fraction of a unit 1D Gaussian profile `exp(-2 u² / w²)` that falls in
/// `[lo, hi]`.
fn axis_fraction(lo: f64, hi: f64, w: f64) -> f64 {
    0.5 * erf_diff(SQRT_2 * lo / w, SQRT_2 * hi / w)
}

/// Power through the rectangle `[x_lo, x_hi] × [y_lo, y_hi]` at range `z_m`.
/// Infinite bounds are allowed.
pub fn power_in_rectangle(
    beam: &BeamParams,
    z_m: f64,
    (x_lo, x_hi): (f64, f64),
    (y_lo, y_hi): (f64, f64),
) -> f64 {
    let spot = spot_size(beam, z_m, SpotMode::Exact);
    beam.power_w * axis_fraction(x_lo, x_hi, spot.w_x_m) * axis_fraction(y_lo, y_hi, spot.w_y_m)
}

/// Power inside the ellipse `x²/Wx² + y²/Wy² <= scale²`. At `scale = 1` this
/// is `(1 - e⁻²) P0` at any range.
pub fn power_in_ellipse(beam: &BeamParams, scale: f64) -> f64 {
    beam.power_w * (1.0 - (-2.0 * scale * scale).exp())
}

/// Receiver collection area `len_x_m × len_y_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Aperture {
    pub len_x_m: f64,
    pub len_y_m: f64,
}

impl Default for Aperture {
    fn default() -> Self {
        Self {
            len_x_m: 1e-3,
            len_y_m: 1e-3,
        }
    }
}

impl Aperture {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("len_x_m", self.len_x_m)?;
        ensure_positive("len_y_m", self.len_y_m)
    }

    pub fn area_m2(&self) -> f64 {
        self.len_x_m * self.len_y_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMethod {
    /// Exact integral of the intensity over the aperture.
    ExactIntegral,
    /// On-center intensity times aperture area; valid for apertures much
    /// smaller than the spot.
    PointApprox,
}

/// Power collected by an aperture centred `disp` away from the beam axis and
/// rotated by `rot`. Rotation scales the result by `cos βx cos βy`.
pub fn received_power(
    beam: &BeamParams,
    z_m: f64,
    disp: &Displacement,
    rot: &RotationAngles,
    ap: &Aperture,
    method: PowerMethod,
) -> Result<f64> {
    for beta in [rot.beta_x_rad, rot.beta_y_rad] {
        if !(beta.abs() < FRAC_PI_2) {
            return Err(Error::ReceiverFacingAway(beta));
        }
    }
    let projection = rot.beta_x_rad.cos() * rot.beta_y_rad.cos();
    let collected = match method {
        PowerMethod::ExactIntegral => {
            let (hx, hy) = (ap.len_x_m / 2.0, ap.len_y_m / 2.0);
            power_in_rectangle(
                beam,
                z_m,
                (disp.dx_m - hx, disp.dx_m + hx),
                (disp.dy_m - hy, disp.dy_m + hy),
            )
        }
        // the point estimate overshoots once the aperture rivals the spot
        PowerMethod::PointApprox => {
            (intensity(beam, z_m, disp.dx_m, disp.dy_m) * ap.area_m2()).min(beam.power_w)
        }
    };
    Ok(collected * projection)
}

//! Link geometry in the follower-based frame: `z` along the transmitter
//! boresight, `x` lateral, `y` vertical. Positions in meters, angles in
//! radians.
//!
//! Vehicle 1 carries the transmitter, vehicle 2 the receiver.

use serde::{Deserialize, Serialize};

use crate::dynamics::{quantize, sample_delayed, PerturbationTrace, Quantizer};
use crate::error::{ensure_positive, Error, Result};

/// Rest geometry of a vehicle's optical unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleStatic {
    pub length_m: f64,
    pub rest_lateral_m: f64,
    pub rest_height_m: f64,
}

impl VehicleStatic {
    pub fn new(length_m: f64, rest_lateral_m: f64, rest_height_m: f64) -> Result<Self> {
        ensure_positive("length_m", length_m)?;
        ensure_positive("rest_height_m", rest_height_m)?;
        if !rest_lateral_m.is_finite() {
            return Err(Error::invalid("rest_lateral_m", "must be finite"));
        }
        Ok(Self {
            length_m,
            rest_lateral_m,
            rest_height_m,
        })
    }

    /// Pose at `t_s` with longitudinal position `z_m` and perturbations
    /// `dx_m`, `dy_m` around rest.
    pub fn state(&self, t_s: f64, z_m: f64, dx_m: f64, dy_m: f64) -> VehicleState {
        VehicleState {
            t_s,
            z_m,
            rest_lateral_m: self.rest_lateral_m,
            rest_height_m: self.rest_height_m,
            dx_m,
            dy_m,
        }
    }
}

/// Instantaneous pose. Absolute coordinates are always rest + perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub t_s: f64,
    pub z_m: f64,
    rest_lateral_m: f64,
    rest_height_m: f64,
    pub dx_m: f64,
    pub dy_m: f64,
}

impl VehicleState {
    pub fn x_m(&self) -> f64 {
        self.rest_lateral_m + self.dx_m
    }

    pub fn y_m(&self) -> f64 {
        self.rest_height_m + self.dy_m
    }

    pub fn rest_lateral_m(&self) -> f64 {
        self.rest_lateral_m
    }

    pub fn rest_height_m(&self) -> f64 {
        self.rest_height_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingAngles {
    pub azimuth_rad: f64,
    pub elevation_rad: f64,
}

/// Relative receiver rotation plus the per-vehicle angles it came from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotationAngles {
    pub beta_x_rad: f64,
    pub beta_y_rad: f64,
    pub yaw1_rad: f64,
    pub yaw2_rad: f64,
    pub pitch1_rad: f64,
    pub pitch2_rad: f64,
}

/// Receiver offset from the beam axis, in the transverse plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Displacement {
    pub dx_m: f64,
    pub dy_m: f64,
}

/// How much of the misalignment the transmitter can steer out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CompensationStrategy {
    /// Laser fixed to the chassis, pointing straight ahead.
    None,
    /// Rest positions of both vehicles are compensated.
    Static,
    /// The leader signals its perturbation every `delta_t_s` over the RF
    /// side channel; the follower compensates its own motion exactly.
    Dynamic {
        delta_t_s: f64,
        #[serde(default)]
        quantizer: Quantizer,
    },
}

impl CompensationStrategy {
    pub fn label(&self) -> &'static str {
        match self {
            CompensationStrategy::None => "none",
            CompensationStrategy::Static => "static",
            CompensationStrategy::Dynamic { .. } => "dynamic",
        }
    }

    /// Position in the canonical `none, static, dynamic` order.
    pub fn rank(&self) -> u8 {
        match self {
            CompensationStrategy::None => 0,
            CompensationStrategy::Static => 1,
            CompensationStrategy::Dynamic { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let CompensationStrategy::Dynamic {
            delta_t_s,
            quantizer,
        } = self
        {
            ensure_positive("delta_t_s", *delta_t_s)?;
            quantizer.validate().map_err(|e| e.at_key("quantizer"))?;
        }
        Ok(())
    }
}

/// Circular array of lasers with boresights spaced evenly in azimuth and
/// centered on the frontal direction, each steered by a MEMS mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaserArray {
    pub n_lasers: usize,
    pub boresight_spacing_rad: f64,
    pub mems_range_rad: f64,
}

impl Default for LaserArray {
    fn default() -> Self {
        Self {
            n_lasers: 5,
            boresight_spacing_rad: 20f64.to_radians(),
            mems_range_rad: 10f64.to_radians(),
        }
    }
}

impl LaserArray {
    pub fn validate(&self) -> Result<()> {
        if self.n_lasers == 0 {
            return Err(Error::invalid("n_lasers", "must be >= 1"));
        }
        ensure_positive("boresight_spacing_rad", self.boresight_spacing_rad)?;
        ensure_positive("mems_range_rad", self.mems_range_rad)
    }

    pub fn boresight_rad(&self, index: usize) -> f64 {
        (index as f64 - (self.n_lasers - 1) as f64 / 2.0) * self.boresight_spacing_rad
    }
}

pub fn pointing_angles(s1: &VehicleState, s2: &VehicleState) -> Result<PointingAngles> {
    let z = (s2.z_m - s1.z_m).abs();
    if !(z > 0.0) {
        return Err(Error::ZeroSeparation);
    }
    Ok(PointingAngles {
        azimuth_rad: ((s2.x_m() - s1.x_m()) / z).atan(),
        elevation_rad: ((s2.y_m() - s1.y_m()) / z).atan(),
    })
}

/// Yaw induced by a lateral stroke `dx_m` with lever arm half the vehicle
/// length.
pub fn yaw_angle(dx_m: f64, length_m: f64) -> f64 {
    debug_assert!(length_m > 0.0);
    (dx_m / (0.5 * length_m)).atan()
}

/// Pitch induced by a vertical stroke, same lever arm as [`yaw_angle`].
pub fn pitch_angle(dy_m: f64, length_m: f64) -> f64 {
    debug_assert!(length_m > 0.0);
    (dy_m / (0.5 * length_m)).atan()
}

pub fn rotation_angles(yaw1: f64, yaw2: f64, pitch1: f64, pitch2: f64) -> RotationAngles {
    RotationAngles {
        beta_x_rad: (yaw2 - yaw1).abs(),
        beta_y_rad: (pitch2 - pitch1).abs(),
        yaw1_rad: yaw1,
        yaw2_rad: yaw2,
        pitch1_rad: pitch1,
        pitch2_rad: pitch2,
    }
}

/// Rotation angles for a link under `strategy`. With dynamic compensation
/// the follower cancels its own yaw and pitch.
pub fn link_rotation(
    v1: &VehicleStatic,
    s1: &VehicleState,
    v2: &VehicleStatic,
    s2: &VehicleState,
    strategy: &CompensationStrategy,
) -> RotationAngles {
    let (yaw1, pitch1) = match strategy {
        CompensationStrategy::Dynamic { .. } => (0.0, 0.0),
        _ => (
            yaw_angle(s1.dx_m, v1.length_m),
            pitch_angle(s1.dy_m, v1.length_m),
        ),
    };
    rotation_angles(
        yaw1,
        yaw_angle(s2.dx_m, v2.length_m),
        pitch1,
        pitch_angle(s2.dy_m, v2.length_m),
    )
}

/// Leader perturbation traces available to the follower over the side
/// channel.
#[derive(Debug, Clone, Copy)]
pub struct SignalHistory<'a> {
    pub dx: &'a PerturbationTrace,
    pub dy: &'a PerturbationTrace,
}

/// Beam-to-receiver offset for the pose pair under `strategy`.
///
/// `history` is required for [`CompensationStrategy::Dynamic`] and ignored
/// otherwise.
pub fn displacement(
    v1: &VehicleStatic,
    s1: &VehicleState,
    s2: &VehicleState,
    strategy: &CompensationStrategy,
    history: Option<SignalHistory<'_>>,
) -> Result<Displacement> {
    let z = (s2.z_m - s1.z_m).abs();
    if !(z > 0.0) {
        return Err(Error::ZeroSeparation);
    }
    let tilt_x = yaw_angle(s1.dx_m, v1.length_m).tan() * z;
    let tilt_y = pitch_angle(s1.dy_m, v1.length_m).tan() * z;
    match strategy {
        CompensationStrategy::None => Ok(Displacement {
            dx_m: s2.x_m() - s1.x_m() - tilt_x,
            dy_m: s2.y_m() - s1.y_m() - tilt_y,
        }),
        CompensationStrategy::Static => Ok(Displacement {
            dx_m: s2.dx_m - s1.dx_m - tilt_x,
            dy_m: s2.dy_m - s1.dy_m - tilt_y,
        }),
        CompensationStrategy::Dynamic {
            delta_t_s,
            quantizer,
        } => {
            let history = history.ok_or(Error::MissingHistory)?;
            let held_x = sample_delayed(history.dx, s2.t_s, *delta_t_s)?;
            let held_y = sample_delayed(history.dy, s2.t_s, *delta_t_s)?;
            Ok(Displacement {
                dx_m: s2.dx_m - quantize(held_x, quantizer),
                dy_m: s2.dy_m - quantize(held_y, quantizer),
            })
        }
    }
}

/// Picks the array element closest to `azimuth_rad` (lowest index on ties)
/// and the residual mirror steering `azimuth - boresight`.
pub fn select_laser(azimuth_rad: f64, array: &LaserArray) -> Result<(usize, f64)> {
    array.validate()?;
    let mut best = (0, azimuth_rad - array.boresight_rad(0));
    for i in 1..array.n_lasers {
        let residual = azimuth_rad - array.boresight_rad(i);
        if residual.abs() < best.1.abs() {
            best = (i, residual);
        }
    }
    if !(best.1.abs() <= array.mems_range_rad) {
        return Err(Error::UnreachableAzimuth {
            azimuth_rad,
            residual_rad: best.1,
            range_rad: array.mems_range_rad,
        });
    }
    Ok(best)
}

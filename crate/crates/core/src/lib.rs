//! Link-level simulator for laser vehicle-to-vehicle links.
//!
//! The transmitter rides on a follower vehicle and the receiver on the
//! leader. Road-induced strokes tilt both vehicles, which displaces the
//! Gaussian beam from the receiver aperture and rotates the aperture away
//! from the beam. The crate models the geometry, beam propagation,
//! photodetection, stroke processes and the RF signaling used to steer the
//! laser, and sweeps the resulting throughput over distance, power and
//! compensation strategy.

// `!(x < y)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam;
pub mod cli;
pub mod config;
pub mod dynamics;
mod error;
pub mod geometry;
pub mod receiver;
pub mod sim;

pub use error::{Error, Result};

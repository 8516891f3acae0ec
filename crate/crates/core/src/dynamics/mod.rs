//! Vehicle stroke processes and the RF signaling side channel.
//!
//! Perturbations are modeled as stationary autoregressive processes sampled
//! at a fixed rate, or as measured traces loaded from disk. The signaling
//! channel delivers the leader's perturbation to the follower every `ΔT`
//! seconds, quantized to a fixed bit depth, and the follower holds the last
//! received value between updates.

mod ar;
mod signaling;
mod trace;

use std::sync::OnceLock;

pub use ar::{ar_fit, ar_generate, is_stationary, ArModel, WARM_UP_PER_ORDER};
pub use signaling::{
    quantize, sample_delayed, signaling_instant, signaling_overhead, Quantizer, QuantizerMode,
};
pub use trace::{PerturbationTrace, TraceAxis};

/// Bundled 200 s synthetic vertical-stroke trace at 100 Hz.
pub const REFERENCE_TRACE_CSV: &str = include_str!("../../data/reference_dy.csv");

/// Order of the default perturbation model.
pub const DEFAULT_AR_ORDER: usize = 10;

/// The bundled reference trace.
pub fn reference_trace() -> &'static PerturbationTrace {
    static TRACE: OnceLock<PerturbationTrace> = OnceLock::new();
    TRACE.get_or_init(|| {
        PerturbationTrace::from_csv_str(REFERENCE_TRACE_CSV, "bundled reference trace")
            .expect("bundled reference trace is well formed")
            .0
    })
}

/// AR(10) model fitted to [`reference_trace`]; the default stroke process.
pub fn default_model() -> &'static ArModel {
    static MODEL: OnceLock<ArModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        ar_fit(reference_trace(), DEFAULT_AR_ORDER)
            .expect("reference trace yields a stationary fit")
    })
}

/// Derives an independent 64-bit seed for `stream` from a master seed
/// (splitmix64 finalizer).
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

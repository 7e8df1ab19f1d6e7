//! Frozen constants for the `≲` verdicts.
//!
//! Fitted values are `freeze(max ratio)` over the calibration corpus; the
//! `recalibration` tests refit and fail if the corpus or the code drifts.

use std::ops::Range;

/// Per-side content floor `η / C_SPLIT` in the splitting check.
pub const C_SPLIT: f64 = 8.0;

/// Line-count constant: `#ℒ_k ≤ C_LEM · (b_{k-1}/b_k) · s_k^{-1} · (#J_k)²`.
pub const C_LEM: f64 = 0.51;

/// `N_k (a_k / 𝔥(2^{-k}))² ≤ C_TWO_LOWER · #𝒯_k`.
pub const C_TWO_LOWER: f64 = 60.0;

/// `#𝒯_k ≤ C_TWO_UPPER · (#J_k)² / 𝔥^{-1}(r a_k)`.
pub const C_TWO_UPPER: f64 = 0.025;

/// Headroom applied to a fitted maximum before freezing.
pub const CALIBRATION_SLACK: f64 = 1.5;

/// Box-dimension tolerance for the Furstenberg bounds.
pub const BOUND_TOL: f64 = 0.1;

/// Series statistics above this are read as convergent.
pub const SERIES_CONVERGE: f64 = 1.01;

/// Series statistics below this are read as divergent.
pub const SERIES_DIVERGE: f64 = 0.99;

pub const CALIBRATION_SEEDS: Range<u64> = 0..100;

pub const FRESH_SEEDS: Range<u64> = 1000..1100;

/// `(α, β)` pairs of the two-way corpus; each is built as a fan and with
/// random offsets (seed [`TWO_WAY_OFFSET_SEED`]) at [`TWO_WAY_RESOLUTION`].
pub const TWO_WAY_CORPUS: [(f64, f64); 5] =
    [(0.5, 1.0), (0.7, 0.8), (0.4, 0.6), (1.0, 0.5), (0.6, 1.0)];

pub const TWO_WAY_SCALES: Range<u32> = 3..7;

pub const TWO_WAY_RESOLUTION: u32 = 10;

pub const TWO_WAY_OFFSET_SEED: u64 = 7;

/// Largest `|Π_k|` cross-checked against the naive enumerator.
pub const NAIVE_LIMIT: usize = 10_000;

/// `slack · x` rounded up to two significant digits.
pub fn freeze(x: f64) -> f64 {
    let y = CALIBRATION_SLACK * x;
    if !(y > 0.0) {
        return 0.0;
    }
    let scale = 10f64.powi(y.log10().floor() as i32 - 1);
    (y / scale - 1e-9).ceil() * scale
}

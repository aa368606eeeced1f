//! Standard normal CDF, density and tail helpers.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

/// `√(2π)`.
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Beyond this point the scaled tail switches to the Mills-ratio fraction.
pub const SCALED_TAIL_CUTOVER: f64 = 6.0;

const MILLS_TERMS: u32 = 120;

pub fn normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / SQRT_2PI
}

/// `Φ(x)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `1 - Φ(x)`, accurate far into the upper tail.
pub fn upper_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `e^{t²/2} (1 - Φ(t))` for `t >= 0`, without forming either factor
/// separately once `t` exceeds [`SCALED_TAIL_CUTOVER`].
///
/// Negative `t` is evaluated directly and overflows for `t < -38`.
pub fn scaled_upper_tail(t: f64) -> f64 {
    if t <= SCALED_TAIL_CUTOVER {
        return libm::exp(0.5 * t * t) * upper_tail(t);
    }
    // 1 - Φ(t) = φ(t) / (t + 1/(t + 2/(t + 3/(t + ...)))), evaluated bottom-up.
    let mut v = t;
    for k in (1..=MILLS_TERMS).rev() {
        v = t + f64::from(k) / v;
    }
    1.0 / (SQRT_2PI * v)
}

/// `∫_{-∞}^t Φ(s) ds = tΦ(t) + φ(t)`; by symmetry `cdf_integral(-t)` is
/// `∫_t^∞ (1 - Φ(s)) ds`.
pub fn cdf_integral(t: f64) -> f64 {
    t * normal_cdf(t) + normal_pdf(t)
}

/// `E|Z| = √(2/π)`.
pub fn mean_abs_normal() -> f64 {
    libm::sqrt(2.0 / PI)
}

//! Stein equation solutions, test-function families and normal bounds.

use crate::error::{Error, Result};
use crate::normal::{mean_abs_normal, normal_cdf, normal_pdf, scaled_upper_tail, upper_tail, SQRT_2PI};

/// `1/√(2π) + √(2π)/4 + 1`, the multiplier of `δ` in the Kolmogorov bound.
pub const KOLMOGOROV_DELTA_CONSTANT: f64 = 1.0 / SQRT_2PI + SQRT_2PI / 4.0 + 1.0;

/// `sup_w f_z(w)` over all `z`, attained at `z = w = 0`.
pub const STEIN_SOLUTION_SUP: f64 = SQRT_2PI / 4.0;

/// Bounded solution of `f'(w) - w f(w) = 1(w <= z) - Φ(z)`:
/// `√(2π) e^{w²/2} [Φ(w)(1-Φ(z)) 1(w <= z) + Φ(z)(1-Φ(w)) 1(w > z)]`.
///
/// Every `e^{w²/2}` is paired with a tail probability through
/// [`scaled_upper_tail`] or with an `e^{-z²/2}` with `|z| >= |w|`, so the
/// result is finite and accurate for `|w|, |z|` up to 100.
pub fn stein_solution(z: f64, w: f64) -> f64 {
    if w <= z {
        if w >= 0.0 {
            SQRT_2PI * normal_cdf(w) * scaled_upper_tail(z) * libm::exp(0.5 * (w * w - z * z))
        } else {
            SQRT_2PI * scaled_upper_tail(-w) * upper_tail(z)
        }
    } else if w >= 0.0 {
        SQRT_2PI * normal_cdf(z) * scaled_upper_tail(w)
    } else {
        SQRT_2PI * upper_tail(w) * scaled_upper_tail(-z) * libm::exp(0.5 * (w * w - z * z))
    }
}

/// `f_z'(w) = w f_z(w) + 1(w <= z) - Φ(z)`; at the kink `w = z` this is the
/// left limit.
pub fn stein_solution_derivative(z: f64, w: f64) -> f64 {
    let indicator = if w <= z { 1.0 } else { 0.0 };
    w * stein_solution(z, w) + indicator - normal_cdf(z)
}

/// Wasserstein and Kolmogorov bounds from `E|W* - W|`, `E|1 - E[GD|W]|` and an
/// almost-sure bound `δ >= |W* - W|`.
pub fn theorem_bounds(e_abs_diff: f64, e_abs_one_minus_gd: f64, delta: f64) -> Result<(f64, f64)> {
    for (name, v) in [
        ("e_abs_diff", e_abs_diff),
        ("e_abs_one_minus_gd", e_abs_one_minus_gd),
        ("delta", delta),
    ] {
        if v.is_nan() || v < 0.0 {
            return Err(Error::NegativeInput { name });
        }
    }
    let wasserstein = 2.0 * e_abs_diff + mean_abs_normal() * e_abs_one_minus_gd;
    let kolmogorov = KOLMOGOROV_DELTA_CONSTANT * delta + e_abs_one_minus_gd;
    Ok((wasserstein, kolmogorov))
}

/// Test functions spanning the classes behind the Wasserstein and
/// Kolmogorov metrics.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunctionFamily {
    /// `w^k` for `k = 0..=max_degree`.
    Monomials { max_degree: u32 },
    /// Ramps from 1 at `z` to 0 at `z + 1`, one per grid point.
    SmoothedIndicators { grid: alloc::vec::Vec<f64> },
    /// A fixed set of 1-Lipschitz functions.
    LipschitzSuite,
}

/// A single member of a [`TestFunctionFamily`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    Monomial(u32),
    SmoothedIndicator { z: f64 },
    AbsShift { c: f64 },
    Sine,
    Clamp,
}

/// Width of the linear ramp in [`TestFunction::SmoothedIndicator`].
pub const RAMP_WIDTH: f64 = 1.0;

impl TestFunctionFamily {
    pub fn members(&self) -> alloc::vec::Vec<TestFunction> {
        match self {
            Self::Monomials { max_degree } => (0..=*max_degree).map(TestFunction::Monomial).collect(),
            Self::SmoothedIndicators { grid } => {
                grid.iter().map(|&z| TestFunction::SmoothedIndicator { z }).collect()
            }
            Self::LipschitzSuite => alloc::vec![
                TestFunction::AbsShift { c: 0.0 },
                TestFunction::AbsShift { c: 1.0 },
                TestFunction::AbsShift { c: -0.5 },
                TestFunction::Sine,
                TestFunction::Clamp,
            ],
        }
    }
}

impl TestFunction {
    pub fn eval(&self, w: f64) -> f64 {
        match *self {
            Self::Monomial(k) => libm::pow(w, f64::from(k)),
            Self::SmoothedIndicator { z } => ((z + RAMP_WIDTH - w) / RAMP_WIDTH).clamp(0.0, 1.0),
            Self::AbsShift { c } => libm::fabs(w - c),
            Self::Sine => libm::sin(w),
            Self::Clamp => w.clamp(-1.0, 1.0),
        }
    }

    /// Lipschitz constant; infinite for monomials of degree two or more.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            Self::Monomial(0) => 0.0,
            Self::Monomial(1) => 1.0,
            Self::Monomial(_) => f64::INFINITY,
            Self::SmoothedIndicator { .. } => 1.0 / RAMP_WIDTH,
            _ => 1.0,
        }
    }

    /// `E h(Z)` for `Z ~ N(0, 1)`.
    pub fn normal_expectation(&self) -> f64 {
        match *self {
            Self::Monomial(k) if k % 2 == 1 => 0.0,
            Self::Monomial(k) => (1..k).step_by(2).map(f64::from).product(),
            Self::SmoothedIndicator { z } => {
                let b = z + RAMP_WIDTH;
                let ramp = (b * (normal_cdf(b) - normal_cdf(z)) + normal_pdf(b) - normal_pdf(z)) / RAMP_WIDTH;
                normal_cdf(z) + ramp
            }
            Self::AbsShift { c } => 2.0 * normal_pdf(c) + c * (2.0 * normal_cdf(c) - 1.0),
            Self::Sine | Self::Clamp => 0.0,
        }
    }
}

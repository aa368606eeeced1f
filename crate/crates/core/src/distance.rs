//! Kolmogorov and Wasserstein distances to a normal law.
//!
//! Every supported law has a piecewise-linear CDF with jumps, so both
//! distances are computed in closed form piece by piece: on a piece with
//! slope `b` (in standardized units) the difference `F - Φ` has critical
//! points where `φ(t) = b`, it is concave left of zero and convex right of
//! it, and `Φ` has the antiderivative `tΦ(t) + φ(t)`.

use alloc::vec::Vec;

use crate::distribution::FiniteDistribution;
use crate::error::{Error, Result};
use crate::mixture::SegmentMixture;
use crate::normal::{cdf_integral, normal_cdf, SQRT_2PI};
use crate::scalar::Scalar;

/// Confidence level of the reported Monte Carlo bands.
pub const CI_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceReport {
    pub kolmogorov: f64,
    pub wasserstein: f64,
    /// Zero in exact mode.
    pub kolmogorov_ci_halfwidth: f64,
    pub wasserstein_ci_halfwidth: f64,
    pub mode: DistanceMode,
}

impl DistanceReport {
    /// Rescales the Wasserstein fields, e.g. by `1/σ` to pass from `Y` to the
    /// standardized `(Y - μ)/σ`. The Kolmogorov distance is scale free.
    pub fn scale_wasserstein(self, factor: f64) -> Self {
        Self {
            wasserstein: self.wasserstein * factor,
            wasserstein_ci_halfwidth: self.wasserstein_ci_halfwidth * factor,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Knot {
    x: f64,
    /// `F(x-)`.
    left: f64,
    /// `F(x)`.
    right: f64,
    /// Slope of `F` on `(x, next x)`; zero after the last knot.
    slope: f64,
}

/// A CDF that is linear between knots and may jump at them; zero before the
/// first knot and one after the last.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCdf {
    knots: Vec<Knot>,
}

/// Laws whose CDF can be written as a [`PiecewiseCdf`].
pub trait CdfSource {
    fn piecewise_cdf(&self) -> PiecewiseCdf;
}

impl<S: Scalar> CdfSource for FiniteDistribution<S> {
    fn piecewise_cdf(&self) -> PiecewiseCdf {
        let mut acc = S::zero();
        let knots = self
            .atoms()
            .iter()
            .map(|(v, p)| {
                let left = acc.to_f64();
                acc = acc.clone() + p.clone();
                Knot { x: v.to_f64(), left, right: acc.to_f64(), slope: 0.0 }
            })
            .collect();
        PiecewiseCdf { knots }
    }
}

impl<S: Scalar> CdfSource for SegmentMixture<S> {
    fn piecewise_cdf(&self) -> PiecewiseCdf {
        let mut points: Vec<S> = self
            .atoms()
            .iter()
            .map(|(v, _)| v.clone())
            .chain(self.segments().iter().flat_map(|s| [s.lo.clone(), s.hi.clone()]))
            .collect();
        points.sort_by(|a, b| crate::distribution::cmp_scalar(a, b));
        points.dedup();
        let knots = points
            .iter()
            .map(|x| {
                let right = self.cdf(x);
                let jump = self
                    .atoms()
                    .iter()
                    .filter(|(v, _)| v == x)
                    .fold(S::zero(), |acc, (_, p)| acc + p.clone());
                let slope = self
                    .segments()
                    .iter()
                    .filter(|s| s.lo <= *x && *x < s.hi)
                    .fold(S::zero(), |acc, s| acc + s.density());
                Knot {
                    x: x.to_f64(),
                    left: (right.clone() - jump).to_f64(),
                    right: right.to_f64(),
                    slope: slope.to_f64(),
                }
            })
            .collect();
        PiecewiseCdf { knots }
    }
}

impl CdfSource for PiecewiseCdf {
    fn piecewise_cdf(&self) -> PiecewiseCdf {
        self.clone()
    }
}

impl PiecewiseCdf {
    /// Empirical CDF of samples already sorted ascending.
    pub fn from_sorted_samples(sorted: &[f64]) -> Result<Self> {
        if sorted.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidValue);
        }
        let n = sorted.len() as f64;
        let mut knots: Vec<Knot> = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let x = sorted[i];
            let start = i;
            while i < sorted.len() && sorted[i] == x {
                i += 1;
            }
            knots.push(Knot { x, left: start as f64 / n, right: i as f64 / n, slope: 0.0 });
        }
        Ok(Self { knots })
    }

    /// `F(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.knots.partition_point(|k| k.x <= x);
        if idx == 0 {
            return 0.0;
        }
        let k = &self.knots[idx - 1];
        k.right + k.slope * (x - k.x)
    }

    fn standardized(&self, mu: f64, sigma: f64) -> Vec<Knot> {
        self.knots
            .iter()
            .map(|k| Knot { x: (k.x - mu) / sigma, left: k.left, right: k.right, slope: k.slope * sigma })
            .collect()
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidParameter { name: "sigma" });
    }
    Ok(())
}

/// Points `t` with `φ(t) = b`, if any.
fn critical_offset(b: f64) -> Option<f64> {
    let level = b * SQRT_2PI;
    if b > 0.0 && level < 1.0 {
        Some(libm::sqrt(-2.0 * libm::log(level)))
    } else {
        None
    }
}

/// `sup_x |F(x) - Φ((x - μ)/σ)|`.
pub fn kolmogorov_vs_normal<D: CdfSource + ?Sized>(dist: &D, mu: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(kolmogorov_std(&dist.piecewise_cdf().standardized(mu, sigma)))
}

fn kolmogorov_std(knots: &[Knot]) -> f64 {
    let mut sup: f64 = 0.0;
    for (idx, k) in knots.iter().enumerate() {
        let phi = normal_cdf(k.x);
        sup = sup.max(libm::fabs(k.left - phi)).max(libm::fabs(k.right - phi));
        let Some(next) = knots.get(idx + 1) else { continue };
        if let Some(r) = critical_offset(k.slope) {
            for t in [-r, r] {
                if t > k.x && t < next.x {
                    sup = sup.max(libm::fabs(k.right + k.slope * (t - k.x) - normal_cdf(t)));
                }
            }
        }
    }
    sup
}

/// `∫ |F(x) - Φ((x - μ)/σ)| dx`.
pub fn wasserstein_vs_normal<D: CdfSource + ?Sized>(dist: &D, mu: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(sigma * wasserstein_std(&dist.piecewise_cdf().standardized(mu, sigma)))
}

/// `∫_u^v Φ`, for `[u, v]` on one side of zero.
fn phi_integral(u: f64, v: f64) -> f64 {
    if u >= 0.0 {
        (v - u) - (cdf_integral(-u) - cdf_integral(-v))
    } else {
        cdf_integral(v) - cdf_integral(u)
    }
}

fn wasserstein_std(knots: &[Knot]) -> f64 {
    let (Some(first), Some(last)) = (knots.first(), knots.last()) else {
        return 0.0;
    };
    let mut total = cdf_integral(first.x) + cdf_integral(-last.x);
    let mut cuts: Vec<f64> = Vec::with_capacity(5);
    for pair in knots.windows(2) {
        let (k, next) = (&pair[0], &pair[1]);
        let diff = |t: f64| k.right + k.slope * (t - k.x) - normal_cdf(t);
        let linear_integral = |u: f64, v: f64| (v - u) * (k.right + k.slope * (0.5 * (u + v) - k.x));
        cuts.clear();
        cuts.push(k.x);
        let interior = |t: f64, cuts: &mut Vec<f64>| {
            if t > k.x && t < next.x {
                cuts.push(t);
            }
        };
        interior(0.0, &mut cuts);
        if let Some(r) = critical_offset(k.slope) {
            interior(-r, &mut cuts);
            interior(r, &mut cuts);
        }
        cuts.push(next.x);
        cuts.sort_by(|a, b| a.total_cmp(b));
        for w in cuts.windows(2) {
            let (u, v) = (w[0], w[1]);
            let (du, dv) = (diff(u), diff(v));
            let pieces: [(f64, f64); 2] = if du * dv < 0.0 {
                let root = bisect(&diff, u, v, du);
                [(u, root), (root, v)]
            } else {
                [(u, v), (v, v)]
            };
            for (a, b) in pieces {
                if b > a {
                    total += libm::fabs(linear_integral(a, b) - phi_integral(a, b));
                }
            }
        }
    }
    total
}

/// Root of a monotone `f` on `[lo, hi]` given `f(lo)`, to full precision.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let positive_at_lo = f_lo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Both distances of an exactly known law.
pub fn exact_distances<D: CdfSource + ?Sized>(dist: &D, mu: f64, sigma: f64) -> Result<DistanceReport> {
    check_sigma(sigma)?;
    let knots = dist.piecewise_cdf().standardized(mu, sigma);
    Ok(DistanceReport {
        kolmogorov: kolmogorov_std(&knots),
        wasserstein: sigma * wasserstein_std(&knots),
        kolmogorov_ci_halfwidth: 0.0,
        wasserstein_ci_halfwidth: 0.0,
        mode: DistanceMode::Exact,
    })
}

/// Dvoretzky–Kiefer–Wolfowitz half-width `√(ln(2/α)/(2n))` at level
/// [`CI_LEVEL`].
pub fn dkw_halfwidth(n: usize) -> f64 {
    libm::sqrt(libm::log(2.0 / (1.0 - CI_LEVEL)) / (2.0 * n as f64))
}

/// Distances of the empirical law of `samples` to `N(μ, σ²)`.
///
/// The Wasserstein band is the DKW half-width times the sample range, the
/// most `∫|F̂ - F|` can be over that range inside the DKW band.
pub fn empirical_distances(samples: &[f64], mu: f64, sigma: f64) -> Result<DistanceReport> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    empirical_distances_sorted(&sorted, mu, sigma)
}

/// [`empirical_distances`] for samples already sorted ascending.
pub fn empirical_distances_sorted(sorted: &[f64], mu: f64, sigma: f64) -> Result<DistanceReport> {
    if sorted.len() < 2 {
        return Err(Error::TooFewSamples { got: sorted.len() });
    }
    let cdf = PiecewiseCdf::from_sorted_samples(sorted)?;
    let mut report = exact_distances(&cdf, mu, sigma)?;
    let eps = dkw_halfwidth(sorted.len());
    report.kolmogorov_ci_halfwidth = eps;
    report.wasserstein_ci_halfwidth = eps * (sorted[sorted.len() - 1] - sorted[0]);
    report.mode = DistanceMode::MonteCarlo;
    Ok(report)
}

//! Zbest triples `(W'', W', G)` over finite laws.
//!
//! A triple is zbest for a target `W` with mean `μ` under a measure `Q` when
//! `E[(W-μ) f(W)] = E_Q[G (f(W'') - f(W'))]`. Reweighting `Q` by a
//! nonnegative unit-mean factor `R` and dividing `G` by `R` preserves that
//! identity; choosing `R = DG/σ²` with `D = W'' - W'` turns the uniform
//! interpolation `U W'' + (1-U) W'` into the `W`-zero-bias law.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::distribution::{check_prob, check_total, cmp_scalar, FiniteDistribution};
use crate::error::{Error, Result};
use crate::mixture::{Segment, SegmentMixture};
use crate::scalar::Scalar;

/// Degree up to which constructors check the zbest identity on monomials.
pub const IDENTITY_CHECK_DEGREE: u32 = 5;

/// Float-mode tolerance for the monomial identity, relative to the size of
/// the terms involved.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Float-mode tolerance for `Σ prob·r = 1` in [`ZbestTripleLaw::bias_by_r`].
pub const REWEIGHT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TripleAtom<S> {
    pub w_pp: S,
    pub w_p: S,
    pub g: S,
    pub prob: S,
}

impl<S: Scalar> TripleAtom<S> {
    pub fn new(w_pp: S, w_p: S, g: S, prob: S) -> Self {
        Self { w_pp, w_p, g, prob }
    }

    /// `D = W'' - W'`.
    pub fn d(&self) -> S {
        self.w_pp.clone() - self.w_p.clone()
    }

    pub fn dg(&self) -> S {
        self.d() * self.g.clone()
    }
}

/// Finite joint law of a zbest triple together with its target law.
#[derive(Debug, Clone, PartialEq)]
pub struct ZbestTripleLaw<S> {
    atoms: Vec<TripleAtom<S>>,
    target: FiniteDistribution<S>,
    mu: S,
    sigma2: S,
}

impl<S: Scalar> ZbestTripleLaw<S> {
    /// Builds a triple law and checks the zbest identity on `w^k`, `k <= 5`.
    pub fn new(atoms: Vec<TripleAtom<S>>, target: FiniteDistribution<S>) -> Result<Self> {
        let law = Self::new_unverified(atoms, target)?;
        law.check_identity(IDENTITY_CHECK_DEGREE)?;
        Ok(law)
    }

    /// Like [`ZbestTripleLaw::new`] but skips the identity check, so that
    /// deliberately broken triples can be inspected.
    pub fn new_unverified(atoms: Vec<TripleAtom<S>>, target: FiniteDistribution<S>) -> Result<Self> {
        let mut total = S::zero();
        for a in &atoms {
            if a.w_pp.is_nan() || a.w_p.is_nan() || a.g.is_nan() {
                return Err(Error::InvalidValue);
            }
            check_prob(&a.prob)?;
            total = total + a.prob.clone();
        }
        check_total(&total)?;
        let mu = target.mean();
        let sigma2 = target.variance();
        if !(sigma2 > S::zero()) {
            return Err(Error::ZeroVariance);
        }
        let atoms = atoms.into_iter().filter(|a| !a.prob.is_zero()).collect();
        Ok(Self { atoms, target, mu, sigma2 })
    }

    /// The trivial triple `(W, 0, W)` for a mean-zero `W`.
    pub fn trivial(target: FiniteDistribution<S>) -> Result<Self> {
        let mean = target.mean();
        if !mean.within(&S::zero(), crate::distribution::MASS_TOLERANCE) {
            return Err(Error::NonzeroMean { mean: mean.to_f64() });
        }
        let atoms = target
            .atoms()
            .iter()
            .map(|(w, p)| TripleAtom::new(w.clone(), S::zero(), w.clone(), p.clone()))
            .collect();
        Self::new(atoms, target)
    }

    pub fn atoms(&self) -> &[TripleAtom<S>] {
        &self.atoms
    }

    pub fn target(&self) -> &FiniteDistribution<S> {
        &self.target
    }

    pub fn mu(&self) -> &S {
        &self.mu
    }

    pub fn sigma2(&self) -> &S {
        &self.sigma2
    }

    /// Both sides of the identity for `f(w) = w^k`, plus a magnitude used to
    /// scale float tolerances.
    fn identity_sides(&self, k: u32) -> (S, S, S) {
        let lhs = self
            .target
            .expect(|w| (w.clone() - self.mu.clone()) * w.powi(k));
        let scale = self
            .target
            .expect(|w| ((w.clone() - self.mu.clone()) * w.powi(k)).abs());
        let rhs = self.atoms.iter().fold(S::zero(), |acc, a| {
            acc + a.prob.clone() * a.g.clone() * (a.w_pp.powi(k) - a.w_p.powi(k))
        });
        (lhs, rhs, scale)
    }

    fn check_identity(&self, degree_max: u32) -> Result<()> {
        for k in 0..=degree_max {
            let (lhs, rhs, scale) = self.identity_sides(k);
            let tol = IDENTITY_TOLERANCE * (1.0 + scale.to_f64());
            if !lhs.within(&rhs, tol) {
                return Err(Error::NotZbest { degree: k, residual: (lhs - rhs).abs().to_f64() });
            }
        }
        Ok(())
    }

    /// `max_{k=1..degree_max} |E[(W-μ)W^k] - E_Q[G((W'')^k - (W')^k)]|`.
    ///
    /// # Panics
    ///
    /// If `degree_max == 0`.
    pub fn verify_zbest_identity(&self, degree_max: u32) -> S {
        assert!(degree_max >= 1, "degree_max must be at least 1");
        (1..=degree_max)
            .map(|k| {
                let (lhs, rhs, _) = self.identity_sides(k);
                (lhs - rhs).abs()
            })
            .fold(S::zero(), S::max_of)
    }

    /// `E_Q[DG]`, which equals `σ²` for every zbest triple.
    pub fn expected_dg(&self) -> S {
        self.atoms
            .iter()
            .fold(S::zero(), |acc, a| acc + a.prob.clone() * a.dg())
    }

    /// Changes measure to `dP† = R dQ` and replaces `G` by `G/R`.
    ///
    /// Atoms with `R = 0` are dropped; they must have `D = 0`.
    pub fn bias_by_r(&self, r: &[S]) -> Result<Self> {
        if r.len() != self.atoms.len() {
            return Err(Error::LengthMismatch {
                what: "reweighting factors",
                expected: self.atoms.len(),
                got: r.len(),
            });
        }
        let mut total = S::zero();
        for (index, (a, ri)) in self.atoms.iter().zip(r).enumerate() {
            if ri.is_nan() || *ri < S::zero() {
                return Err(Error::NegativeWeight { index, value: ri.to_f64() });
            }
            if ri.is_zero() && !a.d().is_zero() {
                return Err(Error::SupportViolation { index });
            }
            total = total + a.prob.clone() * ri.clone();
        }
        if !total.within(&S::one(), REWEIGHT_TOLERANCE) {
            return Err(Error::NotNormalized { total: total.to_f64() });
        }
        let atoms = self
            .atoms
            .iter()
            .zip(r)
            .filter(|(_, ri)| !ri.is_zero())
            .map(|(a, ri)| TripleAtom {
                w_pp: a.w_pp.clone(),
                w_p: a.w_p.clone(),
                g: a.g.clone() / ri.clone(),
                prob: a.prob.clone() * ri.clone(),
            })
            .collect();
        Ok(Self {
            atoms,
            target: self.target.clone(),
            mu: self.mu.clone(),
            sigma2: self.sigma2.clone(),
        })
    }

    /// Law of `U W'' + (1-U) W'` under the triple's measure: a segment per
    /// atom with `D != 0`, a point mass per atom with `D = 0`.
    pub fn interpolation_law(&self) -> SegmentMixture<S> {
        let mut atoms = Vec::new();
        let mut segments = Vec::new();
        for a in &self.atoms {
            if a.w_pp == a.w_p {
                atoms.push((a.w_p.clone(), a.prob.clone()));
            } else {
                let (lo, hi) = if a.w_pp < a.w_p {
                    (a.w_pp.clone(), a.w_p.clone())
                } else {
                    (a.w_p.clone(), a.w_pp.clone())
                };
                segments.push(Segment { lo, hi, prob: a.prob.clone() });
            }
        }
        SegmentMixture::from_parts(atoms, segments)
    }

    /// The `W`-zero-bias law obtained by biasing with `R = DG/σ²`.
    pub fn zero_bias_via_dg(&self) -> Result<SegmentMixture<S>> {
        let mut r = Vec::with_capacity(self.atoms.len());
        for (index, a) in self.atoms.iter().enumerate() {
            let dg = a.dg();
            if dg < S::zero() {
                return Err(Error::SignViolation { index, value: dg.to_f64() });
            }
            if a.g.is_zero() && !a.d().is_zero() {
                return Err(Error::SupportViolation { index });
            }
            r.push(dg / self.sigma2.clone());
        }
        Ok(self.bias_by_r(&r)?.interpolation_law())
    }

    /// Zero-bias law from a monotone size-bias triple `(W^s, W, μ)`, biasing
    /// by `R = (W'' - W')/E[W'' - W']`.
    pub fn monotone_sizebias_to_zerobias(&self) -> Result<SegmentMixture<S>> {
        for (index, a) in self.atoms.iter().enumerate() {
            if !a.g.within(&self.mu, REWEIGHT_TOLERANCE) {
                return Err(Error::NonconstantGain { index });
            }
            if a.w_pp < a.w_p {
                return Err(Error::NotMonotone { index, w_pp: a.w_pp.to_f64(), w_p: a.w_p.to_f64() });
            }
        }
        let mean_d = self
            .atoms
            .iter()
            .fold(S::zero(), |acc, a| acc + a.prob.clone() * a.d());
        if !(mean_d > S::zero()) {
            return Err(Error::ZeroVariance);
        }
        let r: Vec<S> = self.atoms.iter().map(|a| a.d() / mean_d.clone()).collect();
        Ok(self.bias_by_r(&r)?.interpolation_law())
    }
}

/// `u·w_pp + (1-u)·w_p`.
pub fn interpolate_sample<S: Scalar>(w_pp: S, w_p: S, u: S) -> S {
    u.clone() * w_pp + (S::one() - u) * w_p
}

/// Zero-bias law of a mean-zero `W` via square biasing: `W* = U·W□` with
/// `dP□ = w²/σ² dP`.
pub fn square_bias_zero_bias<S: Scalar>(dist: &FiniteDistribution<S>) -> Result<SegmentMixture<S>> {
    let mean = dist.mean();
    if !mean.within(&S::zero(), crate::distribution::MASS_TOLERANCE) {
        return Err(Error::NonzeroMean { mean: mean.to_f64() });
    }
    let sigma2 = dist.variance();
    if !(sigma2 > S::zero()) {
        return Err(Error::ZeroVariance);
    }
    let segments = dist
        .atoms()
        .iter()
        .filter(|(w, _)| !w.is_zero())
        .map(|(w, p)| {
            let prob = w.clone() * w.clone() * p.clone() / sigma2.clone();
            if *w < S::zero() {
                Segment { lo: w.clone(), hi: S::zero(), prob }
            } else {
                Segment { lo: S::zero(), hi: w.clone(), prob }
            }
        })
        .collect();
    Ok(SegmentMixture::from_parts(Vec::new(), segments))
}

/// Density of the `W`-zero-bias law at `w`: `E[(W-μ) 1(W > w)]/σ²`.
pub fn zero_bias_density_oracle<S: Scalar>(dist: &FiniteDistribution<S>, w: &S) -> Result<S> {
    let mu = dist.mean();
    let sigma2 = dist.variance();
    if !(sigma2 > S::zero()) {
        return Err(Error::ZeroVariance);
    }
    let tail = dist
        .atoms()
        .iter()
        .filter(|(v, _)| v > w)
        .fold(S::zero(), |acc, (v, p)| acc + (v.clone() - mu.clone()) * p.clone());
    Ok(tail / sigma2)
}

/// CDF of the `W`-zero-bias law, integrating the density oracle exactly
/// (it is constant between consecutive atoms).
pub fn zero_bias_oracle_cdf<S: Scalar>(dist: &FiniteDistribution<S>, x: &S) -> Result<S> {
    let values: Vec<&S> = dist.atoms().iter().map(|(v, _)| v).collect();
    let mut acc = S::zero();
    for pair in values.windows(2) {
        let (a, b) = (pair[0].clone(), pair[1].clone());
        if *x <= a {
            break;
        }
        let upper = if *x < b { x.clone() } else { b.clone() };
        let mid = (a.clone() + b.clone()) / S::from_int(2);
        acc = acc + zero_bias_density_oracle(dist, &mid)? * (upper - a);
    }
    if values.len() < 2 {
        return Err(Error::ZeroVariance);
    }
    Ok(acc)
}

/// `max_{k=1..degree_max} |E[(W-μ)W^k] - σ² E[k (W*)^(k-1)]|` for a
/// candidate zero-bias law `mixture` of `target`.
pub fn zero_bias_residual<S: Scalar>(
    target: &FiniteDistribution<S>,
    mixture: &SegmentMixture<S>,
    degree_max: u32,
) -> S {
    let mu = target.mean();
    let sigma2 = target.variance();
    (1..=degree_max)
        .map(|k| {
            let lhs = target.expect(|w| (w.clone() - mu.clone()) * w.powi(k));
            (lhs - sigma2.clone() * mixture.expect_monomial_derivative(k)).abs()
        })
        .fold(S::zero(), S::max_of)
}

/// Regression condition checked by [`exchangeable_pair_triple`].
pub const REGRESSION_FORM: &str = "E[W''|W] = (1-lambda) W";

/// Float-mode tolerance for the regression condition, per conditioning value.
pub const REGRESSION_TOLERANCE: f64 = 1e-10;

/// The exchangeable-pair triple `(W'', W, (W''-W)/(2λ))`.
///
/// `pair_law` lists `(w'', w, prob)`. The pair must be exchangeable, `W`
/// must have mean zero and satisfy [`REGRESSION_FORM`].
pub fn exchangeable_pair_triple<S: Scalar>(pair_law: &[(S, S, S)], lambda: S) -> Result<ZbestTripleLaw<S>> {
    if !(lambda > S::zero() && lambda < S::one()) {
        return Err(Error::InvalidParameter { name: "lambda" });
    }
    let mut total = S::zero();
    for (a, b, p) in pair_law {
        if a.is_nan() || b.is_nan() {
            return Err(Error::InvalidValue);
        }
        check_prob(p)?;
        total = total + p.clone();
    }
    check_total(&total)?;

    let merged = merge_pairs(pair_law);
    let mass_at = |a: &S, b: &S| -> S {
        merged
            .iter()
            .find(|(x, y, _)| x == a && y == b)
            .map(|(_, _, p)| p.clone())
            .unwrap_or_else(S::zero)
    };
    for (a, b, p) in &merged {
        let swapped = mass_at(b, a);
        if !p.within(&swapped, crate::distribution::MASS_TOLERANCE) {
            return Err(Error::NotExchangeable {
                w_pp: a.to_f64(),
                w: b.to_f64(),
                mass: p.to_f64(),
                swapped: swapped.to_f64(),
            });
        }
    }

    let target = FiniteDistribution::new(merged.iter().map(|(_, b, p)| (b.clone(), p.clone())))?;
    let mean = target.mean();
    if !mean.within(&S::zero(), crate::distribution::MASS_TOLERANCE) {
        return Err(Error::NonzeroMean { mean: mean.to_f64() });
    }

    let mut worst: Option<(S, S)> = None;
    for (w, pw) in target.atoms() {
        let cond = merged
            .iter()
            .filter(|(_, b, _)| b == w)
            .fold(S::zero(), |acc, (a, _, p)| acc + a.clone() * p.clone())
            / pw.clone();
        let residual = (cond - (S::one() - lambda.clone()) * w.clone()).abs();
        if worst.as_ref().is_none_or(|(_, r)| residual > *r) {
            worst = Some((w.clone(), residual));
        }
    }
    if let Some((w, residual)) = worst {
        if !residual.within(&S::zero(), REGRESSION_TOLERANCE) {
            return Err(Error::RegressionViolation {
                form: REGRESSION_FORM,
                worst_value: w.to_f64(),
                residual: residual.to_f64(),
            });
        }
    }

    let two_lambda = S::from_int(2) * lambda;
    let atoms = merged
        .into_iter()
        .map(|(a, b, p)| {
            let g = (a.clone() - b.clone()) / two_lambda.clone();
            TripleAtom::new(a, b, g, p)
        })
        .collect();
    ZbestTripleLaw::new(atoms, target)
}

fn merge_pairs<S: Scalar>(pairs: &[(S, S, S)]) -> Vec<(S, S, S)> {
    let mut sorted: Vec<(S, S, S)> = pairs.to_vec();
    sorted.sort_by(|x, y| cmp_scalar(&x.0, &y.0).then_with(|| cmp_scalar(&x.1, &y.1)));
    let mut merged: Vec<(S, S, S)> = Vec::with_capacity(sorted.len());
    for (a, b, p) in sorted {
        match merged.last_mut() {
            Some(last) if last.0 == a && last.1 == b => last.2 = last.2.clone() + p,
            _ => merged.push((a, b, p)),
        }
    }
    merged.retain(|(_, _, p)| !p.is_zero());
    merged
}

/// Joint law of an indicator vector `X ∈ {0,1}^n`, encoded as bit masks
/// (bit `i` is `X_i`).
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorLaw<S> {
    n: usize,
    atoms: Vec<(u64, S)>,
}

impl<S: Scalar> IndicatorLaw<S> {
    pub fn new(n: usize, atoms: Vec<(u64, S)>) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::TooManyCoordinates { n });
        }
        let mut total = S::zero();
        let mut map: BTreeMap<u64, S> = BTreeMap::new();
        for (mask, p) in atoms {
            check_prob(&p)?;
            if n < 64 && mask >> n != 0 {
                return Err(Error::InvalidValue);
            }
            total = total + p.clone();
            let slot = map.entry(mask).or_insert_with(S::zero);
            *slot = slot.clone() + p;
        }
        check_total(&total)?;
        Ok(Self { n, atoms: map.into_iter().filter(|(_, p)| !p.is_zero()).collect() })
    }

    /// Independent coordinates with `P(X_i = 1) = p[i]`.
    pub fn independent(p: &[S]) -> Result<Self> {
        let n = p.len();
        if n == 0 || n > 24 {
            return Err(Error::TooManyCoordinates { n });
        }
        let atoms = (0..1u64 << n)
            .map(|mask| {
                let prob = p.iter().enumerate().fold(S::one(), |acc, (i, pi)| {
                    if mask >> i & 1 == 1 {
                        acc * pi.clone()
                    } else {
                        acc * (S::one() - pi.clone())
                    }
                });
                (mask, prob)
            })
            .collect();
        Self::new(n, atoms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[(u64, S)] {
        &self.atoms
    }

    pub fn marginal(&self, i: usize) -> S {
        self.atoms
            .iter()
            .filter(|(m, _)| m >> i & 1 == 1)
            .fold(S::zero(), |acc, (_, p)| acc + p.clone())
    }

    pub fn sum_law(&self) -> Result<FiniteDistribution<S>> {
        FiniteDistribution::new(
            self.atoms
                .iter()
                .map(|(m, p)| (S::from_int(m.count_ones() as i64), p.clone())),
        )
    }
}

/// Supplies, for each coordinate `i`, a joint law of `(X, X^i)` where `X^i`
/// has the law of `X` conditioned on `X_i = 1`.
pub trait ConditionalCoupler<S> {
    fn coupling(&self, law: &IndicatorLaw<S>, i: usize) -> Vec<(u64, u64, S)>;
}

impl<S, F> ConditionalCoupler<S> for F
where
    F: Fn(&IndicatorLaw<S>, usize) -> Vec<(u64, u64, S)>,
{
    fn coupling(&self, law: &IndicatorLaw<S>, i: usize) -> Vec<(u64, u64, S)> {
        self(law, i)
    }
}

/// Sets `X_i = 1` and leaves the other coordinates alone; correct for
/// independent coordinates.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReplaceWithOne;

impl<S: Scalar> ConditionalCoupler<S> for ReplaceWithOne {
    fn coupling(&self, law: &IndicatorLaw<S>, i: usize) -> Vec<(u64, u64, S)> {
        law.atoms()
            .iter()
            .map(|(m, p)| (*m, m | 1 << i, p.clone()))
            .collect()
    }
}

/// The size-bias Stein triple `(Σ X^I_j, Σ X_j, μ)` with
/// `P(I = i) = E[X_i]/μ`.
pub fn size_bias_triple<S: Scalar, C: ConditionalCoupler<S>>(
    law: &IndicatorLaw<S>,
    coupler: &C,
) -> Result<ZbestTripleLaw<S>> {
    let n = law.n();
    let marginals: Vec<S> = (0..n).map(|i| law.marginal(i)).collect();
    for (index, p) in marginals.iter().enumerate() {
        if !(*p > S::zero() && *p < S::one()) {
            return Err(Error::DegenerateCoordinate { index, prob: p.to_f64() });
        }
    }
    let mu = marginals.iter().fold(S::zero(), |acc, p| acc + p.clone());
    let mut atoms = Vec::new();
    for (i, pi) in marginals.iter().enumerate() {
        let joint = coupler.coupling(law, i);
        let mut x_marg: BTreeMap<u64, S> = BTreeMap::new();
        let mut xi_marg: BTreeMap<u64, S> = BTreeMap::new();
        for (x, xi, q) in &joint {
            check_prob(q)?;
            let e = x_marg.entry(*x).or_insert_with(S::zero);
            *e = e.clone() + q.clone();
            let e = xi_marg.entry(*xi).or_insert_with(S::zero);
            *e = e.clone() + q.clone();
        }
        let x_target =
            |m: u64| law.atoms().iter().find(|(x, _)| *x == m).map(|(_, p)| p.clone()).unwrap_or_else(S::zero);
        let xi_target = |m: u64| {
            if m >> i & 1 == 1 {
                x_target(m) / pi.clone()
            } else {
                S::zero()
            }
        };
        check_marginal(i, "X", &x_marg, law.atoms().iter().map(|(m, _)| *m), x_target)?;
        check_marginal(i, "X^i", &xi_marg, law.atoms().iter().map(|(m, _)| *m), xi_target)?;
        let weight = pi.clone() / mu.clone();
        for (x, xi, q) in joint {
            atoms.push(TripleAtom::new(
                S::from_int(xi.count_ones() as i64),
                S::from_int(x.count_ones() as i64),
                mu.clone(),
                weight.clone() * q,
            ));
        }
    }
    ZbestTripleLaw::new(atoms, law.sum_law()?)
}

fn check_marginal<S: Scalar>(
    index: usize,
    which: &'static str,
    got: &BTreeMap<u64, S>,
    support: impl Iterator<Item = u64>,
    expected: impl Fn(u64) -> S,
) -> Result<()> {
    let mut worst = S::zero();
    for m in support.chain(got.keys().copied()) {
        let g = got.get(&m).cloned().unwrap_or_else(S::zero);
        worst = worst.max_of((g - expected(m)).abs());
    }
    if !worst.within(&S::zero(), crate::distribution::MASS_TOLERANCE) {
        return Err(Error::MarginalMismatch { index, which, discrepancy: worst.to_f64() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use alloc::vec;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn coin() -> FiniteDistribution<Rational> {
        FiniteDistribution::new([(q(-1, 1), q(1, 2)), (q(1, 1), q(1, 2))]).unwrap()
    }

    fn lopsided() -> FiniteDistribution<Rational> {
        FiniteDistribution::new([(q(-4, 3), q(1, 3)), (q(2, 3), q(2, 3))]).unwrap()
    }

    /// Both sides of the identity by direct summation, independent of the
    /// library's implementation.
    fn brute_force_residual(
        atoms: &[(Rational, Rational, Rational, Rational)],
        target: &[(Rational, Rational)],
        k: u32,
    ) -> Rational {
        let mu: Rational = target.iter().map(|(w, p)| w * p).sum();
        let lhs: Rational = target.iter().map(|(w, p)| (w - &mu) * w.powi(k) * p).sum();
        let rhs: Rational = atoms
            .iter()
            .map(|(a, b, g, p)| g * (a.powi(k) - b.powi(k)) * p)
            .sum();
        lhs - rhs
    }

    #[test]
    fn trivial_triple_satisfies_identity_exactly() {
        let t = ZbestTripleLaw::trivial(coin()).unwrap();
        assert_eq!(t.verify_zbest_identity(3), q(0, 1));
        assert_eq!(t.expected_dg(), q(1, 1));
    }

    #[test]
    fn trivial_triple_requires_mean_zero() {
        let d = FiniteDistribution::new([(q(0, 1), q(1, 2)), (q(1, 1), q(1, 2))]).unwrap();
        assert!(matches!(ZbestTripleLaw::trivial(d), Err(Error::NonzeroMean { .. })));
    }

    #[test]
    fn corrupted_triple_has_positive_residual() {
        let raw = vec![
            (q(-4, 3), q(0, 1), q(-4, 3), q(1, 3) + q(1, 1000)),
            (q(2, 3), q(0, 1), q(2, 3), q(2, 3) - q(1, 1000)),
        ];
        let atoms = raw
            .iter()
            .map(|(a, b, g, p)| TripleAtom::new(a.clone(), b.clone(), g.clone(), p.clone()))
            .collect::<Vec<_>>();
        assert!(matches!(
            ZbestTripleLaw::new(atoms.clone(), lopsided()),
            Err(Error::NotZbest { .. })
        ));
        let t = ZbestTripleLaw::new_unverified(atoms, lopsided()).unwrap();
        let oracle = (1..=3)
            .map(|k| brute_force_residual(&raw, lopsided().atoms(), k).abs())
            .max()
            .unwrap();
        assert!(oracle > q(0, 1));
        assert_eq!(t.verify_zbest_identity(3), oracle);
    }

    #[test]
    fn bias_by_one_is_identity() {
        let t = ZbestTripleLaw::trivial(lopsided()).unwrap();
        let same = t.bias_by_r(&[q(1, 1), q(1, 1)]).unwrap();
        assert_eq!(same, t);
    }

    #[test]
    fn square_reweighting_of_lopsided_law() {
        let t = ZbestTripleLaw::trivial(lopsided()).unwrap();
        assert_eq!(*t.sigma2(), q(8, 9));
        // r = w²/σ²: 2 at -4/3, 1/2 at 2/3.
        let biased = t.bias_by_r(&[q(2, 1), q(1, 2)]).unwrap();
        let probs: Vec<_> = biased.atoms().iter().map(|a| a.prob.clone()).collect();
        assert_eq!(probs, vec![q(2, 3), q(1, 3)]);
        assert_eq!(biased.verify_zbest_identity(5), q(0, 1));
        // DG/E[DG] is now identically one, so biasing again changes nothing.
        let r: Vec<_> = biased
            .atoms()
            .iter()
            .map(|a| a.dg() / biased.expected_dg())
            .collect();
        assert!(r.iter().all(|x| *x == q(1, 1)));
        assert_eq!(biased.bias_by_r(&r).unwrap(), biased);
    }

    #[test]
    fn bias_by_r_errors() {
        let t = ZbestTripleLaw::trivial(coin()).unwrap();
        assert!(matches!(t.bias_by_r(&[q(-1, 1), q(3, 1)]), Err(Error::NegativeWeight { index: 0, .. })));
        assert!(matches!(t.bias_by_r(&[q(1, 1), q(2, 1)]), Err(Error::NotNormalized { .. })));
        assert!(matches!(t.bias_by_r(&[q(0, 1), q(2, 1)]), Err(Error::SupportViolation { index: 0 })));
        assert!(matches!(t.bias_by_r(&[q(1, 1)]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn zero_bias_of_fair_coin_is_uniform() {
        let t = ZbestTripleLaw::trivial(coin()).unwrap();
        let m = t.zero_bias_via_dg().unwrap();
        assert!(m.segments().len() == 2);
        // Two halves [-1,0] and [0,1] of mass 1/2 each: uniform on [-1,1].
        for x in [-1, -1, 0, 1].iter().zip([2, 3, 5, 2]) {
            let xq = q(*x.0, x.1);
            let half_density = zero_bias_density_oracle(&coin(), &q(0, 1)).unwrap();
            assert_eq!(half_density, q(1, 2));
            assert_eq!(m.cdf(&xq), zero_bias_oracle_cdf(&coin(), &xq).unwrap());
        }
        assert_eq!(zero_bias_residual(&coin(), &m, 5), q(0, 1));
    }

    #[test]
    fn zero_bias_of_centered_bernoulli() {
        let d = FiniteDistribution::new([(q(-1, 2), q(1, 2)), (q(1, 2), q(1, 2))]).unwrap();
        assert_eq!(zero_bias_density_oracle(&d, &q(0, 1)).unwrap(), q(1, 1));
        let m = square_bias_zero_bias(&d).unwrap();
        assert_eq!(m.cdf(&q(1, 4)), q(3, 4));
        assert_eq!(zero_bias_residual(&d, &m, 5), q(0, 1));
    }

    #[test]
    fn square_bias_matches_dg_route_componentwise() {
        let d = lopsided();
        let a = square_bias_zero_bias(&d).unwrap();
        let b = ZbestTripleLaw::trivial(d.clone()).unwrap().zero_bias_via_dg().unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.segments(),
            &[
                Segment { lo: q(-4, 3), hi: q(0, 1), prob: q(2, 3) },
                Segment { lo: q(0, 1), hi: q(2, 3), prob: q(1, 3) },
            ]
        );
    }

    #[test]
    fn square_bias_errors() {
        let shifted = FiniteDistribution::new([(q(0, 1), q(1, 2)), (q(2, 1), q(1, 2))]).unwrap();
        assert!(matches!(square_bias_zero_bias(&shifted), Err(Error::NonzeroMean { .. })));
        let point = FiniteDistribution::point_mass(q(0, 1));
        assert!(matches!(square_bias_zero_bias(&point), Err(Error::ZeroVariance)));
        assert!(matches!(zero_bias_density_oracle(&point, &q(0, 1)), Err(Error::ZeroVariance)));
    }

    #[test]
    fn density_oracle_vanishes_outside_support() {
        let d = lopsided();
        assert_eq!(zero_bias_density_oracle(&d, &q(1, 1)).unwrap(), q(0, 1));
        assert_eq!(zero_bias_density_oracle(&d, &q(-2, 1)).unwrap(), q(0, 1));
    }

    #[test]
    fn sign_and_support_violations() {
        let target = coin();
        let neg = vec![
            TripleAtom::new(q(1, 1), q(-1, 1), q(1, 1), q(1, 2)),
            TripleAtom::new(q(-1, 1), q(1, 1), q(1, 1), q(1, 2)),
        ];
        // Identity fails too, so build unverified to reach the sign check.
        let t = ZbestTripleLaw::new_unverified(neg, target.clone()).unwrap();
        assert!(matches!(t.zero_bias_via_dg(), Err(Error::SignViolation { index: 1, .. })));
        let zero_g = vec![
            TripleAtom::new(q(1, 1), q(-1, 1), q(0, 1), q(1, 2)),
            TripleAtom::new(q(1, 1), q(-1, 1), q(1, 1), q(1, 2)),
        ];
        let t = ZbestTripleLaw::new_unverified(zero_g, target).unwrap();
        assert!(matches!(t.zero_bias_via_dg(), Err(Error::SupportViolation { index: 0 })));
    }

    #[test]
    fn interpolation_is_linear() {
        assert_eq!(interpolate_sample(5.0, 3.0, 0.0), 3.0);
        assert_eq!(interpolate_sample(5.0, 3.0, 1.0), 5.0);
        assert_eq!(interpolate_sample(2.0, -2.0, 0.25), -1.0);
    }

    /// Fair coin, flipped with probability 1/4: E[W''|W] = (1 - 2/4) W.
    fn swap_chain() -> Vec<(Rational, Rational, Rational)> {
        vec![
            (q(1, 1), q(1, 1), q(3, 8)),
            (q(-1, 1), q(1, 1), q(1, 8)),
            (q(1, 1), q(-1, 1), q(1, 8)),
            (q(-1, 1), q(-1, 1), q(3, 8)),
        ]
    }

    #[test]
    fn exchangeable_swap_chain() {
        let pairs = swap_chain();
        // Brute-force conditional expectation given W = 1.
        let num: Rational = pairs.iter().filter(|p| p.1 == q(1, 1)).map(|p| &p.0 * &p.2).sum();
        let den: Rational = pairs.iter().filter(|p| p.1 == q(1, 1)).map(|p| p.2.clone()).sum();
        let lambda = q(1, 1) - num / den;
        assert_eq!(lambda, q(1, 2));
        let t = exchangeable_pair_triple(&pairs, lambda).unwrap();
        assert_eq!(t.verify_zbest_identity(5), q(0, 1));
        assert_eq!(t.expected_dg(), *t.sigma2());
        let m = t.zero_bias_via_dg().unwrap();
        assert_eq!(zero_bias_residual(t.target(), &m, 5), q(0, 1));
    }

    #[test]
    fn exchangeable_pair_rejections() {
        let pairs = swap_chain();
        assert!(matches!(
            exchangeable_pair_triple(&pairs, q(1, 3)),
            Err(Error::RegressionViolation { form: REGRESSION_FORM, .. })
        ));
        assert!(matches!(
            exchangeable_pair_triple(&pairs, q(1, 1)),
            Err(Error::InvalidParameter { name: "lambda" })
        ));
        let lopsided_pairs = vec![
            (q(1, 1), q(-1, 1), q(1, 4)),
            (q(-1, 1), q(1, 1), q(1, 8)),
            (q(1, 1), q(1, 1), q(5, 8)),
        ];
        assert!(matches!(
            exchangeable_pair_triple(&lopsided_pairs, q(1, 2)),
            Err(Error::NotExchangeable { .. })
        ));
        let diagonal = vec![(q(1, 1), q(1, 1), q(1, 2)), (q(-1, 1), q(-1, 1), q(1, 2))];
        for lambda in [q(1, 10), q(1, 2), q(9, 10)] {
            assert!(matches!(
                exchangeable_pair_triple(&diagonal, lambda),
                Err(Error::RegressionViolation { .. })
            ));
        }
    }

    #[test]
    fn size_bias_of_independent_indicators() {
        let law = IndicatorLaw::independent(&[q(1, 2), q(1, 3), q(3, 4)]).unwrap();
        let t = size_bias_triple(&law, &ReplaceWithOne).unwrap();
        assert_eq!(t.verify_zbest_identity(5), q(0, 1));
        // Each atom has W'' - W = 1 - X_I ∈ {0, 1}.
        assert!(t.atoms().iter().all(|a| a.d() == q(0, 1) || a.d() == q(1, 1)));
        // pmf of W'' equals w p(w)/μ.
        let mu = t.mu().clone();
        for (w, pw) in t.target().atoms() {
            let got: Rational = t.atoms().iter().filter(|a| a.w_pp == *w).map(|a| a.prob.clone()).sum();
            assert_eq!(got, w * pw / &mu);
        }
        let m = t.monotone_sizebias_to_zerobias().unwrap();
        assert_eq!(zero_bias_residual(t.target(), &m, 5), q(0, 1));
        assert_eq!(m, t.zero_bias_via_dg().unwrap());
    }

    #[test]
    fn size_bias_of_single_indicator_is_one() {
        let law = IndicatorLaw::independent(&[q(1, 2)]).unwrap();
        let t = size_bias_triple(&law, &ReplaceWithOne).unwrap();
        assert!(t.atoms().iter().all(|a| a.w_pp == q(1, 1)));
    }

    #[test]
    fn size_bias_errors() {
        let law = IndicatorLaw::new(2, vec![(0b01, q(1, 2)), (0b11, q(1, 2))]).unwrap();
        assert!(matches!(
            size_bias_triple(&law, &ReplaceWithOne),
            Err(Error::DegenerateCoordinate { index: 0, .. })
        ));
        let law = IndicatorLaw::independent(&[q(1, 2), q(1, 2)]).unwrap();
        let wrong = |l: &IndicatorLaw<Rational>, _i: usize| -> Vec<(u64, u64, Rational)> {
            l.atoms().iter().map(|(m, p)| (*m, *m, p.clone())).collect()
        };
        assert!(matches!(
            size_bias_triple(&law, &wrong),
            Err(Error::MarginalMismatch { which: "X^i", .. })
        ));
    }

    #[test]
    fn non_monotone_is_rejected() {
        let target = coin();
        let atoms = vec![
            TripleAtom::new(q(-1, 1), q(1, 1), q(1, 1), q(1, 2)),
            TripleAtom::new(q(1, 1), q(-1, 1), q(1, 1), q(1, 2)),
        ];
        let t = ZbestTripleLaw::new_unverified(atoms, target).unwrap();
        assert!(matches!(t.monotone_sizebias_to_zerobias(), Err(Error::NonconstantGain { .. }) | Err(Error::NotMonotone { .. })));
    }
}

//! Sums of independent Bernoulli indicators.
//!
//! With `P(I = i) = p_i/μ` and `Y‡ = Y - X_I + 1`, `Y† = Y - X_I`, the
//! interpolation `Y* = Y - X_I + U` has the `Y`-zero-bias law and
//! `|Y* - Y| <= 1`, giving Wasserstein and Kolmogorov bounds `1/σ` and
//! `2.03/σ`.

use alloc::vec::Vec;

use rand::Rng;

use crate::coupling::{TripleAtom, ZbestTripleLaw};
use crate::distribution::FiniteDistribution;
use crate::error::{Error, Result};
use crate::mixture::SegmentMixture;
use crate::scalar::Scalar;

/// Rounded-up Kolmogorov constant quoted for this example.
pub const KOLMOGOROV_CONSTANT: f64 = 2.03;

#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliVector<S> {
    p: Vec<S>,
}

/// Inputs to [`crate::stein::theorem_bounds`] for this coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// `E|W* - W| = 1/(2σ)`.
    pub e_abs_diff: f64,
    /// `E|1 - E[GD|W]| = 0`.
    pub e_abs_one_minus_gd: f64,
    /// `|W* - W| <= 1/σ`.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliBounds {
    pub wasserstein: f64,
    pub kolmogorov: f64,
    pub inputs: BoundInputs,
}

impl<S: Scalar> BernoulliVector<S> {
    pub fn new(p: Vec<S>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidParameter { name: "p" });
        }
        for (index, pi) in p.iter().enumerate() {
            if pi.is_nan() || !(*pi > S::zero() && *pi < S::one()) {
                return Err(Error::DegenerateCoordinate { index, prob: pi.to_f64() });
            }
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> &[S] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn mu(&self) -> S {
        self.p.iter().fold(S::zero(), |acc, p| acc + p.clone())
    }

    pub fn sigma2(&self) -> S {
        self.p
            .iter()
            .fold(S::zero(), |acc, p| acc + p.clone() * (S::one() - p.clone()))
    }

    /// pmf of `Σ X_j` over `j != skip`, indexed by value.
    fn convolve(&self, skip: Option<usize>) -> Vec<S> {
        let mut pmf = alloc::vec![S::one()];
        for (j, pj) in self.p.iter().enumerate() {
            if Some(j) == skip {
                continue;
            }
            let q = S::one() - pj.clone();
            let mut next = alloc::vec![S::zero(); pmf.len() + 1];
            for (k, mass) in pmf.iter().enumerate() {
                next[k] = next[k].clone() + mass.clone() * q.clone();
                next[k + 1] = next[k + 1].clone() + mass.clone() * pj.clone();
            }
            pmf = next;
        }
        pmf
    }

    /// pmf of `Y` by sequential convolution.
    pub fn exact_pmf(&self) -> FiniteDistribution<S> {
        let pmf = self.convolve(None);
        FiniteDistribution::new(pmf.into_iter().enumerate().map(|(k, m)| (S::from_int(k as i64), m)))
            .expect("convolution of probability vectors")
    }

    /// The size-bias triple `(Y - X_I + 1, Y, μ)`.
    pub fn size_bias_triple(&self) -> Result<ZbestTripleLaw<S>> {
        let mu = self.mu();
        let mut atoms = Vec::new();
        for (i, pi) in self.p.iter().enumerate() {
            let weight = pi.clone() / mu.clone();
            for (k, mass) in self.convolve(Some(i)).into_iter().enumerate() {
                let k_s = S::from_int(k as i64);
                let base = weight.clone() * mass;
                atoms.push(TripleAtom::new(
                    k_s.clone() + S::one(),
                    k_s.clone() + S::one(),
                    mu.clone(),
                    base.clone() * pi.clone(),
                ));
                atoms.push(TripleAtom::new(
                    k_s.clone() + S::one(),
                    k_s,
                    mu.clone(),
                    base * (S::one() - pi.clone()),
                ));
            }
        }
        ZbestTripleLaw::new(atoms, self.exact_pmf())
    }

    /// Law of `Y*`: unit segments `[k, k+1]` with mass
    /// `Σ_i p_i(1-p_i) P(Y - X_i = k)/σ²`.
    pub fn exact_zero_bias_law(&self) -> Result<SegmentMixture<S>> {
        self.size_bias_triple()?.monotone_sizebias_to_zerobias()
    }

    /// `E|Y* - Y| = Σ_i (p_i/μ) (p_i E|U - 1| + (1-p_i) E|U|)`.
    pub fn exact_mean_abs_gap(&self) -> S {
        let mu = self.mu();
        let half = S::from_ratio(1, 2);
        self.p.iter().fold(S::zero(), |acc, pi| {
            let w = pi.clone() / mu.clone();
            acc + w * (pi.clone() * half.clone() + (S::one() - pi.clone()) * half.clone())
        })
    }

    pub fn bounds(&self) -> BernoulliBounds {
        let sigma = libm::sqrt(self.sigma2().to_f64());
        BernoulliBounds {
            wasserstein: 1.0 / sigma,
            kolmogorov: KOLMOGOROV_CONSTANT / sigma,
            inputs: BoundInputs { e_abs_diff: 0.5 / sigma, e_abs_one_minus_gd: 0.0, delta: 1.0 / sigma },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliDraw {
    pub y: u32,
    pub i: usize,
    pub y_dagger: u32,
    pub y_ddagger: u32,
    pub y_star: f64,
}

/// Sampler of the coupling; draws `X_1..X_n`, then `I`, then `U`.
#[derive(Debug, Clone)]
pub struct BernoulliSampler {
    p: Vec<f64>,
    cumulative: Vec<f64>,
}

impl BernoulliSampler {
    pub fn new<S: Scalar>(bv: &BernoulliVector<S>) -> Self {
        let p: Vec<f64> = bv.p().iter().map(Scalar::to_f64).collect();
        let mut acc = 0.0;
        let cumulative = p
            .iter()
            .map(|pi| {
                acc += pi;
                acc
            })
            .collect();
        Self { p, cumulative }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> BernoulliDraw {
        let mut y = 0u32;
        let mut x_bits = Vec::with_capacity(self.p.len());
        for &pi in &self.p {
            let on = rng.random::<f64>() < pi;
            x_bits.push(on);
            y += u32::from(on);
        }
        let total = self.cumulative[self.cumulative.len() - 1];
        let target = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= target).min(self.p.len() - 1);
        let y_dagger = y - u32::from(x_bits[i]);
        let u: f64 = rng.random();
        BernoulliDraw { y, i, y_dagger, y_ddagger: y_dagger + 1, y_star: f64::from(y_dagger) + u }
    }
}

/// One draw of `(Y, I, Y†, Y‡, Y*)`.
pub fn sample_coupling<S: Scalar, R: Rng + ?Sized>(bv: &BernoulliVector<S>, rng: &mut R) -> BernoulliDraw {
    BernoulliSampler::new(bv).draw(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{zero_bias_density_oracle, zero_bias_residual};
    use crate::mixture::Segment;
    use crate::scalar::Rational;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn pmfs() {
        let one = BernoulliVector::new(vec![q(1, 2)]).unwrap().exact_pmf();
        assert_eq!(one.atoms(), &[(q(0, 1), q(1, 2)), (q(1, 1), q(1, 2))]);
        let two = BernoulliVector::new(vec![q(1, 2), q(1, 2)]).unwrap().exact_pmf();
        assert_eq!(two.atoms(), &[(q(0, 1), q(1, 4)), (q(1, 1), q(1, 2)), (q(2, 1), q(1, 4))]);
        let bv = BernoulliVector::new(vec![q(3, 10), q(6, 10)]).unwrap();
        let d = bv.exact_pmf();
        assert_eq!(d.mean(), q(9, 10));
        assert_eq!(d.variance(), q(45, 100));
        // Brute force over the four outcomes.
        assert_eq!(d.atoms()[0].1, q(7, 10) * q(4, 10));
        assert_eq!(d.atoms()[2].1, q(3, 10) * q(6, 10));
    }

    #[test]
    fn rejects_degenerate() {
        assert!(matches!(BernoulliVector::new(vec![0.5, 1.0]), Err(Error::DegenerateCoordinate { index: 1, .. })));
        assert!(matches!(BernoulliVector::new(vec![0.0]), Err(Error::DegenerateCoordinate { index: 0, .. })));
        assert!(BernoulliVector::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn single_coin_zero_bias_is_uniform() {
        let bv = BernoulliVector::new(vec![q(1, 2)]).unwrap();
        let m = bv.exact_zero_bias_law().unwrap();
        assert_eq!(m.segments(), &[Segment { lo: q(0, 1), hi: q(1, 1), prob: q(1, 1) }]);
        assert_eq!(zero_bias_density_oracle(&bv.exact_pmf(), &q(1, 2)).unwrap(), q(1, 1));
        let t = bv.size_bias_triple().unwrap();
        assert!(t.atoms().iter().all(|a| a.w_pp == q(1, 1)));
    }

    #[test]
    fn zero_bias_matches_direct_formula() {
        let bv = BernoulliVector::new(vec![q(1, 5), q(1, 2), q(9, 10)]).unwrap();
        let m = bv.exact_zero_bias_law().unwrap();
        assert_eq!(zero_bias_residual(&bv.exact_pmf(), &m, 5), q(0, 1));
        let sigma2 = bv.sigma2();
        for k in 0..3i64 {
            let direct: Rational = (0..3)
                .map(|i| {
                    let pi = &bv.p()[i];
                    let loo = bv.convolve(Some(i));
                    pi * (q(1, 1) - pi) * loo.get(k as usize).cloned().unwrap_or(q(0, 1)) / &sigma2
                })
                .sum();
            let segs: Vec<_> = m.segments().iter().filter(|s| s.lo == q(k, 1)).collect();
            assert!(segs.iter().all(|s| s.hi == q(k + 1, 1)));
            assert_eq!(segs.iter().map(|s| s.prob.clone()).sum::<Rational>(), direct);
        }
    }

    #[test]
    fn mean_gap_is_one_half() {
        for p in [vec![q(1, 5), q(1, 2), q(9, 10)], vec![q(3, 10); 10]] {
            assert_eq!(BernoulliVector::new(p).unwrap().exact_mean_abs_gap(), q(1, 2));
        }
    }

    #[test]
    fn expected_dg_is_variance() {
        let bv = BernoulliVector::new(vec![q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(bv.size_bias_triple().unwrap().expected_dg(), q(1, 2));
    }

    #[test]
    fn bounds_for_two_fair_coins() {
        let b = BernoulliVector::new(vec![0.5, 0.5]).unwrap().bounds();
        assert!(libm::fabs(b.wasserstein - libm::sqrt(2.0)) < 1e-15);
        assert!(libm::fabs(b.kolmogorov - 2.03 * libm::sqrt(2.0)) < 1e-14);
    }

    #[test]
    fn sampled_coupling_properties() {
        let bv = BernoulliVector::new(vec![0.2, 0.5, 0.9]).unwrap();
        let sampler = BernoulliSampler::new(&bv);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0u32; 3];
        let draws = 60_000;
        for _ in 0..draws {
            let d = sampler.draw(&mut rng);
            assert_eq!(d.y_ddagger, d.y_dagger + 1);
            assert!(libm::fabs(d.y_star - f64::from(d.y)) <= 1.0);
            counts[d.i] += 1;
        }
        // P(I = i) = p_i / 1.6, checked to five standard errors.
        for (c, p) in counts.iter().zip([0.2, 0.5, 0.9]) {
            let want = p / 1.6;
            let se = libm::sqrt(want * (1.0 - want) / f64::from(draws));
            assert!(libm::fabs(f64::from(*c) / f64::from(draws) - want) < 5.0 * se);
        }
    }
}

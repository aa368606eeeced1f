use alloc::vec::Vec;

use crate::distribution::{canonical_atoms, check_prob, check_total, cmp_scalar};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniform mass `prob` spread over `[lo, hi]`, `lo < hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<S> {
    pub lo: S,
    pub hi: S,
    pub prob: S,
}

impl<S: Scalar> Segment<S> {
    pub fn density(&self) -> S {
        self.prob.clone() / (self.hi.clone() - self.lo.clone())
    }

    /// Mass of the segment lying in `(-inf, x]`.
    fn mass_below(&self, x: &S) -> S {
        if *x <= self.lo {
            S::zero()
        } else if *x >= self.hi {
            self.prob.clone()
        } else {
            self.prob.clone() * (x.clone() - self.lo.clone()) / (self.hi.clone() - self.lo.clone())
        }
    }
}

/// Law of an interpolated variable: finitely many atoms plus uniform segments.
///
/// Segments are sorted by `(lo, hi)` and never merged: overlapping segments
/// may carry different densities, so the representation is not unique and
/// laws should be compared through their CDFs.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentMixture<S> {
    atoms: Vec<(S, S)>,
    segments: Vec<Segment<S>>,
}

impl<S: Scalar> SegmentMixture<S> {
    pub fn new(atoms: Vec<(S, S)>, segments: Vec<Segment<S>>) -> Result<Self> {
        let mut total = S::zero();
        for (value, prob) in &atoms {
            if value.is_nan() {
                return Err(Error::InvalidValue);
            }
            check_prob(prob)?;
            total = total + prob.clone();
        }
        for seg in &segments {
            if seg.lo.is_nan() || seg.hi.is_nan() || !(seg.lo < seg.hi) {
                return Err(Error::InvalidSegment { lo: seg.lo.to_f64(), hi: seg.hi.to_f64() });
            }
            check_prob(&seg.prob)?;
            total = total + seg.prob.clone();
        }
        check_total(&total)?;
        Ok(Self::from_parts(atoms, segments))
    }

    /// Canonicalises without validating; callers guarantee mass one.
    pub(crate) fn from_parts(atoms: Vec<(S, S)>, mut segments: Vec<Segment<S>>) -> Self {
        segments.retain(|s| !s.prob.is_zero());
        segments.sort_by(|a, b| cmp_scalar(&a.lo, &b.lo).then_with(|| cmp_scalar(&a.hi, &b.hi)));
        Self { atoms: canonical_atoms(atoms), segments }
    }

    pub fn atoms(&self) -> &[(S, S)] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment<S>] {
        &self.segments
    }

    pub fn total_mass(&self) -> S {
        let a = self.atoms.iter().fold(S::zero(), |acc, (_, p)| acc + p.clone());
        self.segments.iter().fold(a, |acc, s| acc + s.prob.clone())
    }

    /// `P(W* <= x)`.
    pub fn cdf(&self, x: &S) -> S {
        let a = self
            .atoms
            .iter()
            .filter(|(v, _)| v <= x)
            .fold(S::zero(), |acc, (_, p)| acc + p.clone());
        self.segments.iter().fold(a, |acc, s| acc + s.mass_below(x))
    }

    /// `E[(W*)^k]`, integrating each segment in closed form.
    pub fn moment(&self, k: u32) -> S {
        let a = self
            .atoms
            .iter()
            .fold(S::zero(), |acc, (v, p)| acc + p.clone() * v.powi(k));
        self.segments.iter().fold(a, |acc, s| {
            let num = s.hi.powi(k + 1) - s.lo.powi(k + 1);
            let den = S::from_int(k as i64 + 1) * (s.hi.clone() - s.lo.clone());
            acc + s.prob.clone() * num / den
        })
    }

    /// `E[f'(W*)]` for `f(w) = w^k`, i.e. `k·E[(W*)^(k-1)]`; zero for `k = 0`.
    pub fn expect_monomial_derivative(&self, k: u32) -> S {
        if k == 0 {
            return S::zero();
        }
        let kk = S::from_int(k as i64);
        let a = self
            .atoms
            .iter()
            .fold(S::zero(), |acc, (v, p)| acc + p.clone() * kk.clone() * v.powi(k - 1));
        self.segments.iter().fold(a, |acc, s| {
            let num = s.hi.powi(k) - s.lo.powi(k);
            acc + s.prob.clone() * num / (s.hi.clone() - s.lo.clone())
        })
    }

    pub fn mean(&self) -> S {
        self.moment(1)
    }

    /// Smallest and largest points carrying mass.
    pub fn support(&self) -> Option<(S, S)> {
        let points = self
            .atoms
            .iter()
            .map(|(v, _)| (v.clone(), v.clone()))
            .chain(self.segments.iter().map(|s| (s.lo.clone(), s.hi.clone())));
        points.fold(None, |acc, (lo, hi)| match acc {
            None => Some((lo, hi)),
            Some((a, b)) => Some((a.min_of(lo), b.max_of(hi))),
        })
    }

    /// Law of `a·W* + b`; a negative scale reverses segment orientation.
    pub fn affine(&self, a: &S, b: &S) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::InvalidParameter { name: "scale" });
        }
        let map = |v: &S| a.clone() * v.clone() + b.clone();
        let atoms = self.atoms.iter().map(|(v, p)| (map(v), p.clone())).collect();
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let (x, y) = (map(&s.lo), map(&s.hi));
                let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                Segment { lo, hi, prob: s.prob.clone() }
            })
            .collect();
        Ok(Self::from_parts(atoms, segments))
    }

    pub fn to_f64(&self) -> SegmentMixture<f64> {
        SegmentMixture::from_parts(
            self.atoms.iter().map(|(v, p)| (v.to_f64(), p.to_f64())).collect(),
            self.segments
                .iter()
                .map(|s| Segment { lo: s.lo.to_f64(), hi: s.hi.to_f64(), prob: s.prob.to_f64() })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use alloc::vec;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn uniform_segment_moments_are_closed_form() {
        let m = SegmentMixture::new(vec![], vec![Segment { lo: q(-1, 1), hi: q(1, 1), prob: q(1, 1) }])
            .unwrap();
        assert_eq!(m.moment(1), q(0, 1));
        assert_eq!(m.moment(2), q(1, 3));
        assert_eq!(m.moment(4), q(1, 5));
        assert_eq!(m.expect_monomial_derivative(3), q(1, 1));
        assert_eq!(m.cdf(&q(0, 1)), q(1, 2));
        assert_eq!(m.cdf(&q(-3, 1)), q(0, 1));
    }

    #[test]
    fn rejects_degenerate_segment() {
        let bad = SegmentMixture::new(vec![], vec![Segment { lo: 1.0, hi: 1.0, prob: 1.0 }]);
        assert!(matches!(bad, Err(Error::InvalidSegment { .. })));
        let short = SegmentMixture::new(vec![(0.0, 0.5)], vec![Segment { lo: 0.0, hi: 1.0, prob: 0.25 }]);
        assert!(matches!(short, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn mixed_atoms_and_segments() {
        let m = SegmentMixture::new(
            vec![(q(2, 1), q(1, 2))],
            vec![Segment { lo: q(0, 1), hi: q(1, 1), prob: q(1, 2) }],
        )
        .unwrap();
        assert_eq!(m.mean(), q(5, 4));
        assert_eq!(m.cdf(&q(2, 1)), q(1, 1));
        assert_eq!(m.cdf(&q(3, 2)), q(1, 2));
        assert_eq!(m.support(), Some((q(0, 1), q(2, 1))));
        let flipped = m.affine(&q(-1, 1), &q(0, 1)).unwrap();
        assert_eq!(flipped.segments()[0].lo, q(-1, 1));
        assert_eq!(flipped.mean(), q(-5, 4));
    }
}

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Probability masses must sum to one within this tolerance in float mode.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability law with finitely many atoms.
///
/// Atoms are kept sorted by value with duplicates merged and zero-mass atoms
/// removed, so two laws are equal exactly when their atom lists are.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution<S> {
    atoms: Vec<(S, S)>,
}

pub(crate) fn cmp_scalar<S: PartialOrd>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Sorts `(value, prob)` pairs and merges equal values; drops zero masses.
pub(crate) fn canonical_atoms<S: Scalar>(mut atoms: Vec<(S, S)>) -> Vec<(S, S)> {
    atoms.sort_by(|a, b| cmp_scalar(&a.0, &b.0));
    let mut merged: Vec<(S, S)> = Vec::with_capacity(atoms.len());
    for (value, prob) in atoms {
        match merged.last_mut() {
            Some(last) if last.0 == value => last.1 = last.1.clone() + prob,
            _ => merged.push((value, prob)),
        }
    }
    merged.retain(|(_, p)| !p.is_zero());
    merged
}

pub(crate) fn check_prob<S: Scalar>(prob: &S) -> Result<()> {
    if prob.is_nan() || *prob < S::zero() {
        return Err(Error::InvalidProbability { prob: prob.to_f64() });
    }
    Ok(())
}

pub(crate) fn check_total<S: Scalar>(total: &S) -> Result<()> {
    if !total.within(&S::one(), MASS_TOLERANCE) {
        return Err(Error::NotNormalized { total: total.to_f64() });
    }
    Ok(())
}

impl<S: Scalar> FiniteDistribution<S> {
    pub fn new(atoms: impl IntoIterator<Item = (S, S)>) -> Result<Self> {
        let atoms: Vec<(S, S)> = atoms.into_iter().collect();
        let mut total = S::zero();
        for (value, prob) in &atoms {
            if value.is_nan() {
                return Err(Error::InvalidValue);
            }
            check_prob(prob)?;
            total = total + prob.clone();
        }
        check_total(&total)?;
        Ok(Self { atoms: canonical_atoms(atoms) })
    }

    pub fn point_mass(value: S) -> Self {
        Self { atoms: alloc::vec![(value, S::one())] }
    }

    /// Uniform law on the given values (duplicates add up).
    pub fn uniform(values: impl IntoIterator<Item = S>) -> Result<Self> {
        let values: Vec<S> = values.into_iter().collect();
        if values.is_empty() {
            return Err(Error::NotNormalized { total: 0.0 });
        }
        let mass = S::one() / S::from_int(values.len() as i64);
        Self::new(values.into_iter().map(|v| (v, mass.clone())))
    }

    pub fn atoms(&self) -> &[(S, S)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn min_value(&self) -> &S {
        &self.atoms[0].0
    }

    pub fn max_value(&self) -> &S {
        &self.atoms[self.atoms.len() - 1].0
    }

    pub fn expect(&self, f: impl Fn(&S) -> S) -> S {
        self.atoms
            .iter()
            .fold(S::zero(), |acc, (v, p)| acc + f(v) * p.clone())
    }

    pub fn mean(&self) -> S {
        self.expect(|v| v.clone())
    }

    pub fn variance(&self) -> S {
        let mu = self.mean();
        self.expect(|v| {
            let d = v.clone() - mu.clone();
            d.clone() * d
        })
    }

    pub fn moment(&self, k: u32) -> S {
        self.expect(|v| v.powi(k))
    }

    /// `P(W <= x)`.
    pub fn cdf(&self, x: &S) -> S {
        self.atoms
            .iter()
            .take_while(|(v, _)| v <= x)
            .fold(S::zero(), |acc, (_, p)| acc + p.clone())
    }

    /// `P(W < x)`.
    pub fn cdf_left(&self, x: &S) -> S {
        self.atoms
            .iter()
            .take_while(|(v, _)| v < x)
            .fold(S::zero(), |acc, (_, p)| acc + p.clone())
    }

    /// Law of `a·W + b`.
    pub fn affine(&self, a: &S, b: &S) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::InvalidParameter { name: "scale" });
        }
        Ok(Self {
            atoms: canonical_atoms(
                self.atoms
                    .iter()
                    .map(|(v, p)| (a.clone() * v.clone() + b.clone(), p.clone()))
                    .collect(),
            ),
        })
    }

    pub fn to_f64(&self) -> FiniteDistribution<f64> {
        FiniteDistribution {
            atoms: canonical_atoms(
                self.atoms
                    .iter()
                    .map(|(v, p)| (v.to_f64(), p.to_f64()))
                    .collect(),
            ),
        }
    }
}

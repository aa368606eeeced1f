//! JSON shapes for laws and enumeration results.
//!
//! Laws: `{"atoms": [[value, prob], ...], "segments": [[lo, hi, prob], ...]}`.
//! Exact rationals: `{"num": "3", "den": "8"}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use zbest_core::lightbulb::Enumeration;
use zbest_core::{FiniteDistribution, Rational, Scalar, Segment, SegmentMixture};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawJson {
    pub atoms: Vec<[f64; 2]>,
    #[serde(default)]
    pub segments: Vec<[f64; 3]>,
}

impl LawJson {
    pub fn from_distribution<S: Scalar>(d: &FiniteDistribution<S>) -> Self {
        Self { atoms: d.atoms().iter().map(|(v, p)| [v.to_f64(), p.to_f64()]).collect(), segments: Vec::new() }
    }

    pub fn from_mixture<S: Scalar>(m: &SegmentMixture<S>) -> Self {
        Self {
            atoms: m.atoms().iter().map(|(v, p)| [v.to_f64(), p.to_f64()]).collect(),
            segments: m.segments().iter().map(|s| [s.lo.to_f64(), s.hi.to_f64(), s.prob.to_f64()]).collect(),
        }
    }

    /// Fails if segments are present.
    pub fn to_distribution(&self) -> Result<FiniteDistribution<f64>> {
        if !self.segments.is_empty() {
            return Err(crate::error::ExperimentError::Format("a finite distribution has no segments".into()));
        }
        Ok(FiniteDistribution::new(self.atoms.iter().map(|[v, p]| (*v, *p)))?)
    }

    pub fn to_mixture(&self) -> Result<SegmentMixture<f64>> {
        Ok(SegmentMixture::new(
            self.atoms.iter().map(|[v, p]| (*v, *p)).collect(),
            self.segments.iter().map(|[lo, hi, prob]| Segment { lo: *lo, hi: *hi, prob: *prob }).collect(),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExactValue {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for ExactValue {
    fn from(q: &Rational) -> Self {
        Self { num: q.numer().to_string(), den: q.denom().to_string() }
    }
}

impl ExactValue {
    pub fn to_rational(&self) -> Option<Rational> {
        Some(Rational::new(self.num.parse().ok()?, self.den.parse().ok()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSegment {
    pub lo: ExactValue,
    pub hi: ExactValue,
    pub prob: ExactValue,
}

/// Marginal pmfs keyed by the decimal value of `Y`.
pub type ExactPmf = BTreeMap<String, ExactValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationExport {
    pub n: usize,
    pub configurations: u64,
    pub y: ExactPmf,
    pub y_pp: ExactPmf,
    pub y_dagger: ExactPmf,
    pub y_ddagger: ExactPmf,
    pub y_star: Vec<ExactSegment>,
    pub mean: ExactValue,
    pub variance: ExactValue,
    pub eta: ExactValue,
    pub p_y_pp_ne_y: ExactValue,
    pub empty_candidate_mass: ExactValue,
    pub mean_abs_gap: ExactValue,
    pub invariant_violations: u64,
}

fn pmf(d: &FiniteDistribution<Rational>, shift: i64) -> ExactPmf {
    d.atoms()
        .iter()
        .map(|(v, p)| ((v.clone() + Rational::from_int(shift)).to_string(), ExactValue::from(p)))
        .collect()
}

impl From<&Enumeration> for EnumerationExport {
    fn from(e: &Enumeration) -> Self {
        Self {
            n: e.n,
            configurations: e.configurations,
            y: pmf(&e.y_law, 0),
            y_pp: pmf(&e.y_pp_law, 0),
            y_dagger: pmf(&e.y_dagger_law, 0),
            y_ddagger: pmf(&e.y_dagger_law, 2),
            y_star: e
                .zero_bias
                .segments()
                .iter()
                .map(|s| ExactSegment { lo: (&s.lo).into(), hi: (&s.hi).into(), prob: (&s.prob).into() })
                .collect(),
            mean: (&e.y_law.mean()).into(),
            variance: (&e.y_law.variance()).into(),
            eta: (&e.eta).into(),
            p_y_pp_ne_y: (&e.p_y_pp_ne_y).into(),
            empty_candidate_mass: (&e.empty_mass).into(),
            mean_abs_gap: (&e.mean_abs_gap).into(),
            invariant_violations: e.violations.total(),
        }
    }
}

impl EnumerationExport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

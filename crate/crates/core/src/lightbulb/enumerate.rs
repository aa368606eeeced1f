//! Exhaustive enumeration of the lightbulb couplings for `n ∈ {4, 6}`.
//!
//! Configurations are held as one bitmask per stage, independently of
//! [`super::ToggleMatrix`]. Every outcome `(x, i, j, s, k | l)` carries an
//! integer weight over the common denominator
//! `|𝓔| · n · (n/2) · |stages| · lcm(1..=n)`, so all laws are exact.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use super::coupling::StageLaw;
use crate::coupling::{TripleAtom, ZbestTripleLaw};
use crate::distribution::FiniteDistribution;
use crate::error::{Error, Result};
use crate::mixture::{Segment, SegmentMixture};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnumerationOptions {
    pub stage_law: StageLaw,
    /// Also collect the exact law of `(X†, I, J)`.
    pub keep_dagger_law: bool,
}

/// Counts of enumerated outcomes (with positive weight) breaking a
/// pointwise property of the couplings. All zero when the construction is
/// correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InvariantViolations {
    /// `Y'' - Y != 2·1{X_I = 0, X_J = 0}`.
    pub size_bias_gap: u64,
    /// `X†` is not `(0, 0)` at `(I, J)`.
    pub dagger_final_states: u64,
    /// `X†` has equal middle-stage toggles at `I` and `J`.
    pub dagger_middle_toggles: u64,
    /// `Y‡ != Y† + 2`.
    pub ddagger_gap: u64,
    /// `|Y† - Y| > 2`.
    pub dagger_distance: u64,
    /// A stage of `X†` or `X‡` has the wrong number of toggles.
    pub row_sums: u64,
    /// Applying the chosen `φ_ab` to `X†` does not give back `X`.
    pub involution: u64,
}

impl InvariantViolations {
    pub fn total(&self) -> u64 {
        self.size_bias_gap
            + self.dagger_final_states
            + self.dagger_middle_toggles
            + self.ddagger_gap
            + self.dagger_distance
            + self.row_sums
            + self.involution
    }
}

/// Exact law of `(X†, I, J)` given that the candidate sets were non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct DaggerLaw {
    n: usize,
    /// Keys pack stage `r` in bits `n(r-1)..nr`, then `I` and `J` in three
    /// bits each.
    pub atoms: Vec<(u64, Rational)>,
    /// Number of `(e, i, j)` with `e_{n/2,i} != e_{n/2,j}` and `e_i = e_j = 0`.
    pub target_support: u64,
}

impl DaggerLaw {
    pub fn unpack(&self, key: u64) -> (Vec<u8>, usize, usize) {
        let n = self.n;
        let rows = (0..n).map(|r| (key >> (n * r) & ((1 << n) - 1)) as u8).collect();
        let i = (key >> (n * n) & 7) as usize;
        let j = (key >> (n * n + 3) & 7) as usize;
        (rows, i, j)
    }

    /// Whether every atom lies in the target support, all masses are equal
    /// and the atoms exhaust the support.
    pub fn is_uniform_on_target(&self) -> bool {
        let want = Rational::from_ratio(1, self.target_support as i64);
        let m = self.n / 2;
        self.atoms.len() as u64 == self.target_support
            && self.atoms.iter().all(|(key, p)| {
                let (rows, i, j) = self.unpack(*key);
                let fin = final_bits(&rows);
                *p == want && bit(rows[m - 1], i) != bit(rows[m - 1], j) && !bit(fin, i) && !bit(fin, j)
            })
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub n: usize,
    pub stage_law: StageLaw,
    pub stages: Vec<usize>,
    /// `|𝓔| = Π_r C(n, r)`.
    pub configurations: u64,
    pub y_law: FiniteDistribution<Rational>,
    pub y_pp_law: FiniteDistribution<Rational>,
    /// The size-bias triple `(Y'', Y, μ)`.
    pub size_bias: ZbestTripleLaw<Rational>,
    pub p_y_pp_ne_y: Rational,
    /// `2 / (n² |𝓔|)`.
    pub eta: Rational,
    /// Whether `P(X = e, I = i, J = j) = η·1(e_{n/2,i} != e_{n/2,j})` held on
    /// every configuration.
    pub eta_matches: bool,
    /// Probability that the `K` or `L` candidate set is empty.
    pub empty_mass: Rational,
    /// Law of `Y†`, conditional on a non-empty candidate set.
    pub y_dagger_law: FiniteDistribution<Rational>,
    /// The `Y†` marginal of the uniform law on the target support.
    pub target_y_dagger_law: FiniteDistribution<Rational>,
    /// Joint law of `(Y, Y†)`, conditional on a non-empty candidate set.
    pub y_y_dagger: Vec<((u32, u32), Rational)>,
    /// Law of `Y* = Y† + 2U`.
    pub zero_bias: SegmentMixture<Rational>,
    pub mean_abs_gap: Rational,
    pub max_abs_gap: Rational,
    pub violations: InvariantViolations,
    pub dagger_law: Option<DaggerLaw>,
}

/// Weight, `X†` rows and the swap `(stage, a, b)` that produced them.
type Outcome = (u64, Vec<u8>, Option<(usize, usize, usize)>);

fn bit(mask: u8, i: usize) -> bool {
    mask >> i & 1 == 1
}

fn final_bits(rows: &[u8]) -> u8 {
    rows.iter().fold(0, |acc, r| acc ^ r)
}

fn swap(rows: &mut [u8], stage: usize, i: usize, j: usize) {
    let r = &mut rows[stage - 1];
    if bit(*r, i) != bit(*r, j) {
        *r ^= (1 << i) | (1 << j);
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn rational(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn law_from_counts(counts: &[u64], den: u64) -> Result<FiniteDistribution<Rational>> {
    FiniteDistribution::new(
        counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(y, c)| (Rational::from_int(y as i64), rational(*c, den))),
    )
}

/// `E|a + 2U|` for `U` uniform on `[0, 1]`.
fn mean_abs_shifted_uniform(a: i64) -> Rational {
    let a_q = Rational::from_int(a);
    if a >= 0 {
        a_q + Rational::one()
    } else if a <= -2 {
        -a_q - Rational::one()
    } else {
        a_q.clone() + Rational::one() + a_q.clone() * a_q / Rational::from_int(2)
    }
}

/// Enumerates every configuration, every `(I, J)` and every value of the
/// auxiliary variables `S, K, L`.
pub fn enumerate_exact(n: usize, options: EnumerationOptions) -> Result<Enumeration> {
    if n != 4 && n != 6 {
        return Err(Error::UnsupportedN { n });
    }
    let m = n / 2;
    let stages = options.stage_law.stages(n);
    let lcm = (1..=n as u64).fold(1, |acc, k| acc / gcd(acc, k) * k);
    let unit = stages.len() as u64 * lcm;
    let pairs_per_config = (n * m) as u64;

    let subsets: Vec<Vec<u8>> = (1..=n)
        .map(|r| (0u8..1 << n).filter(|s| s.count_ones() as usize == r).collect())
        .collect();
    let configurations: u64 = subsets.iter().map(|s| s.len() as u64).product();

    let mut y_counts = vec![0u64; n + 1];
    let mut pair_counts = vec![vec![0u64; n + 3]; n + 1];
    let mut joint = vec![vec![0u64; n + 1]; n + 1];
    let mut target_counts = vec![0u64; n + 1];
    let mut target_support = 0u64;
    let mut empty_weight = 0u64;
    let mut eta_matches = true;
    let mut v = InvariantViolations::default();
    let mut dagger: BTreeMap<u64, u64> = BTreeMap::new();

    let pack = |rows: &[u8], i: usize, j: usize| -> u64 {
        let mut key = 0u64;
        for (r, row) in rows.iter().enumerate() {
            key |= u64::from(*row) << (n * r);
        }
        key | (i as u64) << (n * n) | (j as u64) << (n * n + 3)
    };

    let mut idx = vec![0usize; n];
    let mut rows = vec![0u8; n];
    loop {
        for r in 0..n {
            rows[r] = subsets[r][idx[r]];
        }
        let fin = final_bits(&rows);
        let y = fin.count_ones() as usize;
        y_counts[y] += 1;
        let mid = rows[m - 1];

        let mut support_pairs = 0u64;
        for i in 0..n {
            for j in 0..n {
                if bit(mid, i) == bit(mid, j) {
                    continue;
                }
                support_pairs += 1;
                let (a, b) = (bit(fin, i), bit(fin, j));
                if !a && !b {
                    target_support += 1;
                    target_counts[y] += 1;
                }

                let mut pp = rows.clone();
                if !a {
                    swap(&mut pp, m, i, j);
                }
                let y_pp = final_bits(&pp).count_ones() as usize;
                if y_pp != y + if !a && !b { 2 } else { 0 } {
                    v.size_bias_gap += 1;
                }
                pair_counts[y][y_pp] += 1;

                // (weight, X†) for every branch of the construction.
                let mut outcomes: Vec<Outcome> = Vec::new();
                match (a, b) {
                    (false, false) => outcomes.push((unit, rows.clone(), None)),
                    (true, true) => {
                        let mut d = rows.clone();
                        swap(&mut d, m, i, j);
                        outcomes.push((unit, d, Some((m, i, j))));
                    }
                    _ => {
                        let (pivot, excluded) = if a { (i, j) } else { (j, i) };
                        for &s in &stages {
                            let row = rows[s - 1];
                            let cands: Vec<usize> = (0..n)
                                .filter(|&c| c != excluded && bit(row, c) != bit(row, pivot))
                                .collect();
                            if cands.is_empty() {
                                empty_weight += lcm;
                                continue;
                            }
                            let w = lcm / cands.len() as u64;
                            for c in cands {
                                let mut d = rows.clone();
                                swap(&mut d, s, pivot, c);
                                outcomes.push((w, d, Some((s, pivot, c))));
                            }
                        }
                    }
                }

                for (w, d, mv) in outcomes {
                    let dfin = final_bits(&d);
                    let y_dag = dfin.count_ones() as usize;
                    if bit(dfin, i) || bit(dfin, j) {
                        v.dagger_final_states += 1;
                    }
                    if bit(d[m - 1], i) == bit(d[m - 1], j) {
                        v.dagger_middle_toggles += 1;
                    }
                    let mut dd = d.clone();
                    swap(&mut dd, m, i, j);
                    if final_bits(&dd).count_ones() as usize != y_dag + 2 {
                        v.ddagger_gap += 1;
                    }
                    if y_dag.abs_diff(y) > 2 {
                        v.dagger_distance += 1;
                    }
                    if (1..=n).any(|r| d[r - 1].count_ones() as usize != r || dd[r - 1].count_ones() as usize != r) {
                        v.row_sums += 1;
                    }
                    let mut back = d.clone();
                    if let Some((s, p, c)) = mv {
                        swap(&mut back, s, p, c);
                    }
                    if back != rows {
                        v.involution += 1;
                    }
                    joint[y][y_dag] += w;
                    if options.keep_dagger_law {
                        *dagger.entry(pack(&d, i, j)).or_insert(0) += w;
                    }
                }
            }
        }
        if support_pairs != pairs_per_config {
            eta_matches = false;
        }

        // Odometer over the stage subsets.
        let mut r = 0;
        loop {
            idx[r] += 1;
            if idx[r] < subsets[r].len() {
                break;
            }
            idx[r] = 0;
            r += 1;
            if r == n {
                break;
            }
        }
        if r == n {
            break;
        }
    }

    let total_pairs = configurations * pairs_per_config;
    let total_weight = total_pairs * unit;
    let success_weight = total_weight - empty_weight;

    let y_law = law_from_counts(&y_counts, configurations)?;
    let mut y_pp_counts = vec![0u64; n + 3];
    let mut triple_atoms = Vec::new();
    let mu = Rational::from_ratio(n as i64, 2);
    let mut ne = 0u64;
    for (y, row) in pair_counts.iter().enumerate() {
        for (ypp, c) in row.iter().enumerate().filter(|(_, c)| **c > 0) {
            y_pp_counts[ypp] += c;
            if ypp != y {
                ne += c;
            }
            triple_atoms.push(TripleAtom::new(
                Rational::from_int(ypp as i64),
                Rational::from_int(y as i64),
                mu.clone(),
                rational(*c, total_pairs),
            ));
        }
    }
    let y_pp_law = law_from_counts(&y_pp_counts, total_pairs)?;
    let size_bias = ZbestTripleLaw::new(triple_atoms, y_law.clone())?;

    let mut dagger_counts = vec![0u64; n + 1];
    let mut y_y_dagger = Vec::new();
    let mut segments = Vec::new();
    let mut mean_abs_gap = Rational::from_int(0);
    let mut max_abs_gap = Rational::from_int(0);
    for (y, row) in joint.iter().enumerate() {
        for (yd, w) in row.iter().enumerate().filter(|(_, w)| **w > 0) {
            dagger_counts[yd] += w;
            let p = rational(*w, success_weight);
            let a = yd as i64 - y as i64;
            mean_abs_gap += p.clone() * mean_abs_shifted_uniform(a);
            max_abs_gap = max_abs_gap.max_of(Rational::from_int(a.abs().max((a + 2).abs())));
            y_y_dagger.push(((y as u32, yd as u32), p));
        }
    }
    for (yd, w) in dagger_counts.iter().enumerate().filter(|(_, w)| **w > 0) {
        segments.push(Segment {
            lo: Rational::from_int(yd as i64),
            hi: Rational::from_int(yd as i64 + 2),
            prob: rational(*w, success_weight),
        });
    }

    let dagger_law = options.keep_dagger_law.then(|| DaggerLaw {
        n,
        atoms: dagger.into_iter().map(|(k, w)| (k, rational(w, success_weight))).collect(),
        target_support,
    });

    Ok(Enumeration {
        n,
        stage_law: options.stage_law,
        stages,
        configurations,
        y_law,
        y_pp_law,
        size_bias,
        p_y_pp_ne_y: rational(ne, total_pairs),
        eta: Rational::from_ratio(2, (n * n) as i64) / Rational::from_int(configurations as i64),
        eta_matches: eta_matches && Rational::from_ratio(1, total_pairs as i64)
            == Rational::from_ratio(2, (n * n) as i64) / Rational::from_int(configurations as i64),
        empty_mass: rational(empty_weight, total_weight),
        y_dagger_law: law_from_counts(&dagger_counts, success_weight)?,
        target_y_dagger_law: law_from_counts(&target_counts, target_support)?,
        y_y_dagger,
        zero_bias: SegmentMixture::new(Vec::new(), segments)?,
        mean_abs_gap,
        max_abs_gap,
        violations: v,
        dagger_law,
    })
}

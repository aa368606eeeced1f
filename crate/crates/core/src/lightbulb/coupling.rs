use alloc::vec::Vec;

use rand::Rng;

use super::matrix::ToggleMatrix;
use crate::error::{Error, Result};

/// Law of the auxiliary stage `S` of the dagger coupling; always uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StageLaw {
    /// `{2, ..., n-2} \ {n/2}`, where both toggle values occur at least
    /// twice so the `K`/`L` candidate sets are never empty. Falls back to
    /// [`StageLaw::Full`] when that set is empty (`n = 4`).
    #[default]
    Interior,
    /// `{1, ..., n-1} \ {n/2}`.
    Full,
}

impl StageLaw {
    pub fn stages(self, n: usize) -> Vec<usize> {
        let m = n / 2;
        let interior: Vec<usize> = (2..=n.saturating_sub(2)).filter(|&s| s != m).collect();
        match self {
            Self::Interior if !interior.is_empty() => interior,
            _ => (1..n).filter(|&s| s != m).collect(),
        }
    }
}

pub(crate) fn check_even(n: usize) -> Result<()> {
    if n % 2 == 1 {
        return Err(Error::OddN { n });
    }
    if n < 4 {
        return Err(Error::NTooSmall { n, min: 4 });
    }
    Ok(())
}

/// Redraws every stage of `x` as a uniform subset of the right size.
///
/// Stage `r` is drawn by a partial Fisher–Yates shuffle of `min(r, n-r)`
/// steps from the identity order, selecting the toggled bulbs or their
/// complement, so stage `n` consumes no randomness.
pub(crate) fn fill_configuration<R: Rng + ?Sized>(x: &mut ToggleMatrix, perm: &mut Vec<usize>, rng: &mut R) {
    let n = x.n();
    perm.resize(n, 0);
    for r in 1..=n {
        for (k, p) in perm.iter_mut().enumerate() {
            *p = k;
        }
        let picks = r.min(n - r);
        for t in 0..picks {
            let u = rng.random_range(t..n);
            perm.swap(t, u);
        }
        let complement = picks < r;
        let row = x.row_mut(r);
        row.fill(0);
        if complement {
            for (w_idx, word) in row.iter_mut().enumerate() {
                let width = (n - 64 * w_idx).min(64);
                *word = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
            }
        }
        for &b in &perm[..picks] {
            row[b / 64] ^= 1u64 << (b % 64);
        }
    }
}

/// A configuration drawn from the lightbulb law.
pub fn sample_configuration<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ToggleMatrix {
    let mut x = ToggleMatrix::zeros(n);
    let mut perm = Vec::with_capacity(n);
    fill_configuration(&mut x, &mut perm, rng);
    x
}

/// `I` uniform, then `J` uniform over the bulbs whose middle-stage toggle
/// differs from that of `I`.
pub(crate) fn sample_ij<R: Rng + ?Sized>(x: &ToggleMatrix, rng: &mut R) -> (usize, usize) {
    let n = x.n();
    let m = n / 2;
    let i = rng.random_range(0..n);
    let t = rng.random_range(0..m);
    let j = x.nth_with(m, !x.get(m, i), None, t);
    (i, j)
}

/// Size-bias coupling: returns `(X'', I, J)` with `X'' = X` when bulb `I` is
/// on and `X'' = X` with the middle-stage toggles of `I` and `J`
/// interchanged otherwise.
pub fn sample_size_bias_coupling<R: Rng + ?Sized>(x: &ToggleMatrix, rng: &mut R) -> Result<(ToggleMatrix, usize, usize)> {
    check_even(x.n())?;
    let (i, j) = sample_ij(x, rng);
    let x_pp = if x.final_state(i) { x.clone() } else { x.swapped(x.n() / 2, i, j) };
    Ok((x_pp, i, j))
}

/// The involution `φ_ab` selected by the final states `(X_I, X_J) = (a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DaggerMove {
    /// `(0, 0)`.
    Identity,
    /// `(0, 1)`: interchange `J` and `L` at stage `S`.
    SwapJL { stage: usize, l: usize },
    /// `(1, 0)`: interchange `I` and `K` at stage `S`.
    SwapIK { stage: usize, k: usize },
    /// `(1, 1)`: interchange `I` and `J` at the middle stage.
    SwapMiddle,
}

impl DaggerMove {
    pub fn apply(&self, x: &ToggleMatrix, i: usize, j: usize) -> ToggleMatrix {
        match *self {
            Self::Identity => x.clone(),
            Self::SwapJL { stage, l } => x.swapped(stage, j, l),
            Self::SwapIK { stage, k } => x.swapped(stage, i, k),
            Self::SwapMiddle => x.swapped(x.n() / 2, i, j),
        }
    }

    pub fn stage(&self) -> Option<usize> {
        match *self {
            Self::SwapJL { stage, .. } | Self::SwapIK { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

/// One draw of the dagger coupling together with its base variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingSample {
    pub x: ToggleMatrix,
    pub i: usize,
    pub j: usize,
    pub s: Option<usize>,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub x_dagger: ToggleMatrix,
    pub x_ddagger: ToggleMatrix,
    pub y: usize,
    pub y_dagger: usize,
    pub y_ddagger: usize,
}

/// Picks the move for final states `(a, b)`. `S` is drawn only in the
/// mixed cases, then `K` or `L`.
pub(crate) fn draw_move<R: Rng + ?Sized>(
    x: &ToggleMatrix,
    i: usize,
    j: usize,
    a: bool,
    b: bool,
    stages: &[usize],
    rng: &mut R,
) -> Result<DaggerMove> {
    let (pivot, excluded) = match (a, b) {
        (false, false) => return Ok(DaggerMove::Identity),
        (true, true) => return Ok(DaggerMove::SwapMiddle),
        (true, false) => (i, j),
        (false, true) => (j, i),
    };
    let stage = stages[rng.random_range(0..stages.len())];
    let target = !x.get(stage, pivot);
    let count = x.count_with(stage, target, Some(excluded));
    if count == 0 {
        return Err(Error::EmptyCandidateSet { stage, bulb: pivot, excluded });
    }
    let pick = x.nth_with(stage, target, Some(excluded), rng.random_range(0..count));
    Ok(if a {
        DaggerMove::SwapIK { stage, k: pick }
    } else {
        DaggerMove::SwapJL { stage, l: pick }
    })
}

fn check_pair(x: &ToggleMatrix, i: usize, j: usize) -> Result<()> {
    check_even(x.n())?;
    if i >= x.n() || j >= x.n() {
        return Err(Error::InvalidParameter { name: "bulb index" });
    }
    let m = x.n() / 2;
    if x.get(m, i) == x.get(m, j) {
        return Err(Error::PreconditionViolation { i, j });
    }
    Ok(())
}

/// Dagger coupling with the default [`StageLaw`].
pub fn sample_dagger_coupling<R: Rng + ?Sized>(x: &ToggleMatrix, i: usize, j: usize, rng: &mut R) -> Result<CouplingSample> {
    sample_dagger_coupling_with(x, i, j, StageLaw::default(), rng)
}

/// `X† = φ_{X_i, X_j}(X)` and `X‡ = X†` with the middle-stage toggles of `i`
/// and `j` interchanged.
pub fn sample_dagger_coupling_with<R: Rng + ?Sized>(
    x: &ToggleMatrix,
    i: usize,
    j: usize,
    law: StageLaw,
    rng: &mut R,
) -> Result<CouplingSample> {
    check_pair(x, i, j)?;
    let stages = law.stages(x.n());
    let mv = draw_move(x, i, j, x.final_state(i), x.final_state(j), &stages, rng)?;
    let x_dagger = mv.apply(x, i, j);
    let x_ddagger = DaggerMove::SwapMiddle.apply(&x_dagger, i, j);
    let (k, l) = match mv {
        DaggerMove::SwapIK { k, .. } => (Some(k), None),
        DaggerMove::SwapJL { l, .. } => (None, Some(l)),
        _ => (None, None),
    };
    Ok(CouplingSample {
        i,
        j,
        s: mv.stage(),
        k,
        l,
        y: x.final_states().1,
        y_dagger: x_dagger.final_states().1,
        y_ddagger: x_ddagger.final_states().1,
        x: x.clone(),
        x_dagger,
        x_ddagger,
    })
}

/// `(Y, Y*)` with `Y* = Y† + 2U`, built from the public sampling steps.
pub fn zero_bias_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(usize, f64)> {
    check_even(n)?;
    let x = sample_configuration(n, rng);
    let (i, j) = sample_ij(&x, rng);
    let c = sample_dagger_coupling(&x, i, j, rng)?;
    let u: f64 = rng.random();
    Ok((c.y, c.y_dagger as f64 + 2.0 * u))
}

/// Summary of one joint draw from [`LightbulbSampler`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightbulbDraw {
    pub y: u32,
    pub y_pp: u32,
    /// `None` when the `K`/`L` candidate set was empty.
    pub y_dagger: Option<u32>,
    pub y_star: Option<f64>,
}

/// Allocation-free sampler of `(Y, Y'', Y†, Y*)`.
///
/// Consumes randomness in the same order as [`sample_configuration`],
/// the `(I, J)` draw of [`sample_size_bias_coupling`],
/// [`sample_dagger_coupling_with`] and finally `U`, so it reproduces the
/// composed public operations draw for draw.
#[derive(Debug, Clone)]
pub struct LightbulbSampler {
    x: ToggleMatrix,
    perm: Vec<usize>,
    stages: Vec<usize>,
}

impl LightbulbSampler {
    pub fn new(n: usize, law: StageLaw) -> Result<Self> {
        check_even(n)?;
        Ok(Self { x: ToggleMatrix::zeros(n), perm: Vec::with_capacity(n), stages: law.stages(n) })
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    /// The configuration behind the most recent draw.
    pub fn configuration(&self) -> &ToggleMatrix {
        &self.x
    }

    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> LightbulbDraw {
        fill_configuration(&mut self.x, &mut self.perm, rng);
        let parity = self.x.final_state_bits();
        let on = |b: usize| parity[b / 64] >> (b % 64) & 1 == 1;
        let y = parity.iter().map(|w| w.count_ones()).sum::<u32>();
        let (i, j) = sample_ij(&self.x, rng);
        let (a, b) = (on(i), on(j));
        let y_pp = if !a && !b { y + 2 } else { y };
        let flip = |bulb: usize| if on(bulb) { -1i64 } else { 1 };
        let y_dagger = match draw_move(&self.x, i, j, a, b, &self.stages, rng) {
            Err(_) => None,
            Ok(DaggerMove::Identity) => Some(y),
            // Each swap exchanges two unequal toggles and so flips both bulbs.
            Ok(DaggerMove::SwapMiddle) => Some((i64::from(y) + flip(i) + flip(j)) as u32),
            Ok(DaggerMove::SwapIK { k, .. }) => Some((i64::from(y) + flip(i) + flip(k)) as u32),
            Ok(DaggerMove::SwapJL { l, .. }) => Some((i64::from(y) + flip(j) + flip(l)) as u32),
        };
        let y_star = y_dagger.map(|yd| {
            let u: f64 = rng.random();
            f64::from(yd) + 2.0 * u
        });
        LightbulbDraw { y, y_pp, y_dagger, y_star }
    }
}

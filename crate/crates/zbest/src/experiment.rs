//! Exact and Monte Carlo runs over the two processes.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use zbest_core::bernoulli::{BernoulliSampler, BernoulliVector};
use zbest_core::distance::{dkw_halfwidth, exact_distances, DistanceMode, DistanceReport};
use zbest_core::lightbulb::{compute_bn, enumerate_exact, lightbulb_moments, EnumerationOptions, LightbulbSampler, StageLaw};
use zbest_core::{rational_from_decimal, FiniteDistribution, Rational, Scalar};

use crate::config::{ExperimentConfig, Mode, Process};
use crate::error::{ExperimentError, Result};
use crate::report::{ConfigEcho, CouplingStats, DistanceRecord, ExperimentReport, Moments};
use crate::substream::{block_rng, blocks};

/// `d(W, Z) <= 6/σ` for the lightbulb sum.
pub const LIGHTBULB_WASSERSTEIN: f64 = 6.0;
/// `d_K(W, Z) <= 8.12/σ` for the lightbulb sum.
pub const LIGHTBULB_KOLMOGOROV: f64 = 8.12;

/// Sufficient statistics of a run of coupled draws. Merging is exact for
/// the counts; the float sums are merged in block order.
#[derive(Debug, Clone, PartialEq)]
pub struct Tally {
    pub y_counts: Vec<u64>,
    pub draws: u64,
    pub moved: u64,
    pub failures: u64,
    pub sum_gap: f64,
    pub sum_gap_sq: f64,
    pub max_gap: f64,
}

impl Tally {
    pub fn new(max_y: usize) -> Self {
        Self { y_counts: vec![0; max_y + 1], draws: 0, moved: 0, failures: 0, sum_gap: 0.0, sum_gap_sq: 0.0, max_gap: 0.0 }
    }

    fn record(&mut self, y: u32, y_pp: u32, y_star: Option<f64>) {
        self.y_counts[y as usize] += 1;
        self.draws += 1;
        self.moved += u64::from(y_pp != y);
        match y_star {
            Some(s) => {
                let gap = (s - f64::from(y)).abs();
                self.sum_gap += gap;
                self.sum_gap_sq += gap * gap;
                self.max_gap = self.max_gap.max(gap);
            }
            None => self.failures += 1,
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        for (a, b) in self.y_counts.iter_mut().zip(&other.y_counts) {
            *a += b;
        }
        self.draws += other.draws;
        self.moved += other.moved;
        self.failures += other.failures;
        self.sum_gap += other.sum_gap;
        self.sum_gap_sq += other.sum_gap_sq;
        self.max_gap = self.max_gap.max(other.max_gap);
    }

    fn coupling_stats(&self) -> CouplingStats {
        let ok = (self.draws - self.failures) as f64;
        let mean = self.sum_gap / ok;
        let var = (self.sum_gap_sq / ok - mean * mean).max(0.0);
        CouplingStats {
            mean_abs_gap: mean,
            mean_abs_gap_se: (var / ok).sqrt(),
            max_abs_gap: self.max_gap,
            fraction_size_bias_moved: self.moved as f64 / self.draws as f64,
            failure_fraction: self.failures as f64 / self.draws as f64,
        }
    }

    /// Distances of the empirical law of `Y` to `N(μ, σ²)`, with DKW bands.
    /// Equivalent to sorting the draws, without materializing them.
    fn distances(&self, mu: f64, sigma: f64) -> Result<DistanceReport> {
        let total = self.draws as f64;
        let empirical = FiniteDistribution::new(
            self.y_counts
                .iter()
                .enumerate()
                .filter(|(_, c)| **c > 0)
                .map(|(y, c)| (y as f64, *c as f64 / total)),
        )?;
        let mut report = exact_distances(&empirical, mu, sigma)?;
        let eps = dkw_halfwidth(self.draws as usize);
        report.kolmogorov_ci_halfwidth = eps;
        report.wasserstein_ci_halfwidth = eps * (empirical.max_value() - empirical.min_value());
        report.mode = DistanceMode::MonteCarlo;
        Ok(report)
    }
}

/// Runs `draw_block(block, draws, tally)` over all blocks on `workers`
/// threads and merges the tallies in block order.
pub fn run_blocks<F>(samples: u64, workers: usize, max_y: usize, draw_block: F) -> Tally
where
    F: Fn(u64, u64, &mut Tally) + Sync,
{
    let all: Vec<(u64, u64)> = blocks(samples).collect();
    let next = AtomicU64::new(0);
    let done: Mutex<Vec<(u64, Tally)>> = Mutex::new(Vec::with_capacity(all.len()));
    std::thread::scope(|scope| {
        for _ in 0..workers.min(all.len()).max(1) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed) as usize;
                let Some(&(block, draws)) = all.get(idx) else { break };
                let mut t = Tally::new(max_y);
                draw_block(block, draws, &mut t);
                done.lock().expect("no worker panicked").push((block, t));
            });
        }
    });
    let mut done = done.into_inner().expect("no worker panicked");
    done.sort_by_key(|(b, _)| *b);
    let mut total = Tally::new(max_y);
    for (_, t) in &done {
        total.merge(t);
    }
    total
}

fn lightbulb_tally(config: &ExperimentConfig, n: usize) -> Result<Tally> {
    LightbulbSampler::new(n, StageLaw::Interior)?;
    Ok(run_blocks(config.samples, config.workers, n, |block, draws, tally| {
        let mut rng = block_rng(config.seed, block);
        let mut sampler = LightbulbSampler::new(n, StageLaw::Interior).expect("n checked above");
        for _ in 0..draws {
            let d = sampler.draw(&mut rng);
            tally.record(d.y, d.y_pp, d.y_star);
        }
    }))
}

fn bernoulli_tally(config: &ExperimentConfig, bv: &BernoulliVector<f64>) -> Tally {
    let sampler = BernoulliSampler::new(bv);
    run_blocks(config.samples, config.workers, bv.len(), |block, draws, tally| {
        let mut rng = block_rng(config.seed, block);
        for _ in 0..draws {
            let d = sampler.draw(&mut rng);
            tally.record(d.y, d.y_ddagger, Some(d.y_star));
        }
    })
}

/// `p` as the exact rational its shortest decimal form denotes.
pub fn exact_probabilities(p: &[f64]) -> Result<Vec<Rational>> {
    p.iter()
        .map(|v| {
            rational_from_decimal(&v.to_string()).ok_or_else(|| ExperimentError::InvalidConfig {
                field: "p",
                message: format!("{v} has no exact decimal form"),
            })
        })
        .collect()
}

fn f(q: &Rational) -> f64 {
    Scalar::to_f64(q)
}

struct Outcome {
    moments: Moments,
    distances: DistanceReport,
    bounds: (f64, f64),
    stats: CouplingStats,
    b_n: Option<f64>,
}

fn lightbulb(config: &ExperimentConfig, n: usize) -> Result<Outcome> {
    let m = lightbulb_moments::<Rational>(n)?;
    let moments = Moments { mu: f(&m.mu), sigma2: f(&m.sigma2), lambda_n: Some(f(&m.lambda_n)) };
    let sigma = moments.sigma2.sqrt();
    let (distances, stats) = match config.mode {
        Mode::Exact => {
            let e = enumerate_exact(n, EnumerationOptions::default())?;
            let stats = CouplingStats {
                mean_abs_gap: f(&e.mean_abs_gap),
                mean_abs_gap_se: 0.0,
                max_abs_gap: f(&e.max_abs_gap),
                fraction_size_bias_moved: f(&e.p_y_pp_ne_y),
                failure_fraction: f(&e.empty_mass),
            };
            (exact_distances(&e.y_law.to_f64(), moments.mu, sigma)?, stats)
        }
        Mode::MonteCarlo => {
            let t = lightbulb_tally(config, n)?;
            (t.distances(moments.mu, sigma)?, t.coupling_stats())
        }
    };
    Ok(Outcome {
        moments,
        distances,
        bounds: (LIGHTBULB_WASSERSTEIN / sigma, LIGHTBULB_KOLMOGOROV / sigma),
        stats,
        b_n: (n >= 6).then(|| compute_bn(n)).transpose()?,
    })
}

fn bernoulli(config: &ExperimentConfig, p: &[f64]) -> Result<Outcome> {
    let (moments, distances, stats, bounds) = match config.mode {
        Mode::Exact => {
            let bv = BernoulliVector::new(exact_probabilities(p)?)?;
            let moments = Moments { mu: f(&bv.mu()), sigma2: f(&bv.sigma2()), lambda_n: None };
            let sigma = moments.sigma2.sqrt();
            let stats = CouplingStats {
                mean_abs_gap: f(&bv.exact_mean_abs_gap()),
                mean_abs_gap_se: 0.0,
                // sup |U - X_I|.
                max_abs_gap: 1.0,
                // P(X_I = 0) = Σ (p_i/μ)(1 - p_i).
                fraction_size_bias_moved: f(&(bv.sigma2() / bv.mu())),
                failure_fraction: 0.0,
            };
            let b = bv.bounds();
            (moments, exact_distances(&bv.exact_pmf().to_f64(), f(&bv.mu()), sigma)?, stats, (b.wasserstein, b.kolmogorov))
        }
        Mode::MonteCarlo => {
            let bv = BernoulliVector::new(p.to_vec())?;
            let moments = Moments { mu: bv.mu(), sigma2: bv.sigma2(), lambda_n: None };
            let t = bernoulli_tally(config, &bv);
            let b = bv.bounds();
            (moments.clone(), t.distances(moments.mu, moments.sigma2.sqrt())?, t.coupling_stats(), (b.wasserstein, b.kolmogorov))
        }
    };
    Ok(Outcome { moments, distances, bounds, stats, b_n: None })
}

/// Computes the report for `config` and writes it to `config.output_path`
/// when one is set.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let outcome = match config.process {
        Process::Lightbulb => lightbulb(config, config.n.expect("validated"))?,
        Process::Bernoulli => bernoulli(config, config.p.as_deref().expect("validated"))?,
    };
    let sigma = outcome.moments.sigma2.sqrt();
    let distances: DistanceRecord = outcome.distances.scale_wasserstein(1.0 / sigma).into();
    let (bound_w, bound_k) = outcome.bounds;
    let mut report = ExperimentReport {
        config: ConfigEcho::from(config),
        moments: outcome.moments,
        bound_wasserstein: bound_w,
        bound_kolmogorov: bound_k,
        bound_margin_w: bound_w - distances.wasserstein,
        bound_margin_k: bound_k - distances.kolmogorov,
        distances,
        coupling_stats: outcome.stats,
        b_n_comparison: outcome.b_n,
        wall_time_seconds: None,
    };
    if config.timing {
        report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    if let Some(path) = &config.output_path {
        std::fs::write(path, report.render(config.format)?)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet(mut c: ExperimentConfig) -> ExperimentConfig {
        c.timing = false;
        c
    }

    #[test]
    fn lightbulb_exact_n4() {
        let r = run(&quiet(ExperimentConfig::lightbulb(4, Mode::Exact))).unwrap();
        assert_eq!(r.moments.sigma2, 1.0);
        assert_eq!(r.moments.lambda_n, Some(0.0));
        assert_eq!(r.bound_kolmogorov, 8.12);
        assert_eq!(r.bound_wasserstein, 6.0);
        assert!(r.bound_margin_k > 0.0 && r.bound_margin_w > 0.0);
        assert_eq!(r.b_n_comparison, None);
        assert_eq!(r.coupling_stats.failure_fraction, 0.125);
        assert!(r.coupling_stats.max_abs_gap <= 4.0);
    }

    #[test]
    fn bernoulli_exact_ten_copies() {
        let r = run(&quiet(ExperimentConfig::bernoulli(vec![0.3; 10], Mode::Exact))).unwrap();
        assert!((r.bound_kolmogorov - 2.03 / 2.1f64.sqrt()).abs() < 1e-15);
        assert!(r.bound_margin_k > 0.0 && r.bound_margin_w > 0.0);
        assert_eq!(r.coupling_stats.mean_abs_gap, 0.5);
        assert!((r.distances.kolmogorov - 0.149_610_718_4).abs() < 1e-9);
        assert!((r.distances.wasserstein - 0.180_920_152_769_223_4).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_is_worker_independent() {
        let mut c = quiet(ExperimentConfig::lightbulb(10, Mode::MonteCarlo));
        c.samples = 3 * crate::substream::BLOCK_SIZE + 17;
        c.seed = 99;
        let one = run(&c).unwrap();
        c.workers = 5;
        assert_eq!(run(&c).unwrap(), one);
        assert_eq!(one.coupling_stats.failure_fraction, 0.0);
        assert!(one.coupling_stats.max_abs_gap <= 4.0);
        c.seed = 100;
        assert_ne!(run(&c).unwrap(), one);
    }

    #[test]
    fn bernoulli_monte_carlo_gap_near_half() {
        let mut c = quiet(ExperimentConfig::bernoulli(vec![0.2, 0.5, 0.9], Mode::MonteCarlo));
        c.samples = 200_000;
        let r = run(&c).unwrap();
        let s = &r.coupling_stats;
        assert!((s.mean_abs_gap - 0.5).abs() < 4.0 * s.mean_abs_gap_se);
        assert!(s.max_abs_gap <= 1.0);
        assert!(r.passes_check());
    }

    #[test]
    fn decimal_probabilities_are_exact() {
        let q = exact_probabilities(&[0.3, 0.125]).unwrap();
        assert_eq!(q[0], Rational::from_ratio(3, 10));
        assert_eq!(q[1], Rational::from_ratio(1, 8));
    }
}

//! The persistent record of one run.

use serde::{Deserialize, Serialize};
use zbest_core::distance::{DistanceMode, DistanceReport};

use crate::config::{ExperimentConfig, Format, Mode, Process};
use crate::error::Result;

/// The experiment-defining part of the configuration. Worker count and
/// output location do not change the result and are left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub process: Process,
    pub n: Option<usize>,
    pub p: Option<Vec<f64>>,
    pub mode: Mode,
    /// `None` in exact mode.
    pub samples: Option<u64>,
    pub seed: u64,
}

impl From<&ExperimentConfig> for ConfigEcho {
    fn from(c: &ExperimentConfig) -> Self {
        Self {
            process: c.process,
            n: c.n,
            p: c.p.clone(),
            mode: c.mode,
            samples: (c.mode == Mode::MonteCarlo).then_some(c.samples),
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mu: f64,
    pub sigma2: f64,
    pub lambda_n: Option<f64>,
}

/// Distances of the standardized sum `(Y - μ)/σ` to `N(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRecord {
    pub kolmogorov: f64,
    pub wasserstein: f64,
    pub kolmogorov_ci_halfwidth: f64,
    pub wasserstein_ci_halfwidth: f64,
    pub mode: Mode,
}

impl From<DistanceReport> for DistanceRecord {
    fn from(r: DistanceReport) -> Self {
        Self {
            kolmogorov: r.kolmogorov,
            wasserstein: r.wasserstein,
            kolmogorov_ci_halfwidth: r.kolmogorov_ci_halfwidth,
            wasserstein_ci_halfwidth: r.wasserstein_ci_halfwidth,
            mode: match r.mode {
                DistanceMode::Exact => Mode::Exact,
                DistanceMode::MonteCarlo => Mode::MonteCarlo,
            },
        }
    }
}

/// Gap statistics are over coupled draws that produced `Y*`; the failure
/// fraction counts draws whose dagger step had no candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingStats {
    pub mean_abs_gap: f64,
    /// Standard error of `mean_abs_gap`; zero in exact mode.
    pub mean_abs_gap_se: f64,
    pub max_abs_gap: f64,
    /// `P(Y'' != Y)`.
    pub fraction_size_bias_moved: f64,
    pub failure_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ConfigEcho,
    pub moments: Moments,
    pub distances: DistanceRecord,
    pub bound_wasserstein: f64,
    pub bound_kolmogorov: f64,
    pub bound_margin_w: f64,
    pub bound_margin_k: f64,
    pub coupling_stats: CouplingStats,
    /// Former lightbulb Kolmogorov constant `B_n`, for `n >= 6`.
    pub b_n_comparison: Option<f64>,
    pub wall_time_seconds: Option<f64>,
}

pub const CSV_COLUMNS: [&str; 25] = [
    "process",
    "n",
    "p",
    "mode",
    "samples",
    "seed",
    "mu",
    "sigma2",
    "lambda_n",
    "kolmogorov",
    "wasserstein",
    "kolmogorov_ci_halfwidth",
    "wasserstein_ci_halfwidth",
    "distance_mode",
    "bound_wasserstein",
    "bound_kolmogorov",
    "bound_margin_w",
    "bound_margin_k",
    "mean_abs_gap",
    "mean_abs_gap_se",
    "max_abs_gap",
    "fraction_size_bias_moved",
    "failure_fraction",
    "b_n_comparison",
    "wall_time_seconds",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::MonteCarlo => "monte_carlo",
    }
}

impl ExperimentReport {
    /// Exact runs need nonnegative margins; Monte Carlo runs may fall short
    /// by at most the confidence half-width.
    pub fn passes_check(&self) -> bool {
        let (slack_k, slack_w) = match self.config.mode {
            Mode::Exact => (0.0, 0.0),
            Mode::MonteCarlo => (self.distances.kolmogorov_ci_halfwidth, self.distances.wasserstein_ci_halfwidth),
        };
        self.bound_margin_k >= -slack_k && self.bound_margin_w >= -slack_w
    }

    /// Same report with the timing removed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self { wall_time_seconds: None, ..self.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn csv_row(&self) -> Vec<String> {
        let c = &self.config;
        let p = c.p.as_ref().map(|p| p.iter().map(f64::to_string).collect::<Vec<_>>().join(";"));
        let s = &self.coupling_stats;
        vec![
            match c.process {
                Process::Lightbulb => "lightbulb".into(),
                Process::Bernoulli => "bernoulli".into(),
            },
            opt(&c.n),
            p.unwrap_or_default(),
            mode_name(c.mode).into(),
            opt(&c.samples),
            c.seed.to_string(),
            self.moments.mu.to_string(),
            self.moments.sigma2.to_string(),
            opt(&self.moments.lambda_n),
            self.distances.kolmogorov.to_string(),
            self.distances.wasserstein.to_string(),
            self.distances.kolmogorov_ci_halfwidth.to_string(),
            self.distances.wasserstein_ci_halfwidth.to_string(),
            mode_name(self.distances.mode).into(),
            self.bound_wasserstein.to_string(),
            self.bound_kolmogorov.to_string(),
            self.bound_margin_w.to_string(),
            self.bound_margin_k.to_string(),
            s.mean_abs_gap.to_string(),
            s.mean_abs_gap_se.to_string(),
            s.max_abs_gap.to_string(),
            s.fraction_size_bias_moved.to_string(),
            s.failure_fraction.to_string(),
            opt(&self.b_n_comparison),
            opt(&self.wall_time_seconds),
        ]
    }

    /// Header plus one row.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS)?;
        w.write_record(self.csv_row())?;
        let bytes = w.into_inner().map_err(|e| crate::error::ExperimentError::Format(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

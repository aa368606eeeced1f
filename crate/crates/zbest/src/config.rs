//! Run configuration and its validation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, Result};

/// Largest Bernoulli vector whose pmf is convolved exactly.
pub const MAX_EXACT_BERNOULLI: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    Lightbulb,
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    #[value(name = "mc", alias = "monte-carlo", alias = "monte_carlo")]
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub process: Process,
    /// Number of bulbs; lightbulb only.
    pub n: Option<usize>,
    /// Success probabilities; Bernoulli only.
    pub p: Option<Vec<f64>>,
    pub mode: Mode,
    /// Coupled draws; Monte Carlo only.
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    /// Where the report goes; `None` keeps it in memory.
    pub output_path: Option<PathBuf>,
    pub format: Format,
    /// Record `wall_time_seconds`. Off for byte-reproducible reports.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn lightbulb(n: usize, mode: Mode) -> Self {
        Self::base(Process::Lightbulb, Some(n), None, mode)
    }

    pub fn bernoulli(p: Vec<f64>, mode: Mode) -> Self {
        Self::base(Process::Bernoulli, None, Some(p), mode)
    }

    fn base(process: Process, n: Option<usize>, p: Option<Vec<f64>>, mode: Mode) -> Self {
        Self {
            process,
            n,
            p,
            mode,
            samples: 100_000,
            seed: 0,
            workers: 1,
            output_path: None,
            format: Format::Json,
            timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |field: &'static str, message: String| Err(ExperimentError::InvalidConfig { field, message });
        if self.workers == 0 {
            return invalid("workers", "must be at least 1".into());
        }
        if self.mode == Mode::MonteCarlo && self.samples < 2 {
            return invalid("samples", format!("need at least 2 draws, got {}", self.samples));
        }
        match self.process {
            Process::Lightbulb => {
                if self.p.is_some() {
                    return invalid("p", "only valid for the bernoulli process".into());
                }
                let Some(n) = self.n else {
                    return invalid("n", "required for the lightbulb process".into());
                };
                if n % 2 == 1 || n < 4 {
                    return invalid("n", format!("must be even and at least 4, got {n}"));
                }
                if self.mode == Mode::Exact && n != 4 && n != 6 {
                    return invalid("n", format!("exact mode supports n = 4 or 6, got {n}"));
                }
            }
            Process::Bernoulli => {
                if self.n.is_some() {
                    return invalid("n", "only valid for the lightbulb process".into());
                }
                let Some(p) = &self.p else {
                    return invalid("p", "required for the bernoulli process".into());
                };
                if p.is_empty() {
                    return invalid("p", "needs at least one probability".into());
                }
                if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v < 1.0)) {
                    return invalid("p", format!("p[{i}] = {v} is not in (0, 1)"));
                }
                if self.mode == Mode::Exact && p.len() > MAX_EXACT_BERNOULLI {
                    return invalid(
                        "p",
                        format!("exact mode supports at most {MAX_EXACT_BERNOULLI} coordinates, got {}", p.len()),
                    );
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(c: &ExperimentConfig) -> &'static str {
        match c.validate() {
            Err(ExperimentError::InvalidConfig { field, .. }) => field,
            other => panic!("expected InvalidConfig, got {other:?}"),
        }
    }

    #[test]
    fn accepts_valid_configs() {
        ExperimentConfig::lightbulb(4, Mode::Exact).validate().unwrap();
        ExperimentConfig::lightbulb(100, Mode::MonteCarlo).validate().unwrap();
        ExperimentConfig::bernoulli(vec![0.3; 30], Mode::Exact).validate().unwrap();
    }

    #[test]
    fn rejects_with_field_names() {
        assert_eq!(field(&ExperimentConfig::lightbulb(5, Mode::MonteCarlo)), "n");
        assert_eq!(field(&ExperimentConfig::lightbulb(2, Mode::MonteCarlo)), "n");
        assert_eq!(field(&ExperimentConfig::lightbulb(8, Mode::Exact)), "n");
        assert_eq!(field(&ExperimentConfig::bernoulli(vec![0.3; 31], Mode::Exact)), "p");
        assert_eq!(field(&ExperimentConfig::bernoulli(vec![0.3, 1.0], Mode::MonteCarlo)), "p");
        assert_eq!(field(&ExperimentConfig::bernoulli(vec![], Mode::MonteCarlo)), "p");
        let mut c = ExperimentConfig::lightbulb(4, Mode::MonteCarlo);
        c.workers = 0;
        assert_eq!(field(&c), "workers");
        c.workers = 1;
        c.samples = 1;
        assert_eq!(field(&c), "samples");
        c.samples = 10;
        c.p = Some(vec![0.5]);
        assert_eq!(field(&c), "p");
    }
}

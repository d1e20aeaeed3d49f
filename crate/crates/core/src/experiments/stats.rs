use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Two-sided standard normal quantile for confidence `level`.
pub fn normal_quantile(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param(format!("confidence level {level} outside (0, 1)")));
    }
    Ok(Normal::standard().inverse_cdf(1.0 - (1.0 - level) / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodStats {
    /// 1-based period.
    pub t: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl PeriodStats {
    pub fn half_width(&self) -> f64 {
        self.ci_high - self.mean
    }
}

/// Per-period mean and normal-approximation confidence band over runs.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub points: Vec<PeriodStats>,
    pub n_runs: usize,
    pub confidence: f64,
}

/// Mean of the last few periods and the mean CI half-width over them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSummary {
    pub mean: f64,
    pub half_width: f64,
}

impl AggregateSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn means(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.mean)
    }

    /// Summary of the final `periods` periods.
    pub fn tail(&self, periods: usize) -> TailSummary {
        let window = &self.points[self.points.len().saturating_sub(periods)..];
        let k = window.len().max(1) as f64;
        TailSummary {
            mean: window.iter().map(|p| p.mean).sum::<f64>() / k,
            half_width: window.iter().map(|p| p.half_width()).sum::<f64>() / k,
        }
    }
}

/// Aggregates an `R × T` matrix (one row per run).
pub fn aggregate(matrix: &[Vec<f64>], confidence: f64) -> Result<AggregateSeries> {
    let runs = matrix.len();
    if runs < 2 {
        return Err(Error::param(format!("confidence intervals need at least 2 runs, got {runs}")));
    }
    let z = normal_quantile(confidence)?;
    let periods = matrix[0].len();
    if matrix.iter().any(|row| row.len() != periods) {
        return Err(Error::param("runs have different lengths"));
    }
    let r = runs as f64;
    let points = (0..periods)
        .map(|t| {
            let mean = matrix.iter().map(|row| row[t]).sum::<f64>() / r;
            let var = matrix.iter().map(|row| (row[t] - mean).powi(2)).sum::<f64>() / (r - 1.0);
            let half = z * var.sqrt() / r.sqrt();
            PeriodStats {
                t: t + 1,
                mean,
                ci_low: mean - half,
                ci_high: mean + half,
            }
        })
        .collect();
    Ok(AggregateSeries {
        points,
        n_runs: runs,
        confidence,
    })
}

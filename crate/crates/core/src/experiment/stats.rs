//! Log-odds transform and the paired t-test.

use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

/// Clamp applied before taking log-odds, so 0 and 1 stay finite.
pub const LOG_ODDS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("paired samples differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("paired t needs at least 2 pairs, got {0}")]
    TooFewPairs(usize),
    #[error("degenerate variance: every difference equals {mean}")]
    DegenerateVariance { mean: f64 },
}

/// `ln(p' / (1 - p'))` with `p'` clamped to `[eps, 1 - eps]`.
pub fn log_odds(p: f64) -> f64 {
    let p = p.clamp(LOG_ODDS_EPS, 1.0 - LOG_ODDS_EPS);
    (p / (1.0 - p)).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedT {
    pub t: f64,
    pub df: usize,
}

impl PairedT {
    /// Two-sided test at the given confidence, e.g. `0.95`.
    pub fn significant_at(&self, confidence: f64) -> bool {
        if self.t.is_nan() {
            return false;
        }
        self.t.abs() > t_critical(self.df, confidence)
    }
}

/// Paired t on `a - b`, using the sample standard deviation.
pub fn paired_t(a: &[f64], b: &[f64]) -> Result<PairedT, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(StatsError::TooFewPairs(n));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let ss: f64 = d.iter().map(|x| (x - mean) * (x - mean)).sum();
    let df = n - 1;
    if d.iter().all(|&x| x == d[0]) {
        return if d[0] == 0.0 {
            Ok(PairedT { t: 0.0, df })
        } else {
            Err(StatsError::DegenerateVariance { mean: d[0] })
        };
    }
    let sd = (ss / df as f64).sqrt();
    Ok(PairedT {
        t: mean / (sd / (n as f64).sqrt()),
        df,
    })
}

/// Two-sided critical value of Student's t with `df` degrees of freedom.
pub fn t_critical(df: usize, confidence: f64) -> f64 {
    assert!(df >= 1, "t_critical needs df >= 1");
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1 is a valid Student's t");
    dist.inverse_cdf(0.5 + confidence / 2.0)
}

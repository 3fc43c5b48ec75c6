//! Scalar accuracy metrics over velocity-norm series.
//!
//! All variances use the population (1/N) normalization.

use serde::{Deserialize, Serialize};

use crate::dvl::BodyVelocity;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("series length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {0} samples, got {1}")]
    TooShort(usize, usize),
    #[error("ground truth has zero variance; R² and VAF are undefined")]
    ZeroVariance,
    #[error("baseline RMSE must be positive, got {0}")]
    NonPositiveBaseline(f64),
}

fn check(x: &[f64], xh: &[f64], min: usize) -> Result<(), MetricsError> {
    if x.len() != xh.len() {
        return Err(MetricsError::LengthMismatch(x.len(), xh.len()));
    }
    if x.len() < min {
        return Err(MetricsError::TooShort(min, x.len()));
    }
    Ok(())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn pop_var(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

pub fn rmse(x: &[f64], xh: &[f64]) -> Result<f64, MetricsError> {
    check(x, xh, 1)?;
    let ss: f64 = x.iter().zip(xh).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((ss / x.len() as f64).sqrt())
}

pub fn mae(x: &[f64], xh: &[f64]) -> Result<f64, MetricsError> {
    check(x, xh, 1)?;
    let s: f64 = x.iter().zip(xh).map(|(a, b)| (a - b).abs()).sum();
    Ok(s / x.len() as f64)
}

/// Coefficient of determination `1 − SS_res / SS_tot`.
pub fn r2(x: &[f64], xh: &[f64]) -> Result<f64, MetricsError> {
    check(x, xh, 2)?;
    let m = mean(x);
    let ss_tot: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    if ss_tot == 0.0 {
        return Err(MetricsError::ZeroVariance);
    }
    let ss_res: f64 = x.iter().zip(xh).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Variance accounted for, percent: `100·(1 − var(x − x̂) / var(x))`.
pub fn vaf(x: &[f64], xh: &[f64]) -> Result<f64, MetricsError> {
    check(x, xh, 2)?;
    let vx = pop_var(x);
    if vx == 0.0 {
        return Err(MetricsError::ZeroVariance);
    }
    let err: Vec<f64> = x.iter().zip(xh).map(|(a, b)| a - b).collect();
    Ok(100.0 * (1.0 - pop_var(&err) / vx))
}

/// RMSE improvement of `method` over `baseline`, percent.
pub fn improvement(baseline_rmse: f64, method_rmse: f64) -> Result<f64, MetricsError> {
    if !(baseline_rmse > 0.0) {
        return Err(MetricsError::NonPositiveBaseline(baseline_rmse));
    }
    Ok(100.0 * (baseline_rmse - method_rmse) / baseline_rmse)
}

pub fn norms(v: &[BodyVelocity]) -> Vec<f64> {
    v.iter().map(BodyVelocity::norm).collect()
}

/// Per-axis RMSE of velocity vectors; a diagnostic, not a headline metric.
pub fn axis_rmse(truth: &[BodyVelocity], pred: &[BodyVelocity]) -> Result<[f64; 3], MetricsError> {
    check_len(truth.len(), pred.len())?;
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let ss: f64 = truth
            .iter()
            .zip(pred)
            .map(|(a, b)| (a.0[k] - b.0[k]).powi(2))
            .sum();
        *o = (ss / truth.len() as f64).sqrt();
    }
    Ok(out)
}

fn check_len(a: usize, b: usize) -> Result<(), MetricsError> {
    if a != b {
        return Err(MetricsError::LengthMismatch(a, b));
    }
    if a == 0 {
        return Err(MetricsError::TooShort(1, 0));
    }
    Ok(())
}

/// Norm-based accuracy summary for one estimation method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub rmse: f64,
    pub mae: f64,
    /// `None` when the ground-truth norm is constant (R² undefined).
    pub r2: Option<f64>,
    /// `None` when the ground-truth norm is constant (VAF undefined).
    pub vaf: Option<f64>,
    pub n: usize,
    pub axis_rmse: [f64; 3],
    pub improvement_vs_baseline: Option<f64>,
}

impl EvalReport {
    pub fn from_velocities(
        method: &str,
        truth: &[BodyVelocity],
        pred: &[BodyVelocity],
    ) -> Result<Self, MetricsError> {
        check_len(truth.len(), pred.len())?;
        let x = norms(truth);
        let xh = norms(pred);
        let defined = |r: Result<f64, MetricsError>| match r {
            Ok(v) => Ok(Some(v)),
            Err(MetricsError::ZeroVariance) | Err(MetricsError::TooShort(..)) => Ok(None),
            Err(e) => Err(e),
        };
        Ok(Self {
            method: method.to_string(),
            rmse: rmse(&x, &xh)?,
            mae: mae(&x, &xh)?,
            r2: defined(r2(&x, &xh))?,
            vaf: defined(vaf(&x, &xh))?,
            n: x.len(),
            axis_rmse: axis_rmse(truth, pred)?,
            improvement_vs_baseline: None,
        })
    }

    pub fn with_baseline(mut self, baseline_rmse: f64) -> Result<Self, MetricsError> {
        self.improvement_vs_baseline = Some(improvement(baseline_rmse, self.rmse)?);
        Ok(self)
    }
}

use serde::{Deserialize, Serialize};

use super::special::student_t_two_sided_p;
use super::StatsError;

/// Simple linear regression `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OlsResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n: usize,
    pub slope_stderr: f64,
    /// Two-sided p-value for `slope = 0` with `n - 2` degrees of freedom.
    pub p_value: f64,
    /// Set when `y` is constant (SST = 0); `r_squared` is then reported as 0.
    pub degenerate: bool,
}

pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<OlsResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFewObservations { needed: 3, got: n });
    }
    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|xi| (xi - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(StatsError::DegenerateRegressor);
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - x_mean) * (yi - y_mean)).sum();
    let sst: f64 = y.iter().map(|yi| (yi - y_mean).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - intercept - slope * xi).powi(2))
        .sum();

    let df = nf - 2.0;
    let slope_stderr = (sse / df / sxx).sqrt();
    let degenerate = sst == 0.0;
    let r_squared = if degenerate { 0.0 } else { (1.0 - sse / sst).clamp(0.0, 1.0) };
    let p_value = if slope_stderr == 0.0 {
        if slope == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        student_t_two_sided_p(slope / slope_stderr, df)
    };

    Ok(OlsResult {
        slope,
        intercept,
        r_squared,
        n,
        slope_stderr,
        p_value,
        degenerate,
    })
}

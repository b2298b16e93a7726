//! Pearson correlation and Fisher-z averaging of correlations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    /// tanh of the mean Fisher z.
    pub r_mean: f64,
    /// One-sided standard error mapped back through tanh; 0 for one group.
    pub se: f64,
    pub n_groups: usize,
}

/// Sample Pearson correlation. Needs at least 3 points and non-constant
/// series; degenerate inputs are rejected rather than coerced to 0.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::SeriesLengthMismatch { x: xs.len(), y: ys.len() });
    }
    if xs.len() < 3 {
        return Err(Error::TooFewPoints(xs.len()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ConstantSeries("x"));
    }
    if syy == 0.0 {
        return Err(Error::ConstantSeries("y"));
    }
    // clamp guards the |r| <= 1 invariant against rounding
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Averages correlations through Fisher z: z = atanh(r), r_mean = tanh(mean z),
/// se = tanh(mean z + sd(z)/sqrt(N)) - r_mean with the sample (N-1) deviation.
pub fn fisher_z_mean(rs: &[f64]) -> Result<CorrelationSummary> {
    if rs.is_empty() {
        return Err(Error::TooFewPoints(0));
    }
    for &r in rs {
        if !(r.abs() < 1.0) {
            return Err(Error::CorrelationOutOfRange(r));
        }
    }
    let n = rs.len();
    let zs: Vec<f64> = rs.iter().map(|&r| r.atanh()).collect();
    let z_mean = zs.iter().sum::<f64>() / n as f64;
    let r_mean = z_mean.tanh();
    let se = if n == 1 {
        0.0
    } else {
        let var = zs.iter().map(|z| (z - z_mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        (z_mean + var.sqrt() / (n as f64).sqrt()).tanh() - r_mean
    };
    Ok(CorrelationSummary { r_mean, se, n_groups: n })
}

//! Grid comparison of a computed quantity against an envelope, in log form.

use crate::error::{param, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRatioStats {
    pub min: f64,
    pub max: f64,
    /// Geometric mean of the ratio (not its log).
    pub geomean: f64,
    /// Least-squares slope of the log-ratio against `r^{2ℓ}`.
    pub slope_r2l: f64,
    /// Least-squares slope of the log-ratio against `ln(1+r)`.
    pub slope_log: f64,
}

/// `value` and `envelope` hold natural logs, since both overflow doubles at
/// moderate radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub params: Value,
    pub scale: String,
    pub ell: f64,
    pub grid: Vec<f64>,
    pub value: Vec<f64>,
    pub envelope: Vec<f64>,
    pub log_ratio: LogRatioStats,
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return 0.0;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    sxy / sxx
}

impl RatioReport {
    pub fn new(params: Value, ell: f64, grid: Vec<f64>, ln_value: Vec<f64>, ln_envelope: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return Err(param("grid", "must be non-empty"));
        }
        if grid.len() != ln_value.len() || grid.len() != ln_envelope.len() {
            return Err(param("grid", "grid, value and envelope lengths differ"));
        }
        let log_ratio = Self::stats(ell, &grid, &ln_value, &ln_envelope);
        Ok(RatioReport { params, scale: "ln".into(), ell, grid, value: ln_value, envelope: ln_envelope, log_ratio })
    }

    fn stats(ell: f64, grid: &[f64], v: &[f64], e: &[f64]) -> LogRatioStats {
        let lr: Vec<f64> = v.iter().zip(e).map(|(a, b)| a - b).collect();
        let r2l: Vec<f64> = grid.iter().map(|r| r.powf(2.0 * ell)).collect();
        let lg: Vec<f64> = grid.iter().map(|r| r.ln_1p()).collect();
        LogRatioStats {
            min: lr.iter().copied().fold(f64::INFINITY, f64::min),
            max: lr.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            geomean: (lr.iter().sum::<f64>() / lr.len() as f64).exp(),
            slope_r2l: slope(&r2l, &lr),
            slope_log: slope(&lg, &lr),
        }
    }

    /// Statistics recomputed from the stored values.
    pub fn recompute(&self) -> LogRatioStats {
        Self::stats(self.ell, &self.grid, &self.value, &self.envelope)
    }

    pub fn log_ratios(&self) -> Vec<f64> {
        self.value.iter().zip(&self.envelope).map(|(a, b)| a - b).collect()
    }

    /// max ratio / min ratio.
    pub fn band(&self) -> f64 {
        (self.log_ratio.max - self.log_ratio.min).exp()
    }

    pub fn max_ratio(&self) -> f64 {
        self.log_ratio.max.exp()
    }

    /// Sub-report on the grid points inside `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        let keep: Vec<usize> = (0..self.grid.len()).filter(|&i| self.grid[i] >= lo && self.grid[i] <= hi).collect();
        let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Self::new(self.params.clone(), self.ell, pick(&self.grid), pick(&self.value), pick(&self.envelope))
    }

    /// Running maximum of the log-ratio is flat past `knee`, up to `slack`.
    pub fn non_increasing_after(&self, knee: f64, slack: f64) -> bool {
        let lr = self.log_ratios();
        let mut best = f64::NEG_INFINITY;
        for (r, v) in self.grid.iter().zip(&lr) {
            if *r <= knee {
                best = best.max(*v);
            }
        }
        self.grid.iter().zip(&lr).filter(|(r, _)| **r > knee).all(|(_, v)| *v <= best + slack)
    }

    /// CSV with columns grid, value, envelope, log_ratio.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("grid,value,envelope,log_ratio\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.grid[i],
                self.value[i],
                self.envelope[i],
                self.value[i] - self.envelope[i]
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flat_ratio_has_zero_slope() {
        let grid: Vec<f64> = (1..=5).map(|i| i as f64).collect();
        let env: Vec<f64> = grid.iter().map(|r| r * r).collect();
        let val: Vec<f64> = env.iter().map(|e| e + 0.7).collect();
        let rep = RatioReport::new(json!({}), 1.0, grid, val, env).unwrap();
        assert!(rep.log_ratio.slope_r2l.abs() < 1e-14);
        assert!((rep.log_ratio.geomean - 0.7f64.exp()).abs() < 1e-12);
        assert!((rep.band() - 1.0).abs() < 1e-12);
        assert_eq!(rep.recompute(), rep.log_ratio);
    }

    #[test]
    fn slope_is_recovered() {
        let grid: Vec<f64> = (0..10).map(|i| 0.5 * i as f64).collect();
        let val: Vec<f64> = grid.iter().map(|r| 0.25 * r.powi(4)).collect();
        let rep = RatioReport::new(json!({}), 2.0, grid, val, vec![0.0; 10]).unwrap();
        assert!((rep.log_ratio.slope_r2l - 0.25).abs() < 1e-12);
        let sub = rep.restrict(1.0, 3.0).unwrap();
        assert_eq!(sub.grid.len(), 5);
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(RatioReport::new(json!({}), 1.0, vec![], vec![], vec![]).is_err());
        assert!(RatioReport::new(json!({}), 1.0, vec![1.0], vec![], vec![0.0]).is_err());
    }
}

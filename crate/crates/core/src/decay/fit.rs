use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples inside a fit window.
pub const MIN_SAMPLES: usize = 10;

/// Least-squares fit of `log v = c + slope log(1 + t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub samples: usize,
}

impl SlopeFit {
    /// Whether `slope` lies within `tol` of `target`.
    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.slope - target).abs() <= tol
    }
}

pub fn fit_slope(t: &[f64], v: &[f64], window: (f64, f64)) -> Result<SlopeFit> {
    if t.len() != v.len() {
        return Err(Error::Domain(format!(
            "{} times vs {} values",
            t.len(),
            v.len()
        )));
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (&ti, &vi) in t.iter().zip(v) {
        if ti < window.0 || ti > window.1 {
            continue;
        }
        if !(vi > 0.0) {
            return Err(Error::NonPositive { t: ti, value: vi });
        }
        x.push((1.0 + ti).ln());
        y.push(vi.ln());
    }
    let n = x.len();
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            need: MIN_SAMPLES,
            got: n,
        });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain(
            "fit window has a single distinct time".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        stderr,
        intercept,
        samples: n,
    })
}

/// `n` log-spaced times on `[t_min, t_max]`.
pub fn log_times(n: usize, t_min: f64, t_max: f64) -> Vec<f64> {
    if n == 1 {
        return vec![t_min];
    }
    (0..n)
        .map(|i| t_min * (t_max / t_min).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Time-stamped norm samples with their fitted decay exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySeries {
    pub label: String,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub window: (f64, f64),
    pub fit: Option<SlopeFit>,
}

impl DecaySeries {
    pub fn new(
        label: impl Into<String>,
        t: Vec<f64>,
        values: Vec<f64>,
        window: (f64, f64),
    ) -> Result<Self> {
        if t.len() != values.len() {
            return Err(Error::Domain(format!(
                "{} times vs {} values",
                t.len(),
                values.len()
            )));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("times must be strictly increasing".into()));
        }
        Ok(DecaySeries {
            label: label.into(),
            t,
            values,
            window,
            fit: None,
        })
    }

    pub fn fit(&mut self) -> Result<SlopeFit> {
        let f = fit_slope(&self.t, &self.values, self.window)?;
        self.fit = Some(f);
        Ok(f)
    }

    /// Slope fitted on the samples up to and including index `i`, if enough
    /// of them lie in the window.
    pub fn running_slope(&self, i: usize) -> Option<f64> {
        fit_slope(&self.t[..=i], &self.values[..=i], self.window)
            .ok()
            .map(|f| f.slope)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pure_power_law() {
        let t = log_times(40, 10.0, 1e3);
        let v: Vec<f64> = t.iter().map(|t| (1.0 + t).powf(-0.75)).collect();
        let f = fit_slope(&t, &v, (10.0, 1e3)).unwrap();
        assert!((f.slope + 0.75).abs() < 1e-10);
        assert!(f.stderr < 1e-10);
    }

    #[test]
    fn perturbed_power_law() {
        let t = log_times(40, 10.0, 1e3);
        let v: Vec<f64> = t
            .iter()
            .map(|t| (1.0 + t).powf(-0.75) * (1.0 + 0.01 * t.ln().sin()))
            .collect();
        let f = fit_slope(&t, &v, (10.0, 1e3)).unwrap();
        assert!((f.slope + 0.75).abs() < 0.02);
    }

    #[test]
    fn errors() {
        let t = log_times(40, 10.0, 1e3);
        let mut v: Vec<f64> = t.iter().map(|t| 1.0 / t).collect();
        assert!(matches!(
            fit_slope(&t[..5], &v[..5], (0.0, 1e4)),
            Err(Error::InsufficientSamples { .. })
        ));
        v[3] = 0.0;
        assert!(matches!(
            fit_slope(&t, &v, (0.0, 1e4)),
            Err(Error::NonPositive { .. })
        ));
        assert!(DecaySeries::new("x", vec![1.0, 1.0], vec![1.0, 1.0], (0.0, 1.0)).is_err());
    }

    proptest! {
        #[test]
        fn scale_invariant(c in 1e-6f64..1e6, p in -3.0f64..0.0) {
            let t = log_times(30, 10.0, 1e3);
            let v: Vec<f64> = t.iter().map(|t| (1.0 + t).powf(p) * (1.0 + 0.1 / t)).collect();
            let w: Vec<f64> = v.iter().map(|x| c * x).collect();
            let a = fit_slope(&t, &v, (10.0, 1e3)).unwrap().slope;
            let b = fit_slope(&t, &w, (10.0, 1e3)).unwrap().slope;
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

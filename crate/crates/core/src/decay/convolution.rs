use crate::error::{Error, Result};
use crate::symbol::CompositeRule;

/// Breakpoints on `[0, t]` doubling away from both ends.
fn breaks(t: f64) -> Vec<f64> {
    let half = 0.5 * t;
    let mut left = vec![0.0];
    let mut b = 0.25f64.min(half);
    while b < half {
        left.push(b);
        b *= 2.0;
    }
    let mut out = left.clone();
    out.push(half);
    out.extend(left.iter().rev().map(|x| t - x));
    out.dedup();
    out
}

/// `int_0^t (1 + t - s)^{-a} (1 + s)^{-b} ds`, refined until the relative
/// change on doubling the Gauss points per panel is below `1e-13`.
pub fn convolution_integral(a: f64, b: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let br = breaks(t);
    let f = |s: f64| (1.0 + t - s).powf(-a) * (1.0 + s).powf(-b);
    let mut prev = CompositeRule::new(&br, 8).integrate(f);
    let mut change = f64::INFINITY;
    for n in [16, 32, 64, 128] {
        let next = CompositeRule::new(&br, n).integrate(f);
        change = ((next - prev) / next).abs();
        prev = next;
        if change < 1e-13 {
            return Ok(prev);
        }
    }
    Err(Error::Quadrature(change))
}

/// Ratios `int_0^t (1+t-s)^{-a}(1+s)^{-b} ds / (1+t)^{-b}` over `ts`.
pub fn convolution_decay_check(a: f64, b: f64, ts: &[f64]) -> Result<Vec<f64>> {
    if !(a > 1.0) || !(0.0..=a).contains(&b) {
        return Err(Error::Domain(format!(
            "need a > 1 and 0 <= b <= a, got ({a}, {b})"
        )));
    }
    ts.iter()
        .map(|&t| {
            if !(t >= 0.0) {
                return Err(Error::Domain(format!("negative time {t}")));
            }
            Ok(convolution_integral(a, b, t)? * (1.0 + t).powf(b))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decay::log_times;

    #[test]
    fn zero_time() {
        assert_eq!(
            convolution_decay_check(2.5, 1.5, &[0.0]).unwrap(),
            vec![0.0]
        );
    }

    #[test]
    fn b_zero_closed_form() {
        // With b = 0 the integral is (1 - (1+t)^{1-a})/(a-1) <= 1/(a-1).
        let a = 2.5;
        for t in [0.5, 1.0, 10.0, 1e3] {
            let v = convolution_decay_check(a, 0.0, &[t]).unwrap()[0];
            let exact = (1.0 - (1.0 + t).powf(1.0 - a)) / (a - 1.0);
            assert!((v - exact).abs() < 1e-12);
            assert!(v <= 1.0 / (a - 1.0));
        }
    }

    #[test]
    fn bounded_ratios() {
        for (a, b) in [(2.5, 1.5), (3.5, 0.5)] {
            let r = convolution_decay_check(a, b, &log_times(30, 1.0, 1e4)).unwrap();
            let max = r.iter().cloned().fold(0.0, f64::max);
            assert!(max < 10.0);
            // Plateau: the last ratios change by less than one percent.
            assert!((r[29] - r[28]).abs() < 0.01 * r[29]);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(convolution_decay_check(1.0, 0.5, &[1.0]).is_err());
        assert!(convolution_decay_check(2.0, 2.5, &[1.0]).is_err());
    }
}

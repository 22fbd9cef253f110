//! Mittag-Leffler function on the negative real axis.

use super::gamma::{gamma, ln_gamma};
use crate::error::{domain, Result};
use crate::quadrature::adaptive;
use serde::Serialize;
use std::f64::consts::PI;

/// How a value of E_alpha(-x) was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MlMethod {
    Exact,
    Series,
    Integral,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MlEvaluation {
    pub alpha: f64,
    pub x: f64,
    pub value: f64,
    pub method: MlMethod,
    /// Absolute error estimate.
    pub error: f64,
}

/// Argument above which the integral representation replaces the power series.
pub fn switch_point(_alpha: f64) -> f64 {
    1.0
}

/// E_alpha(-x) for alpha in (0, 1], x >= 0.
pub fn mittag_leffler_neg(alpha: f64, x: f64) -> Result<MlEvaluation> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha = {alpha} outside (0, 1]"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("x = {x} must be finite and nonnegative"));
    }
    if x == 0.0 {
        return Ok(MlEvaluation { alpha, x, value: 1.0, method: MlMethod::Exact, error: 0.0 });
    }
    if alpha == 1.0 {
        let v = (-x).exp();
        return Ok(MlEvaluation { alpha, x, value: v, method: MlMethod::Exact, error: v * f64::EPSILON });
    }
    if x <= switch_point(alpha) {
        Ok(ml_series(alpha, x))
    } else {
        Ok(ml_integral(alpha, x))
    }
}

/// Shorthand returning only the value; panics on domain errors.
pub fn ml(alpha: f64, x: f64) -> f64 {
    mittag_leffler_neg(alpha, x).expect("Mittag-Leffler argument").value
}

/// Power series with Neumaier summation.
pub fn ml_series(alpha: f64, x: f64) -> MlEvaluation {
    let lx = x.ln();
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut abs_sum = 1.0;
    let mut j = 1usize;
    loop {
        let jf = j as f64;
        let mag = (jf * lx - ln_gamma(alpha * jf + 1.0)).exp();
        let term = if j % 2 == 1 { -mag } else { mag };
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        abs_sum += mag;
        if (mag < 1e-18 * abs_sum && jf * alpha > x) || j > 2000 {
            break;
        }
        j += 1;
    }
    let value = sum + comp;
    MlEvaluation { alpha, x, value, method: MlMethod::Series, error: 4.0 * f64::EPSILON * abs_sum }
}

/// Real-line integral representation, valid for 0 < alpha < 1:
/// E_alpha(-x) = sin(alpha pi)/(alpha pi) * int_0^inf x e^{-y^{1/alpha}} / (y^2 + 2 x y cos(alpha pi) + x^2) dy.
pub fn ml_integral(alpha: f64, x: f64) -> MlEvaluation {
    let c = (alpha * PI).cos();
    let pre = (alpha * PI).sin() / (alpha * PI);
    let inv = 1.0 / alpha;
    let f = |y: f64| x * (-y.powf(inv)).exp() / (y * y + 2.0 * x * y * c + x * x);
    let ymax = 46f64.powf(alpha);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut cuts = vec![0.0];
    if x < ymax {
        // the denominator is sharpest near y = x when cos(alpha pi) < 0
        cuts.push(0.5 * x);
        cuts.push(x);
        cuts.push(1.5 * x);
    }
    cuts.push(ymax);
    cuts.retain(|&v| v <= ymax);
    cuts.dedup();
    for w in cuts.windows(2) {
        let r = adaptive(f, w[0], w[1], 1e-14, 1e-17);
        value += r.value;
        error += r.error;
    }
    MlEvaluation { alpha, x, value: pre * value, method: MlMethod::Integral, error: pre * error }
}

/// Two-sided bounds 1/(1 + Gamma(1-alpha) x) <= E_alpha(-x) <= 1/(1 + x/Gamma(1+alpha)).
pub fn ml_bounds(alpha: f64, x: f64) -> (f64, f64) {
    let lower = 1.0 / (1.0 + gamma(1.0 - alpha) * x);
    let upper = 1.0 / (1.0 + x / gamma(1.0 + alpha));
    (lower, upper)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundsRow {
    pub alpha: f64,
    pub x: f64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub inside: bool,
}

/// Check the two-sided bounds on an n_alpha x n_x grid: alpha at cell midpoints
/// of (0, 1), x log-spaced on [1e-3, 1e3]. A value counts as inside when it is
/// within its own error estimate of the band.
pub fn bounds_sweep(n_alpha: usize, n_x: usize) -> Result<Vec<BoundsRow>> {
    let mut rows = Vec::with_capacity(n_alpha * n_x);
    for i in 0..n_alpha {
        let alpha = (i as f64 + 0.5) / n_alpha as f64;
        for j in 0..n_x {
            let x = 10f64.powf(-3.0 + 6.0 * j as f64 / (n_x.max(2) - 1) as f64);
            let e = mittag_leffler_neg(alpha, x)?;
            let (lower, upper) = ml_bounds(alpha, x);
            let inside = e.value >= lower - e.error && e.value <= upper + e.error;
            rows.push(BoundsRow { alpha, x, value: e.value, lower, upper, inside });
        }
    }
    Ok(rows)
}

/// Root of omega = mu (gamma - omega)^{1-alpha} in (0, gamma).
pub fn omega_root(alpha: f64, gamma_rate: f64, mu: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) || !(gamma_rate > 0.0) || !(mu > 0.0) {
        return domain(format!("omega_root needs alpha in (0,1), gamma > 0, mu > 0; got {alpha}, {gamma_rate}, {mu}"));
    }
    let f = |w: f64| w - mu * (gamma_rate - w).powf(1.0 - alpha);
    let df = |w: f64| 1.0 + mu * (1.0 - alpha) * (gamma_rate - w).powf(-alpha);
    let (mut lo, mut hi) = (0.0, gamma_rate);
    let mut w = 0.5 * gamma_rate;
    for _ in 0..200 {
        let fw = f(w);
        if fw == 0.0 {
            return Ok(w);
        }
        if fw < 0.0 {
            lo = w;
        } else {
            hi = w;
        }
        let mut next = w - fw / df(w);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - w).abs() <= 1e-16 * gamma_rate.max(1.0) || hi - lo < 1e-300 {
            w = next;
            break;
        }
        w = next;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma::erfcx;

    #[test]
    fn alpha_one_is_exponential() {
        for x in [0.1, 1.0, 7.5] {
            assert!((ml(1.0, x) - (-x).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_argument() {
        assert_eq!(ml(0.37, 0.0), 1.0);
    }

    #[test]
    fn half_order_matches_erfc_identity() {
        // E_{1/2}(-x) = e^{x^2} erfc(x); frozen value at x = 1 is e*erfc(1)
        assert!((ml(0.5, 1.0) - 0.427_583_576_155_807).abs() < 1e-12);
        for x in [0.05, 0.3, 0.9, 1.1, 2.0, 4.0, 8.0, 30.0, 200.0] {
            let e = erfcx(x);
            assert!(((ml(0.5, x) - e) / e).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn series_and_integral_agree_on_overlap() {
        for &a in &[0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            // band where the alternating series is not yet cancellation-bound
            for &x in [0.5f64, 0.8, 1.0, 1.5, 2.0].iter().filter(|x: &&f64| x.powf(1.0 / a) <= 4.0) {
                let s = ml_series(a, x).value;
                let i = ml_integral(a, x).value;
                assert!((s - i).abs() < 1e-8 * s, "alpha {a} x {x}: {s} vs {i}");
            }
        }
    }

    #[test]
    fn bounds_at_half() {
        let (lo, up) = ml_bounds(0.5, 1.0);
        assert!((lo - 1.0 / (1.0 + PI.sqrt())).abs() < 1e-15);
        assert!((up - 1.0 / (1.0 + 2.0 / PI.sqrt())).abs() < 1e-15);
        let v = ml(0.5, 100.0);
        let (lo, up) = ml_bounds(0.5, 100.0);
        assert!(lo <= v && v <= up);
    }

    #[test]
    fn bounds_hold_on_grid() {
        let rows = bounds_sweep(20, 20).unwrap();
        assert_eq!(rows.len(), 400);
        assert!(rows.iter().all(|r| r.inside && r.lower <= r.upper));
    }

    #[test]
    fn omega_golden_ratio() {
        let w = omega_root(0.5, 1.0, 1.0).unwrap();
        assert!((w - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn omega_limits() {
        assert!(omega_root(0.5, 1.0, 1e-8).unwrap() < 1e-7);
        let w = omega_root(1.0 - 1e-9, 1.0, 0.3).unwrap();
        assert!((w - 0.3).abs() < 1e-8);
        assert!(omega_root(0.5, 1.0, 1e6).unwrap() > 0.999_999);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(mittag_leffler_neg(1.5, 1.0).is_err());
        assert!(mittag_leffler_neg(0.0, 1.0).is_err());
        assert!(mittag_leffler_neg(0.5, -1.0).is_err());
    }
}

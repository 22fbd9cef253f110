//! Verdicts and the small fitting helpers shared by the checks.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// not enough resolved data to decide
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Fail dominates, then inconclusive.
    pub fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }
}

/// Least-squares line through (x, y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for i in 0..n {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LineFit { slope, intercept: my - slope * mx, points: n })
}

/// Slope of log y against log t over samples with t in [lo, hi] and y > 0.
pub fn fit_power_law(t: &[f64], y: &[f64], lo: f64, hi: f64) -> Option<LineFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(y)
        .filter(|(&t, &y)| t >= lo && t <= hi && y > 0.0 && y.is_finite())
        .map(|(t, y)| (t.ln(), y.ln()))
        .unzip();
    fit_line(&lx, &ly)
}

/// Slope of log y against t over samples with t in [lo, hi] and y > 0.
pub fn fit_exponential(t: &[f64], y: &[f64], lo: f64, hi: f64) -> Option<LineFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(y)
        .filter(|(&t, &y)| t >= lo && t <= hi && y > 0.0 && y.is_finite())
        .map(|(t, y)| (*t, y.ln()))
        .unzip();
    fit_line(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let t: Vec<f64> = (1..200).map(|i| i as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-0.25)).collect();
        let f = fit_power_law(&t, &y, 10.0, 150.0).unwrap();
        assert!((f.slope + 0.25).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert_eq!(f.points, 141);
    }

    #[test]
    fn recovers_rate() {
        let t: Vec<f64> = (0..50).map(|i| 0.1 * i as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| (-1.5 * t).exp()).collect();
        assert!((fit_exponential(&t, &y, 0.0, 5.0).unwrap().slope + 1.5).abs() < 1e-12);
        assert!(fit_exponential(&t, &y, 10.0, 20.0).is_none());
    }

    #[test]
    fn verdict_combination() {
        assert_eq!(Verdict::Pass.combine(Verdict::Inconclusive), Verdict::Inconclusive);
        assert_eq!(Verdict::Inconclusive.combine(Verdict::Fail), Verdict::Fail);
        assert_eq!(Verdict::Pass.combine(Verdict::Pass), Verdict::Pass);
    }
}

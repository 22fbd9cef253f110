//! Laplace transforms of sampled functions and Talbot inversion.

use super::gamma::{gamma, gamma_p};
use crate::error::{domain, Result};
use crate::quadrature::adaptive;
use num_complex::Complex64;
use serde::Serialize;

/// Extrapolation of the sampled function beyond the last node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModel {
    None,
    Algebraic,
    Exponential,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LaplaceEstimate {
    pub value: f64,
    pub tail: f64,
    pub error: f64,
    /// Set when the data trend contradicts the declared tail model.
    pub tail_warning: bool,
}

fn interval_moments(z: f64, h: f64) -> (f64, f64) {
    // I0 = int_0^h e^{-zs} ds, I1 = int_0^h s e^{-zs} ds
    let u = z * h;
    if u < 1e-3 {
        let i0 = h * (1.0 - u / 2.0 + u * u / 6.0 - u * u * u / 24.0);
        let i1 = h * h * (0.5 - u / 3.0 + u * u / 8.0 - u * u * u / 30.0);
        (i0, i1)
    } else {
        let e = (-u).exp();
        (-(-u).exp_m1() / z, (1.0 - e * (1.0 + u)) / (z * z))
    }
}

/// Growth rates below this count as a flat tail.
const TAIL_SLACK: f64 = 1e-6;

/// int_0^T e^{-zt} f(t) dt for piecewise-linear f plus an analytic tail.
pub fn numerical_laplace(nodes: &[f64], values: &[f64], z: f64, tail: TailModel) -> Result<LaplaceEstimate> {
    if !(z > 0.0) {
        return domain(format!("Laplace variable z = {z} must be positive"));
    }
    if nodes.len() != values.len() || nodes.len() < 3 {
        return domain("sampled function needs matching nodes and values, at least 3");
    }
    let fine = body(nodes, values, z);
    let coarse_nodes: Vec<f64> = nodes.iter().step_by(2).copied().collect();
    let coarse_vals: Vec<f64> = values.iter().step_by(2).copied().collect();
    let coarse = if coarse_nodes.len() >= 3 { body(&coarse_nodes, &coarse_vals, z) } else { fine };

    let n = nodes.len();
    let t_end = nodes[n - 1];
    let f_end = values[n - 1];
    let m = n - 1 - (n / 10).max(1);
    let (tm, fm) = (nodes[m], values[m]);
    let (tail_value, warning) = match tail {
        TailModel::None => (0.0, false),
        TailModel::Algebraic => {
            let rho = if fm > 0.0 && f_end > 0.0 { -(f_end / fm).ln() / (t_end / tm).ln() } else { 0.0 };
            let zt = z * t_end;
            let r = adaptive(|x| x.powf(-rho) * (-zt * (x - 1.0)).exp(), 1.0, 1.0 + 60.0 / zt, 1e-12, 0.0);
            (f_end * t_end * (-zt).exp() * r.value, rho < -TAIL_SLACK)
        }
        TailModel::Exponential => {
            let lam = if fm > 0.0 && f_end > 0.0 { -(f_end / fm).ln() / (t_end - tm) } else { 0.0 };
            (f_end * (-z * t_end).exp() / (z + lam.max(0.0)), lam < -TAIL_SLACK)
        }
    };
    let error = (fine - coarse).abs() / 3.0 + 0.5 * tail_value.abs();
    Ok(LaplaceEstimate { value: fine + tail_value, tail: tail_value, error, tail_warning: warning })
}

fn body(nodes: &[f64], values: &[f64], z: f64) -> f64 {
    let mut sum = 0.0;
    let mut start = 1;
    if !values[0].is_finite() {
        // power-law model on the first interval for singular data
        let (t1, t2, f1, f2) = (nodes[1], nodes[2], values[1], values[2]);
        let q = (f2 / f1).ln() / (t2 / t1).ln();
        let a = q + 1.0;
        sum += f1 * t1.powf(-q) * z.powf(-a) * gamma(a) * gamma_p(a, z * t1);
        start = 2;
    }
    for j in start..nodes.len() {
        let (t0, t1) = (nodes[j - 1], nodes[j]);
        let h = t1 - t0;
        let (i0, i1) = interval_moments(z, h);
        let e = (-z * t0).exp();
        if e == 0.0 {
            break;
        }
        let (f0, f1) = (values[j - 1], values[j]);
        sum += e * (f0 * (i0 - i1 / h) + f1 * i1 / h);
    }
    sum
}

/// Term count balancing truncation against the e^{rt} rounding growth.
pub const TALBOT_TERMS: usize = 20;

/// Fixed-Talbot inversion of a Laplace transform at t > 0.
pub fn talbot<F: Fn(Complex64) -> Complex64>(transform: F, t: f64, terms: usize) -> f64 {
    let m = terms as f64;
    let r = 2.0 * m / (5.0 * t);
    let mut sum = 0.5 * (transform(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..terms {
        let theta = k as f64 * std::f64::consts::PI / m;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let v = (s * t).exp() * transform(s) * Complex64::new(1.0, sigma);
        sum += v.re;
    }
    r / m * sum
}

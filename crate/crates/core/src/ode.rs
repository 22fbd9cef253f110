//! The scalar problem d/dt (g_{1-alpha} * [u - u0]) + nu u^gamma = 0 and its barriers.

use crate::calculus::HistoryOperator;
use crate::error::{domain, usage, Error, Result};
use crate::kernel::{default_grading, eval_g, Kernel, Term, TimeGrid};
use crate::report::{fit_power_law, Verdict};
use crate::special::gamma;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ScalarProblem {
    pub alpha: f64,
    pub nu: f64,
    pub gamma: f64,
    pub u0: f64,
    #[serde(skip)]
    pub grid: TimeGrid,
}

impl ScalarProblem {
    pub fn new(alpha: f64, nu: f64, gamma: f64, u0: f64, grid: TimeGrid) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return domain(format!("alpha = {alpha} outside (0, 1)"));
        }
        for (name, v) in [("nu", nu), ("gamma", gamma), ("u0", u0)] {
            if !(v > 0.0) || !v.is_finite() {
                return domain(format!("{name} = {v} must be positive"));
            }
        }
        Ok(Self { alpha, nu, gamma, u0, grid })
    }

    /// Graded on [0, 1] then geometric to t_end.
    pub fn default_grid(alpha: f64, t_end: f64) -> Result<TimeGrid> {
        TimeGrid::composite(1.0, 200, default_grading(alpha), 1.02, t_end)
    }

    pub fn operator(&self) -> HistoryOperator {
        HistoryOperator::new(&Kernel::Terms(vec![Term::power(1.0, 1.0 - self.alpha)]), &self.grid)
    }

    pub fn rate(&self) -> f64 {
        self.alpha / self.gamma
    }
}

/// Root of diag w + nu w^gamma = rhs on (0, rhs/diag].
fn step_root(diag: f64, nu: f64, gam: f64, rhs: f64, guess: f64) -> Result<f64> {
    let hi0 = rhs / diag;
    let phi = |w: f64| diag * w + nu * w.powf(gam) - rhs;
    let (mut lo, mut hi) = (0.0, hi0);
    let mut w = guess.clamp(0.0, hi0);
    if w <= 0.0 {
        w = 0.5 * hi0;
    }
    for _ in 0..50 {
        let f = phi(w);
        if f.abs() <= 1e-15 * rhs {
            return Ok(w);
        }
        if f > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        let df = diag + nu * gam * w.powf(gam - 1.0);
        let next = w - f / df;
        w = if next > lo && next < hi && next.is_finite() { next } else { 0.5 * (lo + hi) };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(w);
        }
    }
    // bisection on the bracket, which is monotone
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::Numerical { what: "scalar step".into(), residual: phi(0.5 * (lo + hi)).abs() })
}

/// Implicit L1 solution on the problem grid.
pub fn solve_scalar(p: &ScalarProblem) -> Result<Vec<f64>> {
    solve_with(p, &p.operator())
}

pub fn solve_with(p: &ScalarProblem, op: &HistoryOperator) -> Result<Vec<f64>> {
    let n = p.grid.len();
    let mut u = vec![p.u0; n];
    for i in 1..n {
        let (diag, rest) = op.split(i, &u, p.u0);
        let rhs = -rest;
        let w = step_root(diag, p.nu, p.gamma, rhs, u[i - 1])?;
        let res = (diag * w + p.nu * w.powf(p.gamma) - rhs).abs();
        if res > 1e-10 * rhs.max(1.0) {
            return Err(Error::Numerical { what: format!("scalar step {i}"), residual: res });
        }
        u[i] = w;
    }
    Ok(u)
}

/// Constants of the explicit barriers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BarrierConstants {
    /// nu Gamma(1-alpha) Gamma(1+alpha) u0^gamma
    pub mu: f64,
    /// switch point of the subsolution
    pub eps: f64,
    pub c_sub: f64,
    /// switch point of the supersolution
    pub t0: f64,
    pub c_super: f64,
}

pub fn barrier_constants(p: &ScalarProblem) -> BarrierConstants {
    let (a, g) = (p.alpha, p.gamma);
    let mu = p.nu * gamma(1.0 - a) * gamma(1.0 + a) * p.u0.powf(g);
    let eps = (p.u0 * gamma(1.0 + a) / (2.0 * mu)).powf(1.0 / a);
    let c_sub = eps.powf(a / g) * p.u0 / 2.0;
    let t0a = p.u0.powf(1.0 - g) / p.nu * (eval_g(1.0 - a, 0.5).unwrap() + a / g * 2f64.powf(a + a / g) / gamma(2.0 - a));
    let t0 = t0a.powf(1.0 / a);
    let c_super = p.u0 * t0.powf(a / g);
    BarrierConstants { mu, eps, c_sub, t0, c_super }
}

pub fn subsolution_v(p: &ScalarProblem, t: f64) -> f64 {
    let c = barrier_constants(p);
    if t <= 0.0 {
        p.u0
    } else if t <= c.eps {
        p.u0 - c.mu * eval_g(1.0 + p.alpha, t).unwrap()
    } else {
        c.c_sub * t.powf(-p.rate())
    }
}

pub fn supersolution_w(p: &ScalarProblem, t: f64) -> f64 {
    let c = barrier_constants(p);
    if t <= c.t0 {
        p.u0
    } else {
        c.c_super * t.powf(-p.rate())
    }
}

/// Check v <= w at every node, after verifying that v is a discrete subsolution and w a
/// discrete supersolution of D[. - u0] + f(.) = 0 up to `tol` (relative to f's scale).
pub fn comparison_check(f: &dyn Fn(f64) -> f64, v: &[f64], w: &[f64], op: &HistoryOperator, u0: f64, tol: f64) -> Result<bool> {
    let n = op.grid().len();
    if v.len() != n || w.len() != n {
        return usage("trajectories must be sampled on the operator grid");
    }
    for i in 1..n {
        let rv = op.apply_at(i, v, u0) + f(v[i]);
        if rv > tol * (1.0 + f(v[i]).abs()) {
            return usage(format!("first trajectory is not a discrete subsolution at node {i} (residual {rv:e})"));
        }
        let rw = op.apply_at(i, w, u0) + f(w[i]);
        if rw < -tol * (1.0 + f(w[i]).abs()) {
            return usage(format!("second trajectory is not a discrete supersolution at node {i} (residual {rw:e})"));
        }
    }
    Ok(v.iter().zip(w).all(|(a, b)| a <= b))
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub alpha: f64,
    pub gamma: f64,
    pub nu: f64,
    pub u0: f64,
    pub constants: BarrierConstants,
    /// max over nodes of v - u
    pub max_below_sub: f64,
    /// max over nodes of u - w
    pub max_above_super: f64,
    pub discretization_estimate: f64,
    pub tolerance: f64,
    pub min_value: f64,
    pub monotone: bool,
    /// min and max of u (1 + t^{alpha/gamma})
    pub c1: f64,
    pub c2: f64,
    pub fitted_exponent: Option<f64>,
    pub predicted_exponent: f64,
    pub fit_window: (f64, f64),
    pub exponent_ok: bool,
    pub verdict: Verdict,
}

/// Relative band for the fitted late-time exponent.
pub const EXPONENT_BAND: f64 = 0.10;

/// Solve, sample the barriers, and check the sandwich and the late-time exponent.
/// Returns the report and the rows (t, u, v, w).
pub fn sandwich_check(p: &ScalarProblem) -> Result<(SandwichReport, Vec<[f64; 4]>)> {
    let u = solve_scalar(p)?;
    let est = discretization_estimate(p, &u)?;
    let t = p.grid.nodes();
    let v: Vec<f64> = t.iter().map(|&x| subsolution_v(p, x)).collect();
    let w: Vec<f64> = t.iter().map(|&x| supersolution_w(p, x)).collect();
    let below = v.iter().zip(&u).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
    let above = u.iter().zip(&w).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
    let tolerance = est.max(1e-3);
    let rate = p.rate();
    let scaled: Vec<f64> = t.iter().zip(&u).map(|(x, y)| y * (1.0 + x.powf(rate))).collect();
    let c1 = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let c2 = scaled.iter().copied().fold(0.0, f64::max);
    let t_end = p.grid.t_end();
    let window = (t_end / 100.0, t_end);
    let fit = fit_power_law(t, &u, window.0, window.1).filter(|f| f.points >= 5);
    let exponent_ok = fit.map(|f| (f.slope + rate).abs() <= EXPONENT_BAND * rate).unwrap_or(false);
    let min_value = u.iter().copied().fold(f64::INFINITY, f64::min);
    let monotone = u.windows(2).all(|x| x[1] <= x[0]);
    let ok = below <= tolerance && above <= tolerance && min_value > 0.0 && monotone && c1 > 0.0;
    let verdict = match fit {
        None => Verdict::from_bool(ok).combine(Verdict::Inconclusive),
        Some(_) => Verdict::from_bool(ok && exponent_ok),
    };
    let rows = (0..t.len()).map(|i| [t[i], u[i], v[i], w[i]]).collect();
    Ok((
        SandwichReport {
            alpha: p.alpha,
            gamma: p.gamma,
            nu: p.nu,
            u0: p.u0,
            constants: barrier_constants(p),
            max_below_sub: below,
            max_above_super: above,
            discretization_estimate: est,
            tolerance,
            min_value,
            monotone,
            c1,
            c2,
            fitted_exponent: fit.map(|f| f.slope),
            predicted_exponent: -rate,
            fit_window: window,
            exponent_ok,
            verdict,
        },
        rows,
    ))
}

/// Difference to a solve on every other node.
fn discretization_estimate(p: &ScalarProblem, u: &[f64]) -> Result<f64> {
    if p.grid.n() < 4 {
        return Ok(0.0);
    }
    let (coarse, idx) = p.grid.coarsened()?;
    let uc = solve_scalar(&ScalarProblem { grid: coarse, ..p.clone() })?;
    Ok(uc.iter().zip(&idx).map(|(a, &i)| (a - u[i]).abs()).fold(0.0, f64::max))
}

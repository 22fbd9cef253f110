//! The relaxation function s_mu solving s + mu (l * s) = 1.

use crate::error::{domain, Result};
use crate::kernel::{ConvolutionWeights, KernelPair, TimeGrid};
use crate::quadrature::gl;
use crate::special::{ml, talbot, TALBOT_TERMS};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelaxMethod {
    /// product integration of s + mu (l * s) = 1
    Volterra,
    /// history form d/dt (k * [s - 1]) + mu s = 0, used when l has no time-domain form
    History,
    ClosedFormMl,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelaxationCurve {
    pub mu: f64,
    #[serde(skip)]
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub method: RelaxMethod,
}

impl RelaxationCurve {
    pub fn t(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn in_unit_interval(&self) -> bool {
        self.values[0] == 1.0 && self.values.iter().all(|&v| v > 0.0 && v <= 1.0)
    }
}

/// Reusable weight tables for sweeps over mu on one grid.
#[derive(Debug, Clone)]
pub struct RelaxationSolver {
    pub pair: KernelPair,
    weights: ConvolutionWeights,
    method: RelaxMethod,
    /// corrections to the first two hat weights of each row
    first: Vec<(f64, f64)>,
}

impl RelaxationSolver {
    pub fn new(pair: &KernelPair, grid: &TimeGrid) -> Self {
        match pair.l() {
            Some(l) => {
                let first = singular_first_interval(pair, &l, grid);
                Self { pair: pair.clone(), weights: ConvolutionWeights::new(&l, grid), method: RelaxMethod::Volterra, first }
            }
            None => Self::history(pair, grid),
        }
    }

    /// Solver on the history form regardless of whether l is available.
    pub fn history(pair: &KernelPair, grid: &TimeGrid) -> Self {
        Self { pair: pair.clone(), weights: ConvolutionWeights::new(&pair.k(), grid), method: RelaxMethod::History, first: Vec::new() }
    }

    pub fn grid(&self) -> &TimeGrid {
        self.weights.grid()
    }

    pub fn method(&self) -> RelaxMethod {
        self.method
    }

    pub fn solve(&self, mu: f64) -> Result<RelaxationCurve> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return domain(format!("mu = {mu} must be finite and nonnegative"));
        }
        let n = self.grid().len();
        let mut s = vec![1.0; n];
        if mu > 0.0 {
            match self.method {
                RelaxMethod::Volterra => {
                    for i in 1..n {
                        let w = self.row(i);
                        let hist: f64 = w[..i].iter().zip(&s[..i]).map(|(a, b)| a * b).sum();
                        s[i] = (1.0 - mu * hist) / (1.0 + mu * w[i]);
                    }
                }
                _ => {
                    let g = self.grid();
                    for i in 1..n {
                        let a = self.weights.interval(i);
                        let mut hist = 0.0;
                        for j in 1..i {
                            hist += a[j - 1] / g.step(j) * (s[j] - s[j - 1]);
                        }
                        let c = a[i - 1] / g.step(i);
                        s[i] = (c * s[i - 1] - hist) / (c + mu);
                    }
                }
            }
        }
        Ok(RelaxationCurve { mu, grid: self.grid().clone(), values: s, method: self.method })
    }

    fn row(&self, i: usize) -> std::borrow::Cow<'_, [f64]> {
        let w = self.weights.hat(i);
        let (c0, c1) = self.first[i];
        if c0 == 0.0 && c1 == 0.0 {
            return std::borrow::Cow::Borrowed(w);
        }
        let mut v = w.to_vec();
        v[0] += c0;
        v[1] += c1;
        std::borrow::Cow::Owned(v)
    }

    /// Largest residual of the discrete equation the solver satisfies.
    pub fn residual(&self, curve: &RelaxationCurve) -> f64 {
        let s = &curve.values;
        let mu = curve.mu;
        let g = self.grid();
        (1..s.len())
            .map(|i| match self.method {
                RelaxMethod::Volterra => {
                    let w = self.row(i);
                    let conv: f64 = w.iter().zip(&s[..=i]).map(|(a, b)| a * b).sum();
                    (s[i] + mu * conv - 1.0).abs()
                }
                _ => {
                    let a = self.weights.interval(i);
                    let d: f64 = (1..=i).map(|j| a[j - 1] / g.step(j) * (s[j] - s[j - 1])).sum();
                    (d + mu * s[i]).abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// On [0, t_1] the solution behaves like 1 - c (1 * l)(t); use that profile instead of a
/// straight line for the first interval and return the resulting weight changes.
fn singular_first_interval(pair: &KernelPair, l: &crate::kernel::Kernel, grid: &TimeGrid) -> Vec<(f64, f64)> {
    let t1 = grid.t(1);
    let p1 = pair.primitive_l(t1);
    let mut out = vec![(0.0, 0.0); grid.len()];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        let tn = grid.t(n);
        let (m0, m1) = l.moments(tn - t1, tn);
        let lin1 = m0 - m1 / t1;
        let prof = if n == 1 {
            // the profile is 1 to first order on [0, eps]; the rest in log scale
            let eps = 1e-8 * t1;
            let tail = crate::quadrature::adaptive(
                |v| {
                    let u = v.exp();
                    u * l.eval(u) * pair.primitive_l(t1 - u) / p1
                },
                eps.ln(),
                t1.ln(),
                1e-10,
                1e-14 * m0,
            );
            pair.primitive_l(eps) + tail.value
        } else {
            // r = t_1 x^4 smooths the profile at the origin
            gl(32).integrate(0.0, 1.0, |x| {
                let x3 = x * x * x;
                let r = t1 * x3 * x;
                l.eval(tn - r) * pair.primitive_l(r) / p1 * 4.0 * t1 * x3
            })
        };
        // basis 1 - phi on node 0, phi on node 1
        *slot = ((m0 - prof) - m1 / t1, prof - lin1);
    }
    out
}

pub fn solve_relaxation(pair: &KernelPair, mu: f64, grid: &TimeGrid) -> Result<RelaxationCurve> {
    RelaxationSolver::new(pair, grid).solve(mu)
}

/// E_alpha(-mu t^alpha) sampled on the grid.
pub fn closed_form_curve(alpha: f64, mu: f64, grid: &TimeGrid) -> Result<RelaxationCurve> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha = {alpha} outside (0, 1)"));
    }
    if !(mu >= 0.0) {
        return domain(format!("mu = {mu} must be nonnegative"));
    }
    let mut values = Vec::with_capacity(grid.len());
    for &t in grid.nodes() {
        values.push(crate::special::mittag_leffler_neg(alpha, mu * t.powf(alpha))?.value);
    }
    Ok(RelaxationCurve { mu, grid: grid.clone(), values, method: RelaxMethod::ClosedFormMl })
}

/// s_mu(t) by numerical inversion of its Laplace transform; an oracle for any family.
pub fn inverted_relaxation(pair: &KernelPair, mu: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    talbot(|z: Complex64| pair.laplace_relaxation_c(z, mu), t, TALBOT_TERMS)
}

/// The two-sided envelope 1/(1 + mu/k(t)) <= s_mu(t) <= 1/(1 + mu (1 * l)(t)).
pub fn envelope(pair: &KernelPair, mu: f64, t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (1.0, 1.0);
    }
    let k = pair.k().eval(t);
    (1.0 / (1.0 + mu / k), 1.0 / (1.0 + mu * pair.primitive_l(t)))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub family: String,
    pub mu: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub max_lower_violation: f64,
    pub max_upper_violation: f64,
    pub discretization_estimate: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Absolute slack on both envelope inequalities, added to the discretization estimate.
pub const BOUNDS_ABS_TOL: f64 = 1e-3;

/// Check the envelope at every node t > 0.
pub fn check_bounds(curve: &RelaxationCurve, pair: &KernelPair) -> Result<BoundsReport> {
    let mu = curve.mu;
    let est = discretization_estimate(curve, pair)?;
    let mut lower = vec![1.0; curve.values.len()];
    let mut upper = vec![1.0; curve.values.len()];
    let (mut vl, mut vu) = (0.0f64, 0.0f64);
    for (i, &t) in curve.t().iter().enumerate().skip(1) {
        let (lo, up) = envelope(pair, mu, t);
        lower[i] = lo;
        upper[i] = up;
        vl = vl.max(lo - curve.values[i]);
        vu = vu.max(curve.values[i] - up);
    }
    let tolerance = BOUNDS_ABS_TOL + est;
    Ok(BoundsReport {
        family: pair.name().to_string(),
        mu,
        lower,
        upper,
        max_lower_violation: vl,
        max_upper_violation: vu,
        discretization_estimate: est,
        tolerance,
        pass: vl <= tolerance && vu <= tolerance,
    })
}

/// Difference to a solve on every other node, Richardson-scaled.
fn discretization_estimate(curve: &RelaxationCurve, pair: &KernelPair) -> Result<f64> {
    if curve.mu == 0.0 || curve.method == RelaxMethod::ClosedFormMl {
        return Ok(0.0);
    }
    if curve.grid.n() < 4 {
        return Ok(0.0);
    }
    let (coarse, idx) = curve.grid.coarsened()?;
    let solver = match curve.method {
        RelaxMethod::History => RelaxationSolver::history(pair, &coarse),
        _ => RelaxationSolver::new(pair, &coarse),
    };
    let c = solver.solve(curve.mu)?;
    let d = c.values.iter().zip(&idx).map(|(a, &i)| (a - curve.values[i]).abs()).fold(0.0, f64::max);
    Ok(d / 3.0)
}

/// Long-time limit of s_mu.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LimitValue {
    /// l is not integrable, s_mu decays to zero
    Zero,
    /// 1/(1 + mu |l|_1)
    Plateau(f64),
}

impl LimitValue {
    pub fn value(&self) -> f64 {
        match self {
            LimitValue::Zero => 0.0,
            LimitValue::Plateau(v) => *v,
        }
    }
}

pub fn limit_value(pair: &KernelPair, mu: f64) -> Result<LimitValue> {
    if !(mu > 0.0) {
        return domain(format!("mu = {mu} must be positive"));
    }
    Ok(match pair.l_integral() {
        Some(norm) => LimitValue::Plateau(1.0 / (1.0 + mu * norm)),
        None => LimitValue::Zero,
    })
}

/// Resolvent h_mu of mu l, sampled at the nodes (value at t = 0 is not finite
/// for singular l and is reported as infinity).
pub fn resolvent_h(pair: &KernelPair, mu: f64, grid: &TimeGrid) -> Result<Vec<f64>> {
    if !(mu > 0.0) {
        return domain(format!("mu = {mu} must be positive"));
    }
    let n = grid.len();
    let Some(l) = pair.l() else {
        let mut h = vec![f64::INFINITY; n];
        for (i, &t) in grid.nodes().iter().enumerate().skip(1) {
            h[i] = talbot(|z| {
                let ml = mu * pair.laplace_l_c(z);
                ml / (1.0 + ml)
            }, t, TALBOT_TERMS);
        }
        return Ok(h);
    };
    let solver = RelaxationSolver::new(pair, grid);
    let s = solver.solve(mu)?;
    let w = ConvolutionWeights::new(&l, grid);
    let mut h = vec![0.0; n];
    h[0] = mu * l.eval(0.0);
    for i in 1..n {
        let a = w.interval(i);
        // (l * h)(t_i) = int l(t_i - r) dH(r) with H = 1 - s piecewise linear
        let conv: f64 = (1..=i).map(|j| a[j - 1] * (s.values[j - 1] - s.values[j]) / grid.step(j)).sum();
        h[i] = mu * l.eval(grid.t(i)) - mu * conv;
    }
    Ok(h)
}

/// Regularized kernel k_n = k * h_n, sampled on the grid. Since k * h_mu = mu s_mu
/// this is n times the relaxation curve at mu = n.
pub fn regularized_k(pair: &KernelPair, n: u32, grid: &TimeGrid) -> Result<Vec<f64>> {
    if n == 0 {
        return domain("regularization index n must be at least 1");
    }
    let mu = n as f64;
    Ok(solve_relaxation(pair, mu, grid)?.values.into_iter().map(|v| mu * v).collect())
}

/// Regularized kernel of the fractional pair from the closed form n E_alpha(-n t^alpha).
pub fn regularized_fractional(alpha: f64, n: f64, grid: &TimeGrid) -> Vec<f64> {
    grid.nodes().iter().map(|&t| n * ml(alpha, n * t.powf(alpha))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Family;

    fn rel_max(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).skip(1).map(|(x, y)| ((x - y) / y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn mu_zero_is_identically_one() {
        let p = KernelPair::fractional(0.5).unwrap();
        let g = TimeGrid::graded(5.0, 20, 4.0).unwrap();
        let c = solve_relaxation(&p, 0.0, &g).unwrap();
        assert!(c.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn half_order_at_one() {
        let p = KernelPair::fractional(0.5).unwrap();
        let g = TimeGrid::graded(1.0, 400, 4.0).unwrap();
        let c = solve_relaxation(&p, 1.0, &g).unwrap();
        assert!((c.values[400] - 0.427_583_576_155_807).abs() < 1e-5);
        let cf = closed_form_curve(0.5, 1.0, &g).unwrap();
        assert!((cf.values[400] - 0.427_583_576_155_807).abs() < 1e-12);
    }

    #[test]
    fn closed_form_at_large_argument() {
        let g = TimeGrid::uniform(4.0, 4).unwrap();
        let cf = closed_form_curve(0.5, 4.0, &g).unwrap();
        // E_{1/2}(-8) = e^{64} erfc(8)
        assert!((cf.values[4] - 0.069_985_166_200_880_93).abs() < 1e-12);
        assert_eq!(cf.values[0], 1.0);
    }

    #[test]
    fn unit_kernel_gives_exponential() {
        // l = g_1 is the boundary case of the fractional pair; product integration is exact
        // only up to the trapezoid error, so compare on a fine grid
        let l = crate::kernel::Kernel::Terms(vec![crate::kernel::Term::power(1.0, 1.0)]);
        let g = TimeGrid::uniform(1.0, 2000).unwrap();
        let w = ConvolutionWeights::new(&l, &g);
        let mut s = vec![1.0; g.len()];
        for i in 1..g.len() {
            let row = w.hat(i);
            let hist: f64 = row[..i].iter().zip(&s[..i]).map(|(a, b)| a * b).sum();
            s[i] = (1.0 - 2.0 * hist) / (1.0 + 2.0 * row[i]);
        }
        assert!((s[2000] - 0.135_335_283_236_612_7).abs() < 1e-6);
    }

    #[test]
    fn residual_is_at_rounding_level() {
        for p in [
            KernelPair::fractional(0.3).unwrap(),
            KernelPair::new(Family::SumFractional { terms: vec![(1.0, 0.3), (1.0, 0.7)] }).unwrap(),
        ] {
            let g = TimeGrid::graded(10.0, 200, p.default_grading()).unwrap();
            let solver = RelaxationSolver::new(&p, &g);
            let c = solver.solve(4.0).unwrap();
            assert!(solver.residual(&c) < 1e-12);
        }
    }

    #[test]
    fn matches_inversion_oracle_for_every_family() {
        for p in KernelPair::catalog() {
            let g = TimeGrid::graded(10.0, 800, p.default_grading()).unwrap();
            let c = solve_relaxation(&p, 1.0, &g).unwrap();
            for &i in &[200usize, 500, 800] {
                let t = g.t(i);
                let o = inverted_relaxation(&p, 1.0, t);
                let tol = if c.method == RelaxMethod::History { 5e-3 } else { 5e-4 };
                assert!((c.values[i] - o).abs() < tol * o, "{} t={t}: {} vs {o}", p.name(), c.values[i]);
            }
        }
    }

    #[test]
    fn resolvent_near_classical_limit() {
        let p = KernelPair::fractional(0.999).unwrap();
        let g = TimeGrid::graded(3.0, 600, 2.0).unwrap();
        let h = resolvent_h(&p, 1.0, &g).unwrap();
        for i in [150usize, 300, 600] {
            let t = g.t(i);
            assert!((h[i] - (-t).exp()).abs() < 5e-3, "t={t} {} vs {}", h[i], (-t).exp());
        }
    }

    #[test]
    fn resolvent_is_minus_derivative() {
        let p = KernelPair::fractional(0.5).unwrap();
        let g = TimeGrid::graded(5.0, 800, 4.0).unwrap();
        let h = resolvent_h(&p, 1.0, &g).unwrap();
        for i in [200usize, 400, 700] {
            let t = g.t(i);
            // oracle: h = -d/dt E_{1/2}(-t^{1/2}) by inversion of mu l/(1 + mu l)
            let o = talbot(|z| { let m = z.powf(-0.5); m / (1.0 + m) }, t, TALBOT_TERMS);
            assert!(h[i] >= 0.0);
            assert!((h[i] - o).abs() < 1e-3 * o, "t={t}: {} vs {o}", h[i]);
        }
    }

    #[test]
    fn regularized_kernel_matches_convolution() {
        let p = KernelPair::fractional(0.5).unwrap();
        let g = TimeGrid::graded(4.0, 600, 4.0).unwrap();
        let kn = regularized_k(&p, 3, &g).unwrap();
        assert_eq!(kn[0], 3.0);
        assert!(kn.windows(2).all(|w| w[1] <= w[0]));
        // k * h_n through the history form on H = 1 - s
        let s = solve_relaxation(&p, 3.0, &g).unwrap();
        let w = ConvolutionWeights::new(&p.k(), &g);
        for i in [100usize, 300, 600] {
            let a = w.interval(i);
            let conv: f64 = (1..=i).map(|j| a[j - 1] * (s.values[j - 1] - s.values[j]) / g.step(j)).sum();
            assert!((conv - kn[i]).abs() < 2e-3 * kn[i], "{conv} vs {}", kn[i]);
        }
        let exact = regularized_fractional(0.5, 3.0, &g);
        assert!((kn[600] - exact[600]).abs() < 1e-3 * exact[600]);
    }

    #[test]
    fn limit_values() {
        let p = KernelPair::fractional(0.4).unwrap();
        assert_eq!(limit_value(&p, 1.0).unwrap(), LimitValue::Zero);
        let se = KernelPair::new(Family::SwitchedExp { alpha: 0.5, gamma: 1.0 }).unwrap();
        assert!((limit_value(&se, 1.0).unwrap().value() - 0.5).abs() < 1e-15);
        let se4 = KernelPair::new(Family::SwitchedExp { alpha: 0.5, gamma: 4.0 }).unwrap();
        assert!((limit_value(&se4, 2.0).unwrap().value() - 0.5).abs() < 1e-15);
        assert!(limit_value(&se, 1e9).unwrap().value() < 1e-8);
    }

    #[test]
    fn bounds_hold_for_fractional_pair() {
        let p = KernelPair::fractional(0.5).unwrap();
        let g = TimeGrid::graded(20.0, 400, 4.0).unwrap();
        let c = solve_relaxation(&p, 1.0, &g).unwrap();
        let r = check_bounds(&c, &p).unwrap();
        assert!(r.pass, "{r:?}");
        // reduces to the Mittag-Leffler bounds
        let (lo, up) = crate::special::ml_bounds(0.5, g.t(400).sqrt());
        assert!((r.lower[400] - lo).abs() < 1e-12 && (r.upper[400] - up).abs() < 1e-12);
    }

    #[test]
    fn converges_to_closed_form() {
        let mut errs = Vec::new();
        for n in [100usize, 200, 400] {
            let g = TimeGrid::graded(10.0, n, 4.0).unwrap();
            let c = solve_relaxation(&KernelPair::fractional(0.5).unwrap(), 1.0, &g).unwrap();
            let cf = closed_form_curve(0.5, 1.0, &g).unwrap();
            errs.push(c.values.iter().zip(&cf.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
        assert!((errs[0] / errs[1]).log2() >= 1.5 && (errs[1] / errs[2]).log2() >= 1.5, "{errs:?}");
        let _ = rel_max;
    }
}

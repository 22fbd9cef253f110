//! The discrete history operator d/dt (k * [v - v0]) and the inequalities built on it.

use crate::error::{domain, usage, Result};
use crate::kernel::{ConvolutionWeights, Kernel, KernelPair, TimeGrid};
use crate::quadrature::gl;
use crate::relaxation::{regularized_fractional, regularized_k};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// L1-type approximation of d/dt (k * [v - v0]) for v piecewise linear through its samples.
#[derive(Debug, Clone)]
pub struct HistoryOperator {
    weights: ConvolutionWeights,
    k_nodes: Vec<f64>,
}

impl HistoryOperator {
    pub fn new(kernel: &Kernel, grid: &TimeGrid) -> Self {
        let k_nodes = grid.nodes().iter().map(|&t| kernel.eval(t)).collect();
        Self { weights: ConvolutionWeights::new(kernel, grid), k_nodes }
    }

    pub fn from_pair(pair: &KernelPair, grid: &TimeGrid) -> Self {
        Self::new(&pair.k(), grid)
    }

    /// Operator with the regularized kernel k_n = k * h_n sampled on the grid.
    pub fn regularized(pair: &KernelPair, n: u32, grid: &TimeGrid) -> Result<Self> {
        let kn = regularized_k(pair, n, grid)?;
        Ok(Self::new(&Kernel::sampled(grid.nodes().to_vec(), kn)?, grid))
    }

    /// k_n = n E_alpha(-n t^alpha) from the closed form.
    pub fn fractional_regularized(alpha: f64, n: f64, grid: &TimeGrid) -> Result<Self> {
        let kn = regularized_fractional(alpha, n, grid);
        Ok(Self::new(&Kernel::sampled(grid.nodes().to_vec(), kn)?, grid))
    }

    pub fn grid(&self) -> &TimeGrid {
        self.weights.grid()
    }

    /// k(t_n); infinite at n = 0 for singular kernels.
    pub fn kernel_at(&self, n: usize) -> f64 {
        self.k_nodes[n]
    }

    /// A_j = (1/h_j) int_{t_{j-1}}^{t_j} k(t_n - s) ds for j = 1..=n (stored at j - 1).
    pub fn coefficients(&self, n: usize) -> Vec<f64> {
        let g = self.grid();
        self.weights.interval(n).iter().enumerate().map(|(i, a)| a / g.step(i + 1)).collect()
    }

    /// Value at node n >= 1 using samples v[0..=n].
    pub fn apply_at(&self, n: usize, v: &[f64], v0: f64) -> f64 {
        let g = self.grid();
        let a = self.weights.interval(n);
        let mut d = 0.0;
        for j in 1..=n {
            d += a[j - 1] / g.step(j) * (v[j] - v[j - 1]);
        }
        if v[0] != v0 {
            d += self.k_nodes[n] * (v[0] - v0);
        }
        d
    }

    /// Split d_n = diag * v_n + rest, for implicit time stepping.
    pub fn split(&self, n: usize, v: &[f64], v0: f64) -> (f64, f64) {
        let g = self.grid();
        let a = self.weights.interval(n);
        let diag = a[n - 1] / g.step(n);
        let mut rest = -diag * v[n - 1];
        for j in 1..n {
            rest += a[j - 1] / g.step(j) * (v[j] - v[j - 1]);
        }
        if v[0] != v0 {
            rest += self.k_nodes[n] * (v[0] - v0);
        }
        (diag, rest)
    }

    /// Operator applied at every node; the entry at t = 0 is 0.
    pub fn apply(&self, v: &[f64], v0: f64) -> Result<Vec<f64>> {
        if v.len() != self.grid().len() {
            return usage(format!("samples have length {}, grid has {}", v.len(), self.grid().len()));
        }
        let mut out = vec![0.0; v.len()];
        for (n, o) in out.iter_mut().enumerate().skip(1) {
            *o = self.apply_at(n, v, v0);
        }
        Ok(out)
    }
}

/// Convex C^1 test functions for the chain-rule identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum ConvexMap {
    /// y^2 / 2
    Quadratic,
    /// |y|^p / p, p > 1
    Power { p: f64 },
    /// sqrt(y^2 + eps^2) - eps for y > 0, zero otherwise
    SmoothPositive { eps: f64 },
}

impl ConvexMap {
    /// Parse `square`, `power:<p>` or `positive:<eps>`.
    pub fn from_name(name: &str) -> Result<Self> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.and_then(|s| s.trim().parse::<f64>().ok()).ok_or_else(|| crate::Error::Usage(format!("convex map `{name}` needs a numeric parameter")))
        };
        let m = match head {
            "square" | "quadratic" => ConvexMap::Quadratic,
            "power" => ConvexMap::Power { p: num(arg)? },
            "positive" => ConvexMap::SmoothPositive { eps: num(arg)? },
            _ => return usage(format!("convex map `{name}` is not in the catalog (square, power:<p>, positive:<eps>)")),
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ConvexMap::Power { p } if !(p > 1.0) => usage(format!("power map needs p > 1, got {p}")),
            ConvexMap::SmoothPositive { eps } if !(eps > 0.0) => usage(format!("smoothing needs eps > 0, got {eps}")),
            _ => Ok(()),
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        match *self {
            ConvexMap::Quadratic => 0.5 * y * y,
            ConvexMap::Power { p } => y.abs().powf(p) / p,
            ConvexMap::SmoothPositive { eps } => {
                if y > 0.0 {
                    y * y / ((y * y + eps * eps).sqrt() + eps)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn derivative(&self, y: f64) -> f64 {
        match *self {
            ConvexMap::Quadratic => y,
            ConvexMap::Power { p } => y.abs().powf(p - 1.0) * y.signum(),
            ConvexMap::SmoothPositive { eps } => {
                if y > 0.0 {
                    y / (y * y + eps * eps).sqrt()
                } else {
                    0.0
                }
            }
        }
    }

    /// -H(y) + H'(y) y + H(0), nonnegative for convex H.
    pub fn dropped_term(&self, y: f64) -> f64 {
        -self.value(y) + self.derivative(y) * y + self.value(0.0)
    }
}

fn interp(nodes: &[f64], v: &[f64], t: f64) -> f64 {
    let i = nodes.partition_point(|&x| x < t);
    if i == 0 {
        return v[0];
    }
    if i >= nodes.len() {
        return v[v.len() - 1];
    }
    if nodes[i] == t {
        return v[i];
    }
    let th = (t - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
    v[i - 1] * (1.0 - th) + v[i] * th
}

/// LHS minus RHS of the chain-rule identity
/// H'(u) d/dt(k*u) = d/dt(k*H(u)) + (-H(u) + H'(u)u) k + int (H(u(t-s)) - H(u) - H'(u)(u(t-s) - u)) (-k'(s)) ds
/// at every node; k is given by finite samples on the grid.
pub fn fundamental_identity_residual(h: ConvexMap, u: &[f64], k: &[f64], grid: &TimeGrid) -> Result<Vec<f64>> {
    h.validate()?;
    if u.len() != grid.len() || k.len() != grid.len() {
        return usage("u and k must be sampled on the grid");
    }
    let op = HistoryOperator::new(&Kernel::sampled(grid.nodes().to_vec(), k.to_vec())?, grid);
    let hu: Vec<f64> = u.iter().map(|&y| h.value(y)).collect();
    let t = grid.nodes();
    let mut res = vec![0.0; u.len()];
    for n in 0..u.len() {
        let (dk_u, dk_hu) = if n == 0 { (k[0] * u[0], k[0] * hu[0]) } else { (op.apply_at(n, u, 0.0), op.apply_at(n, &hu, 0.0)) };
        let (un, d) = (u[n], h.derivative(u[n]));
        let lhs = d * dk_u;
        let local = (-hu[n] + d * un) * k[n];
        // lag integral with u interpolated linearly and -k' constant on each lag interval
        let f = |lag: f64| {
            let back = interp(t, u, t[n] - lag);
            h.value(back) - hu[n] - d * (back - un)
        };
        let mut memory = 0.0;
        for m in 1..=n {
            let slope = (k[m - 1] - k[m]) / (t[m] - t[m - 1]);
            memory += slope * gl(4).integrate(t[m - 1], t[m], f);
        }
        res[n] = lhs - (dk_hu + local + memory);
    }
    Ok(res)
}

/// A finite positive measure on points: weights and the samples live on the same index set.
#[derive(Debug, Clone)]
pub struct PointMeasure {
    pub weights: Vec<f64>,
}

impl PointMeasure {
    pub fn counting(n: usize) -> Self {
        Self { weights: vec![1.0; n] }
    }

    /// Uniform weights summing to 1.
    pub fn normalized(n: usize) -> Self {
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub fn norm(&self, v: &[f64], p: f64) -> f64 {
        self.weights.iter().zip(v).map(|(w, x)| w * x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Gap int |u|^{p-2} u D[u - u0] - |u|_p^{p-1} D[|u|_p - |u0|_p] at each node n >= 1
/// (entry 0 is 0). The field is u[n][x] for time node n, point x.
pub fn lp_gap(u: &[Vec<f64>], u0: &[f64], measure: &PointMeasure, op: &HistoryOperator, p: f64) -> Result<Vec<f64>> {
    if !(p > 1.0) {
        return domain(format!("p = {p} must exceed 1"));
    }
    let nt = op.grid().len();
    if u.len() != nt {
        return usage(format!("field has {} time slices, grid has {nt}", u.len()));
    }
    let m = measure.weights.len();
    if u0.len() != m || u.iter().any(|s| s.len() != m) {
        return usage("field, initial data and measure sizes differ");
    }
    let norms: Vec<f64> = u.iter().map(|s| measure.norm(s, p)).collect();
    let norm0 = measure.norm(u0, p);
    let mut gap = vec![0.0; nt];
    let mut column = vec![0.0; nt];
    for n in 1..nt {
        let mut lhs = 0.0;
        for x in 0..m {
            for (c, s) in column[..=n].iter_mut().zip(u) {
                *c = s[x];
            }
            let d = op.apply_at(n, &column[..=n], u0[x]);
            let y = u[n][x];
            lhs += measure.weights[x] * y.abs().powf(p - 2.0) * y * d;
        }
        let rhs = norms[n].powf(p - 1.0) * op.apply_at(n, &norms[..=n], norm0);
        gap[n] = lhs - rhs;
    }
    Ok(gap)
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub min_gap: f64,
    pub violations: usize,
    pub tolerance: f64,
}

/// Rounding allowance for the gap.
pub const GAP_TOL: f64 = 1e-12;

/// Randomized trials of the gap over p in {1.5, 2, 3, 5}, random points, weights,
/// grids, fields and regularized fractional kernels.
pub fn random_lp_trials(trials: usize, seed: u64) -> Result<TrialSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ps = [1.5, 2.0, 3.0, 5.0];
    // a small bank of regularized kernels, resampled onto each trial grid
    let fine = TimeGrid::graded(1.0, 400, 2.0)?;
    let mut bank = Vec::new();
    for &alpha in &[0.3, 0.5, 0.7] {
        for &n in &[1.0, 4.0, 10.0] {
            bank.push(Kernel::sampled(fine.nodes().to_vec(), regularized_fractional(alpha, n, &fine))?);
        }
    }
    let mut min_gap = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..trials {
        let p = ps[rng.gen_range(0..ps.len())];
        let nt = rng.gen_range(3..12);
        let grid = TimeGrid::graded(1.0, nt, rng.gen_range(1.0..3.0))?;
        let kernel = &bank[rng.gen_range(0..bank.len())];
        let op = HistoryOperator::new(kernel, &grid);
        let m = rng.gen_range(1..21);
        let measure = if rng.gen_bool(0.5) {
            PointMeasure::counting(m)
        } else {
            PointMeasure { weights: (0..m).map(|_| rng.gen_range(0.01..1.0)).collect() }
        };
        let u0: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u: Vec<Vec<f64>> = (0..=nt).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let g = lp_gap(&u, &u0, &measure, &op, p)?;
        for &v in &g[1..] {
            min_gap = min_gap.min(v);
            if v < -GAP_TOL {
                violations += 1;
            }
        }
    }
    Ok(TrialSummary { trials, min_gap, violations, tolerance: GAP_TOL })
}

/// Residuals below this are rounding noise.
pub const IDENTITY_FLOOR: f64 = 1e-13;

/// Max residual of the chain-rule identity at three uniform refinements (N, 2N, 4N) for a
/// smooth sign-changing u and k = k_1 of the fractional pair, with the observed orders.
pub fn identity_convergence(h: ConvexMap, alpha: f64, n0: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut errs = Vec::new();
    for level in 0..3 {
        let grid = TimeGrid::uniform(1.0, n0 << level)?;
        let u: Vec<f64> = grid.nodes().iter().map(|&t| (3.0 * t).sin() - 0.4 + 0.3 * t * t).collect();
        let k = regularized_fractional(alpha, 1.0, &grid);
        let r = fundamental_identity_residual(h, &u, &k, &grid)?;
        errs.push(r.iter().fold(0.0f64, |a, b| a.max(b.abs())));
    }
    // a residual already at rounding level counts as exact
    let orders = errs
        .windows(2)
        .map(|w| if w[1] <= IDENTITY_FLOOR { f64::INFINITY } else { (w[0] / w[1]).log2() })
        .collect();
    Ok((errs, orders))
}

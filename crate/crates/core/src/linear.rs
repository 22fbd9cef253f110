//! The linear problem d/dt (k * [u - u0]) - (a(t, x) u_x)_x = 0 on (0, L) with
//! homogeneous Dirichlet data, discretized by finite differences in space.

use crate::calculus::HistoryOperator;
use crate::error::{domain, usage, Error, Result};
use crate::kernel::{Family, KernelPair, TimeGrid};
use crate::relaxation::{closed_form_curve, RelaxationSolver};
use crate::report::Verdict;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mesh1D {
    pub length: f64,
    /// interior nodes
    pub m: usize,
}

impl Mesh1D {
    pub fn new(length: f64, m: usize) -> Result<Self> {
        if m < 3 {
            return domain(format!("mesh needs at least 3 interior nodes, got {m}"));
        }
        if !(length > 0.0) || !length.is_finite() {
            return domain(format!("interval length {length} must be positive"));
        }
        Ok(Self { length, m })
    }

    pub fn h(&self) -> f64 {
        self.length / (self.m + 1) as f64
    }

    /// Interior node x_i, i = 0..m (position (i + 1) h).
    pub fn x(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.x(i)).collect()
    }

    /// Discrete Dirichlet eigenvalue (2/h^2)(1 - cos(n pi h / L)), n >= 1.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        let h = self.h();
        2.0 / (h * h) * (1.0 - (n as f64 * PI * h / self.length).cos())
    }

    pub fn continuum_eigenvalue(&self, n: usize) -> f64 {
        (n as f64 * PI / self.length).powi(2)
    }

    /// sqrt(2/L) sin(n pi x / L) at the interior nodes; orthonormal in the discrete inner product.
    pub fn eigenvector(&self, n: usize) -> Vec<f64> {
        let c = (2.0 / self.length).sqrt();
        (0..self.m).map(|i| c * (n as f64 * PI * self.x(i) / self.length).sin()).collect()
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.h() * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    pub fn l2(&self, v: &[f64]) -> f64 {
        self.inner(v, v).sqrt()
    }

    pub fn lp(&self, v: &[f64], p: f64) -> f64 {
        (self.h() * v.iter().map(|x| x.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
    }
}

/// Diffusion coefficient a(t, x) with declared bounds nu <= a <= upper.
#[derive(Clone)]
pub struct Coefficient {
    pub label: String,
    pub nu: f64,
    pub upper: f64,
    constant: bool,
    f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Coefficient").field("label", &self.label).field("nu", &self.nu).field("upper", &self.upper).finish()
    }
}

impl Coefficient {
    pub fn new(label: &str, nu: f64, upper: f64, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if !(nu > 0.0) || !(upper >= nu) {
            return domain(format!("coefficient bounds need 0 < nu <= upper, got {nu}, {upper}"));
        }
        Ok(Self { label: label.into(), nu, upper, constant: false, f: Arc::new(f) })
    }

    pub fn constant(nu: f64) -> Result<Self> {
        let mut c = Self::new("constant", nu, nu, move |_, _| nu)?;
        c.constant = true;
        Ok(c)
    }

    /// 1 + x on (0, L).
    pub fn linear(length: f64) -> Result<Self> {
        Self::new("linear", 1.0, 1.0 + length, |_, x| 1.0 + x)
    }

    /// 2 nu (1.5 + sin(5x) cos(t)), minimum nu.
    pub fn oscillating(nu: f64) -> Result<Self> {
        Self::new("oscillating", nu, 5.0 * nu, move |t, x| 2.0 * nu * (1.5 + (5.0 * x).sin() * t.cos()))
    }

    /// nu on the left half, 3 nu on the right half.
    pub fn step(nu: f64, length: f64) -> Result<Self> {
        Self::new("step", nu, 3.0 * nu, move |_, x| if x < 0.5 * length { nu } else { 3.0 * nu })
    }

    /// nu on [2k, 2k+1), 2 nu on [2k+1, 2k+2).
    pub fn switching(nu: f64) -> Result<Self> {
        Self::new("switching", nu, 2.0 * nu, move |t, _| if (t.floor() as i64) % 2 == 0 { nu } else { 2.0 * nu })
    }

    /// The five standard scenarios with lower bound nu.
    pub fn scenarios(nu: f64, length: f64) -> Result<Vec<Coefficient>> {
        let lin = Self::linear(length)?;
        let scaled = Self::new("linear", nu, nu * lin.upper, move |_, x| nu * (1.0 + x))?;
        Ok(vec![Self::constant(nu)?, scaled, Self::oscillating(nu)?, Self::step(nu, length)?, Self::switching(nu)?])
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        (self.f)(t, x)
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    /// off[i] couples i and i + 1
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let m = self.diag.len();
        (0..m)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < m {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solve (shift I + self) x = rhs by the Thomas algorithm.
    pub fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let m = self.diag.len();
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        let mut b = shift + self.diag[0];
        if !(b > 0.0) {
            return Err(Error::Numerical { what: "tridiagonal pivot".into(), residual: b });
        }
        c[0] = if m > 1 { self.off[0] / b } else { 0.0 };
        d[0] = rhs[0] / b;
        for i in 1..m {
            b = shift + self.diag[i] - self.off[i - 1] * c[i - 1];
            if !(b > 0.0) {
                return Err(Error::Numerical { what: "tridiagonal pivot".into(), residual: b });
            }
            c[i] = if i + 1 < m { self.off[i] / b } else { 0.0 };
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / b;
        }
        for i in (0..m - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

/// -(a u_x)_x with a sampled at cell midpoints and time t.
pub fn assemble_operator(mesh: &Mesh1D, coeff: &Coefficient, t: f64) -> Result<Tridiagonal> {
    let h = mesh.h();
    let m = mesh.m;
    let mut a = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let x = (i as f64 + 0.5) * h;
        let v = coeff.eval(t, x);
        if !(v >= coeff.nu * (1.0 - 1e-12)) || !(v <= coeff.upper * (1.0 + 1e-12)) {
            return domain(format!("coefficient `{}` = {v} at (t={t}, x={x}) outside [{}, {}]", coeff.label, coeff.nu, coeff.upper));
        }
        a.push(v);
    }
    let s = 1.0 / (h * h);
    Ok(Tridiagonal { diag: (0..m).map(|i| (a[i] + a[i + 1]) * s).collect(), off: (0..m - 1).map(|i| -a[i + 1] * s).collect() })
}

/// Output of a time-stepping run: fields[n][i] at time node n, interior node i.
#[derive(Debug, Clone)]
pub struct LinearRun {
    pub mesh: Mesh1D,
    pub grid: TimeGrid,
    pub fields: Vec<Vec<f64>>,
}

/// Fully implicit scheme: L1 history operator in time, coefficient at t_n.
pub fn step_solve(pair: &KernelPair, mesh: &Mesh1D, coeff: &Coefficient, u0: &[f64], grid: &TimeGrid) -> Result<LinearRun> {
    step_solve_with(&HistoryOperator::from_pair(pair, grid), mesh, coeff, u0)
}

pub fn step_solve_with(op: &HistoryOperator, mesh: &Mesh1D, coeff: &Coefficient, u0: &[f64]) -> Result<LinearRun> {
    if u0.len() != mesh.m {
        return usage(format!("initial data has {} values, mesh has {} interior nodes", u0.len(), mesh.m));
    }
    if u0.iter().any(|v| !v.is_finite()) {
        return domain("initial data must be finite");
    }
    let grid = op.grid().clone();
    let nt = grid.len();
    let m = mesh.m;
    let mut fields = vec![u0.to_vec()];
    // increments u_j - u_{j-1}, kept for the history sums
    let mut incr: Vec<Vec<f64>> = Vec::with_capacity(nt);
    let constant_op = if coeff.is_constant() { Some(assemble_operator(mesh, coeff, 0.0)?) } else { None };
    for n in 1..nt {
        let a = op.coefficients(n);
        let diag = a[n - 1];
        let mut rhs: Vec<f64> = fields[n - 1].iter().map(|v| diag * v).collect();
        for (j, d) in incr.iter().enumerate() {
            let c = a[j];
            for i in 0..m {
                rhs[i] -= c * d[i];
            }
        }
        let op_n = match &constant_op {
            Some(t) => t.clone(),
            None => assemble_operator(mesh, coeff, grid.t(n))?,
        };
        let u = op_n.solve_shifted(diag, &rhs)?;
        incr.push(u.iter().zip(&fields[n - 1]).map(|(x, y)| x - y).collect());
        fields.push(u);
    }
    Ok(LinearRun { mesh: *mesh, grid, fields })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Eigenpairs {
    /// eigenpairs of the discrete Laplacian
    Discrete,
    /// sin(n pi x / L) and (n pi / L)^2
    Continuum,
}

/// Relaxation curves s_{mu_j} on the grid: closed form for the fractional pair,
/// product integration otherwise.
pub fn relaxation_table(pair: &KernelPair, mus: &[f64], grid: &TimeGrid) -> Result<Vec<Vec<f64>>> {
    match pair.family {
        Family::Fractional { alpha } => mus.iter().map(|&mu| Ok(closed_form_curve(alpha, mu, grid)?.values)).collect(),
        _ => {
            let solver = RelaxationSolver::new(pair, grid);
            mus.iter().map(|&mu| Ok(solver.solve(mu)?.values)).collect()
        }
    }
}

/// u(t) = sum_n s_{nu lambda_n}(t) (u0 | phi_n) phi_n over the first `modes` modes.
pub fn spectral_solution(mesh: &Mesh1D, pair: &KernelPair, coeff: &Coefficient, u0: &[f64], grid: &TimeGrid, eig: Eigenpairs, modes: usize) -> Result<Vec<Vec<f64>>> {
    if !coeff.is_constant() {
        return usage(format!("spectral representation needs a constant coefficient, got `{}`", coeff.label));
    }
    let modes = modes.min(mesh.m).max(1);
    let nu = coeff.nu;
    let lams: Vec<f64> = (1..=modes)
        .map(|n| match eig {
            Eigenpairs::Discrete => mesh.eigenvalue(n),
            Eigenpairs::Continuum => mesh.continuum_eigenvalue(n),
        })
        .collect();
    let phis: Vec<Vec<f64>> = (1..=modes).map(|n| mesh.eigenvector(n)).collect();
    let coefs: Vec<f64> = phis.iter().map(|p| mesh.inner(u0, p)).collect();
    let mus: Vec<f64> = lams.iter().map(|l| nu * l).collect();
    let s = relaxation_table(pair, &mus, grid)?;
    let mut out = vec![vec![0.0; mesh.m]; grid.len()];
    for (k, phi) in phis.iter().enumerate() {
        for (n, row) in out.iter_mut().enumerate() {
            let a = s[k][n] * coefs[k];
            for (r, p) in row.iter_mut().zip(phi) {
                *r += a * p;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub coefficient: String,
    pub family: String,
    pub nu: f64,
    pub lambda1_discrete: f64,
    pub lambda1_continuum: f64,
    #[serde(skip)]
    pub times: Vec<f64>,
    #[serde(skip)]
    pub l2: Vec<f64>,
    #[serde(skip)]
    pub positive: Vec<f64>,
    #[serde(skip)]
    pub negative: Vec<f64>,
    /// s_{nu lambda1}(t) from the scheme's own scalar recursion
    #[serde(skip)]
    pub envelope: Vec<f64>,
    /// s_{nu lambda1}(t) by product integration of the Volterra form
    #[serde(skip)]
    pub envelope_volterra: Vec<f64>,
    /// max over t > 0 of |u(t)| / (s(t) |u0|), and the same for the two parts
    pub max_ratio: f64,
    pub max_ratio_positive: f64,
    pub max_ratio_negative: f64,
    pub tolerance: f64,
    /// informational: L_p norms against s_{nu lambda1 rho(p)} |u0|_p, rho(p) = 4(p-1)/p^2
    pub lp_exponent: f64,
    pub lp_max_ratio: f64,
    pub verdict: Verdict,
}

/// Relative slack on the envelope.
pub const ENVELOPE_TOL: f64 = 0.05;

fn part(v: &[f64], positive: bool) -> Vec<f64> {
    v.iter().map(|&x| if positive { x.max(0.0) } else { (-x).max(0.0) }).collect()
}

/// Norm series of a run against s_{nu lambda1}(t) |u0| and its positive and negative parts.
pub fn decay_check(run: &LinearRun, pair: &KernelPair, coeff: &Coefficient) -> Result<DecayReport> {
    let mesh = &run.mesh;
    let nu = coeff.nu;
    let lam = mesh.eigenvalue(1);
    let env = RelaxationSolver::history(pair, &run.grid).solve(nu * lam)?.values;
    let env_v = RelaxationSolver::new(pair, &run.grid).solve(nu * lam)?.values;
    let l2: Vec<f64> = run.fields.iter().map(|f| mesh.l2(f)).collect();
    let pos: Vec<f64> = run.fields.iter().map(|f| mesh.l2(&part(f, true))).collect();
    let neg: Vec<f64> = run.fields.iter().map(|f| mesh.l2(&part(f, false))).collect();
    let ratio = |series: &[f64]| -> f64 {
        let n0 = series[0];
        if n0 == 0.0 {
            return if series.iter().all(|&x| x == 0.0) { 0.0 } else { f64::INFINITY };
        }
        (1..series.len()).map(|i| series[i] / (env[i] * n0)).fold(0.0, f64::max)
    };
    let (r, rp, rn) = (ratio(&l2), ratio(&pos), ratio(&neg));
    let p = 4.0;
    let rho = 4.0 * (p - 1.0) / (p * p);
    let env_p = RelaxationSolver::history(pair, &run.grid).solve(nu * lam * rho)?.values;
    let lp: Vec<f64> = run.fields.iter().map(|f| mesh.lp(f, p)).collect();
    let lp_ratio = if lp[0] > 0.0 { (1..lp.len()).map(|i| lp[i] / (env_p[i] * lp[0])).fold(0.0, f64::max) } else { 0.0 };
    let lim = 1.0 + ENVELOPE_TOL;
    Ok(DecayReport {
        coefficient: coeff.label.clone(),
        family: pair.name().into(),
        nu,
        lambda1_discrete: lam,
        lambda1_continuum: mesh.continuum_eigenvalue(1),
        times: run.grid.nodes().to_vec(),
        l2,
        positive: pos,
        negative: neg,
        envelope: env,
        envelope_volterra: env_v,
        max_ratio: r,
        max_ratio_positive: rp,
        max_ratio_negative: rn,
        tolerance: ENVELOPE_TOL,
        lp_exponent: rho,
        lp_max_ratio: lp_ratio,
        verdict: Verdict::from_bool(r <= lim && rp <= lim && rn <= lim),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxPrincipleReport {
    pub lower: f64,
    pub upper: f64,
    pub violations: usize,
    pub max_excess: f64,
}

/// Count nodes with u outside [min(0, inf u0), max(0, sup u0)].
pub fn max_principle_check(run: &LinearRun) -> MaxPrincipleReport {
    let u0 = &run.fields[0];
    let lower = u0.iter().copied().fold(0.0, f64::min);
    let upper = u0.iter().copied().fold(0.0, f64::max);
    let mut violations = 0;
    let mut max_excess = 0.0f64;
    for f in &run.fields[1..] {
        for &v in f {
            let e = (v - upper).max(lower - v);
            if e > 0.0 {
                violations += 1;
                max_excess = max_excess.max(e);
            }
        }
    }
    MaxPrincipleReport { lower, upper, violations, max_excess }
}

/// Max over t > 0 of |a(t) - b(t)|_2 / |b(t)|_2.
pub fn relative_l2_error(mesh: &Mesh1D, a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .skip(1)
        .map(|(x, y)| {
            let d: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
            mesh.l2(&d) / mesh.l2(y)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderStudy {
    pub alpha: f64,
    /// N for temporal studies, M for spatial ones
    pub levels: Vec<usize>,
    pub errors: Vec<f64>,
    /// log2 ratios between consecutive levels
    pub orders: Vec<f64>,
}

impl OrderStudy {
    fn new(alpha: f64, levels: Vec<usize>, errors: Vec<f64>) -> Self {
        let orders = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        Self { alpha, levels, errors, orders }
    }

    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// x (L - x), the test datum of the oracle studies.
pub fn parabola(mesh: &Mesh1D) -> Vec<f64> {
    mesh.nodes().iter().map(|x| x * (mesh.length - x)).collect()
}

/// Stepping against the discrete-mode spectral solution for doubled N; isolates the time error.
pub fn temporal_study(alpha: f64, m: usize, t_end: f64, ns: &[usize]) -> Result<OrderStudy> {
    let pair = KernelPair::fractional(alpha)?;
    let c = Coefficient::constant(1.0)?;
    let mesh = Mesh1D::new(PI, m)?;
    let u0 = parabola(&mesh);
    let mut errs = Vec::new();
    for &n in ns {
        let g = TimeGrid::graded(t_end, n, crate::kernel::default_grading(alpha))?;
        let run = step_solve(&pair, &mesh, &c, &u0, &g)?;
        let sp = spectral_solution(&mesh, &pair, &c, &u0, &g, Eigenpairs::Discrete, m)?;
        errs.push(relative_l2_error(&mesh, &run.fields, &sp));
    }
    Ok(OrderStudy::new(alpha, ns.to_vec(), errs))
}

/// Discrete-mode against continuum-mode spectral solutions for doubled M + 1; isolates the space error.
pub fn spatial_study(alpha: f64, n: usize, t_end: f64, ms: &[usize]) -> Result<OrderStudy> {
    let pair = KernelPair::fractional(alpha)?;
    let c = Coefficient::constant(1.0)?;
    let g = TimeGrid::graded(t_end, n, crate::kernel::default_grading(alpha))?;
    let mut errs = Vec::new();
    for &m in ms {
        let mesh = Mesh1D::new(PI, m)?;
        let u0 = parabola(&mesh);
        let a = spectral_solution(&mesh, &pair, &c, &u0, &g, Eigenpairs::Discrete, m)?;
        let b = spectral_solution(&mesh, &pair, &c, &u0, &g, Eigenpairs::Continuum, m)?;
        errs.push(relative_l2_error(&mesh, &a, &b));
    }
    Ok(OrderStudy::new(alpha, ms.to_vec(), errs))
}

/// Stepping against the continuum-mode solution at one resolution.
pub fn oracle_error(alpha: f64, m: usize, n: usize, t_end: f64) -> Result<f64> {
    let pair = KernelPair::fractional(alpha)?;
    let c = Coefficient::constant(1.0)?;
    let mesh = Mesh1D::new(PI, m)?;
    let u0 = parabola(&mesh);
    let g = TimeGrid::graded(t_end, n, crate::kernel::default_grading(alpha))?;
    let run = step_solve(&pair, &mesh, &c, &u0, &g)?;
    let sp = spectral_solution(&mesh, &pair, &c, &u0, &g, Eigenpairs::Continuum, m)?;
    Ok(relative_l2_error(&mesh, &run.fields, &sp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::default_grading;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn discrete_eigenvalue_limit() {
        let m = Mesh1D::new(PI, 999).unwrap();
        assert!((m.eigenvalue(1) - 1.0).abs() < 1e-6);
        let small = Mesh1D::new(PI, 7).unwrap();
        let op = assemble_operator(&small, &Coefficient::constant(1.0).unwrap(), 0.0).unwrap();
        let phi = small.eigenvector(1);
        let a = op.apply(&phi);
        for i in 0..7 {
            assert!((a[i] - small.eigenvalue(1) * phi[i]).abs() < 1e-12);
        }
        assert!((small.inner(&phi, &phi) - 1.0).abs() < 1e-14);
        assert!(small.inner(&phi, &small.eigenvector(3)).abs() < 1e-14);
    }

    #[test]
    fn constant_coefficient_is_scaled_laplacian() {
        let m = Mesh1D::new(1.0, 9).unwrap();
        let a = assemble_operator(&m, &Coefficient::constant(2.5).unwrap(), 0.3).unwrap();
        let l = assemble_operator(&m, &Coefficient::constant(1.0).unwrap(), 0.3).unwrap();
        assert!(a.diag.iter().zip(&l.diag).all(|(x, y)| (x - 2.5 * y).abs() < 1e-12));
        assert!(a.off.iter().zip(&l.off).all(|(x, y)| (x - 2.5 * y).abs() < 1e-12));
    }

    #[test]
    fn rayleigh_quotient_bound() {
        let m = Mesh1D::new(1.0, 30).unwrap();
        let a = assemble_operator(&m, &Coefficient::linear(1.0).unwrap(), 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let v: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let q = m.inner(&a.apply(&v), &v) / m.inner(&v, &v);
            assert!(q >= m.eigenvalue(1) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn coefficient_below_bound_is_rejected() {
        let m = Mesh1D::new(1.0, 5).unwrap();
        let bad = Coefficient::new("bad", 1.0, 2.0, |_, x| 0.5 + x).unwrap();
        assert!(assemble_operator(&m, &bad, 0.0).is_err());
    }

    #[test]
    fn thomas_solves() {
        let m = Mesh1D::new(1.0, 6).unwrap();
        let a = assemble_operator(&m, &Coefficient::linear(1.0).unwrap(), 0.0).unwrap();
        let x: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
        let mut b = a.apply(&x);
        for (bi, xi) in b.iter_mut().zip(&x) {
            *bi += 3.0 * xi;
        }
        let y = a.solve_shifted(3.0, &b).unwrap();
        assert!(x.iter().zip(&y).all(|(p, q)| (p - q).abs() < 1e-13));
    }

    #[test]
    fn zero_data_stays_zero() {
        let m = Mesh1D::new(PI, 15).unwrap();
        let g = TimeGrid::graded(1.0, 20, 4.0).unwrap();
        let run = step_solve(&KernelPair::fractional(0.5).unwrap(), &m, &Coefficient::constant(1.0).unwrap(), &[0.0; 15], &g).unwrap();
        assert!(run.fields.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn first_mode_is_equality_case() {
        let m = Mesh1D::new(PI, 31).unwrap();
        let g = TimeGrid::graded(5.0, 100, 4.0).unwrap();
        let pair = KernelPair::fractional(0.5).unwrap();
        let c = Coefficient::constant(1.0).unwrap();
        let run = step_solve(&pair, &m, &c, &m.eigenvector(1), &g).unwrap();
        let r = decay_check(&run, &pair, &c).unwrap();
        for i in 1..g.len() {
            assert!((r.l2[i] / r.envelope[i] - 1.0).abs() < 1e-10);
        }
        assert!((r.max_ratio - 1.0).abs() < 1e-10);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn two_mode_data_decays_strictly_below() {
        let m = Mesh1D::new(PI, 31).unwrap();
        let g = TimeGrid::graded(5.0, 100, 4.0).unwrap();
        let pair = KernelPair::fractional(0.5).unwrap();
        let c = Coefficient::constant(1.0).unwrap();
        let u0: Vec<f64> = m.eigenvector(1).iter().zip(m.eigenvector(2)).map(|(a, b)| a - 0.3 * b).collect();
        let r = decay_check(&step_solve(&pair, &m, &c, &u0, &g).unwrap(), &pair, &c).unwrap();
        assert!(r.max_ratio < 1.0 && r.max_ratio_positive <= 1.0 + 1e-12 && r.max_ratio_negative <= 1.0 + 1e-12, "{r:?}");
    }

    #[test]
    fn parseval_and_initial_value() {
        let m = Mesh1D::new(PI, 31).unwrap();
        let g = TimeGrid::graded(2.0, 40, 4.0).unwrap();
        let pair = KernelPair::fractional(0.5).unwrap();
        let c = Coefficient::constant(1.0).unwrap();
        let u0: Vec<f64> = m.nodes().iter().map(|x| x * (PI - x)).collect();
        let u = spectral_solution(&m, &pair, &c, &u0, &g, Eigenpairs::Discrete, 31).unwrap();
        assert!(u[0].iter().zip(&u0).all(|(a, b)| (a - b).abs() < 1e-12));
        let coefs: Vec<f64> = (1..=31).map(|n| m.inner(&u0, &m.eigenvector(n))).collect();
        let s = relaxation_table(&pair, &(1..=31).map(|n| m.eigenvalue(n)).collect::<Vec<_>>(), &g).unwrap();
        for n in [10usize, 40] {
            let parseval: f64 = (0..31).map(|k| (s[k][n] * coefs[k]).powi(2)).sum();
            assert!((m.l2(&u[n]).powi(2) - parseval).abs() < 1e-12);
        }
        assert!(spectral_solution(&m, &pair, &Coefficient::linear(PI).unwrap(), &u0, &g, Eigenpairs::Discrete, 5).is_err());
    }

    #[test]
    fn stepping_matches_spectral_oracle() {
        let m = Mesh1D::new(PI, 31).unwrap();
        let g = TimeGrid::graded(1.0, 200, default_grading(0.5)).unwrap();
        let pair = KernelPair::fractional(0.5).unwrap();
        let c = Coefficient::constant(1.0).unwrap();
        let u0: Vec<f64> = m.nodes().iter().map(|x| x.sin()).collect();
        let run = step_solve(&pair, &m, &c, &u0, &g).unwrap();
        let exact = spectral_solution(&m, &pair, &c, &u0, &g, Eigenpairs::Discrete, 31).unwrap();
        let e = relative_l2_error(&m, &run.fields, &exact);
        assert!(e < 1e-3, "{e}");
    }

    #[test]
    fn spatial_order_is_two() {
        let s = spatial_study(0.5, 50, 1.0, &[15, 31, 63]).unwrap();
        assert!(s.orders.iter().all(|o| (o - 2.0).abs() < 0.05), "{s:?}");
    }

    #[test]
    fn temporal_order_at_low_order() {
        let s = temporal_study(0.3, 15, 1.0, &[50, 100, 200]).unwrap();
        assert!(s.min_order() > 1.55, "{s:?}");
    }

    #[test]
    fn maximum_principle_random_data() {
        let m = Mesh1D::new(1.0, 20).unwrap();
        let g = TimeGrid::graded(2.0, 40, 4.0).unwrap();
        let pair = KernelPair::fractional(0.5).unwrap();
        let c = Coefficient::oscillating(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let u0: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = max_principle_check(&step_solve(&pair, &m, &c, &u0, &g).unwrap());
            assert_eq!(r.violations, 0, "{r:?}");
        }
    }
}

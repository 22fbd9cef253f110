//! The work behind each subcommand.

use super::config::RunConfig;
use super::output::{Output, Record};
use crate::asymptotics::{self, AsymptoticModel};
use crate::calculus::{identity_convergence, random_lp_trials, ConvexMap};
use crate::kernel::{default_grading, Family, KernelPair, TimeGrid};
use crate::linear::{self, Coefficient, Mesh1D};
use crate::nonlinear::{self, NonlinearKind, NonlinearProblem};
use crate::ode::{sandwich_check, ScalarProblem};
use crate::relaxation::{check_bounds, closed_form_curve, envelope, solve_relaxation, RelaxMethod, RelaxationCurve};
use crate::report::Verdict;
use crate::special::bounds_sweep;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::io;
use std::time::Instant;

/// Max relative error of the product-integration curve against the closed form.
pub const ORACLE_TOL: f64 = 1e-4;
/// |ratio - 1| for the first-mode equality case.
pub const EQUALITY_TOL: f64 = 1e-3;
/// Relative L2 error of stepping against the spectral solution.
pub const SPECTRAL_TOL: f64 = 1e-3;
pub const MIN_TEMPORAL_ORDER: f64 = 1.5;
pub const SPATIAL_ORDER: f64 = 2.0;
pub const SPATIAL_ORDER_BAND: f64 = 0.1;
pub const MIN_IDENTITY_ORDER: f64 = 1.0;
/// Relative change of fitted exponents when the flux regularization is halved.
pub const EPS_SENSITIVITY_TOL: f64 = 0.01;

fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.par_iter().map(f).collect()
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// File-name tag of a kernel family with its parameters.
pub fn family_tag(f: &Family) -> String {
    match f {
        Family::Fractional { alpha } => format!("fractional_a{alpha}"),
        Family::FractionalExp { alpha, gamma } => format!("fractional_exp_a{alpha}_g{gamma}"),
        Family::SumFractional { terms } => {
            let parts: Vec<String> = terms.iter().map(|(d, a)| format!("{d}x{a}")).collect();
            format!("sum_fractional_{}", parts.join("_"))
        }
        Family::DistributedOrder => "distributed_order".into(),
        Family::SwitchedDistributed => "switched_distributed".into(),
        Family::SwitchedExp { alpha, gamma } => format!("switched_exp_a{alpha}_g{gamma}"),
    }
}

fn pair_of(f: &Family) -> crate::Result<KernelPair> {
    KernelPair::new(f.clone())
}

fn failed(out: &mut Output, command: &str, check: &str, id: &str, e: crate::Error) {
    out.record(Record::new(command, check, id, Some(Verdict::Fail), json!({ "error": e.to_string() })));
}

fn timed<R>(out: &mut Output, command: &str, f: impl FnOnce(&mut Output) -> io::Result<R>) -> io::Result<R> {
    let start = Instant::now();
    let r = f(out)?;
    out.timing(command, start.elapsed().as_secs_f64());
    Ok(r)
}

pub fn relax(cfg: &RunConfig, out: &mut Output) -> io::Result<()> {
    timed(out, "relax", |out| {
        let r = &cfg.relax;
        let items: Vec<(f64, f64)> = r.alphas.iter().flat_map(|&a| r.mus.iter().map(move |&m| (a, m))).collect();
        let results = par_map(&items, |&(alpha, mu)| -> crate::Result<_> {
            let grid = TimeGrid::graded(r.t_end, r.n, default_grading(alpha))?;
            let pair = KernelPair::fractional(alpha)?;
            let start = Instant::now();
            let curve = solve_relaxation(&pair, mu, &grid)?;
            let seconds = start.elapsed().as_secs_f64();
            let oracle = closed_form_curve(alpha, mu, &grid)?;
            let err = (1..grid.len()).map(|i| ((curve.values[i] - oracle.values[i]) / oracle.values[i]).abs()).fold(0.0, f64::max);
            let rows: Vec<Vec<f64>> = (0..grid.len())
                .map(|i| {
                    let t = grid.t(i);
                    let (lo, up) = envelope(&pair, mu, t);
                    vec![t, curve.values[i], oracle.values[i], lo, up]
                })
                .collect();
            Ok((err, seconds, rows))
        });
        for (&(alpha, mu), res) in items.iter().zip(results) {
            let id = format!("fractional_a{}_mu{}", num(alpha), num(mu));
            match res {
                Ok((err, seconds, rows)) => {
                    out.csv(&format!("relax_{id}"), &["t", "s_mu", "ml_oracle", "lower", "upper"], &rows)?;
                    out.dat(&format!("relax_{id}"), &[rows.iter().map(|r| (r[0], r[1])).collect()])?;
                    out.timing(&format!("relax curve {id}"), seconds);
                    let report = json!({ "alpha": alpha, "mu": mu, "t_end": r.t_end, "n": r.n, "max_relative_error": err, "tolerance": ORACLE_TOL });
                    out.record(Record::new("relax", "ml_oracle", id, Some(Verdict::from_bool(err <= ORACLE_TOL)), report));
                }
                Err(e) => failed(out, "relax", "ml_oracle", &id, e),
            }
        }

        let items: Vec<(Family, f64)> = r.families.iter().flat_map(|f| r.bound_mus.iter().map(move |&m| (f.clone(), m))).collect();
        let results = par_map(&items, |(fam, mu)| -> crate::Result<_> {
            let pair = pair_of(fam)?;
            let grid = TimeGrid::graded(r.bound_t_end, r.bound_n, pair.default_grading())?;
            let curve = solve_relaxation(&pair, *mu, &grid)?;
            let rep = check_bounds(&curve, &pair)?;
            Ok((curve, rep))
        });
        for ((fam, mu), res) in items.iter().zip(results) {
            let id = format!("{}_mu{}", family_tag(fam), num(*mu));
            match res {
                Ok((curve, rep)) => {
                    let rows: Vec<Vec<f64>> = (0..curve.values.len()).map(|i| vec![curve.t()[i], curve.values[i], rep.lower[i], rep.upper[i]]).collect();
                    out.csv(&format!("bounds_{id}"), &["t", "s_mu", "lower", "upper"], &rows)?;
                    out.dat(&format!("bounds_{id}"), &[rows.iter().map(|r| (r[0], r[1])).collect()])?;
                    let report = json!({
                        "family": fam, "mu": mu, "method": curve.method,
                        "max_lower_violation": rep.max_lower_violation, "max_upper_violation": rep.max_upper_violation,
                        "discretization_estimate": rep.discretization_estimate, "tolerance": rep.tolerance,
                    });
                    out.record(Record::new("relax", "two_sided_bounds", id, Some(Verdict::from_bool(rep.pass)), report));
                }
                Err(e) => failed(out, "relax", "two_sided_bounds", &id, e),
            }
        }
        Ok(())
    })
}

pub fn ml(cfg: &RunConfig, out: &mut Output) -> io::Result<()> {
    timed(out, "ml", |out| {
        match bounds_sweep(cfg.ml.n_alpha, cfg.ml.n_x) {
            Ok(rows) => {
                let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.alpha, r.x, r.value, r.lower, r.upper, if r.inside { 1.0 } else { 0.0 }]).collect();
                out.csv("ml_bounds", &["alpha", "x", "ml", "lower", "upper", "inside"], &table)?;
                let blocks: Vec<Vec<(f64, f64)>> = rows.chunks(cfg.ml.n_x).map(|c| c.iter().map(|r| (r.x, r.value)).collect()).collect();
                out.dat("ml_bounds", &blocks)?;
                let violations = rows.iter().filter(|r| !r.inside).count();
                let report = json!({ "pairs": rows.len(), "violations": violations });
                out.record(Record::new("ml", "bounds_sandwich", "grid", Some(Verdict::from_bool(violations == 0)), report));
            }
            Err(e) => failed(out, "ml", "bounds_sandwich", "grid", e),
        }
        Ok(())
    })
}

pub fn ode(cfg: &RunConfig, out: &mut Output) -> io::Result<()> {
    timed(out, "ode", |out| {
        let o = &cfg.ode;
        let items: Vec<(f64, f64)> = o.alphas.iter().flat_map(|&a| o.gammas.iter().map(move |&g| (a, g))).collect();
        let results = par_map(&items, |&(alpha, gamma)| -> crate::Result<_> {
            let grid = ScalarProblem::default_grid(alpha, o.t_end)?;
            sandwich_check(&ScalarProblem::new(alpha, o.nu, gamma, o.u0, grid)?)
        });
        for (&(alpha, gamma), res) in items.iter().zip(results) {
            let id = format!("a{}_g{}", num(alpha), num(gamma));
            match res {
                Ok((rep, rows)) => {
                    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
                    out.csv(&format!("ode_{id}"), &["t", "u", "v_sub", "w_super"], &rows)?;
                    out.dat(&format!("ode_{id}"), &[rows.iter().map(|r| (r[0], r[1])).collect()])?;
                    let v = rep.verdict;
                    out.record(Record::new("ode", "sandwich", id, Some(v), rep));
                }
                Err(e) => failed(out, "ode", "sandwich", &id, e),
            }
        }
        Ok(())
    })
}

/// phi_1 + 1.5 phi_2 + 0.3 phi_3: sign-changing data for the envelope runs.
pub fn envelope_datum(mesh: &Mesh1D) -> Vec<f64> {
    let (a, b, c) = (mesh.eigenvector(1), mesh.eigenvector(2), mesh.eigenvector(3));
    (0..mesh.m).map(|i| a[i] + 1.5 * b[i] + 0.3 * c[i]).collect()
}

pub fn pde(cfg: &RunConfig, out: &mut Output) -> io::Result<()> {
    timed(out, "pde", |out| {
        let p = &cfg.pde;
        let mesh = match Mesh1D::new(p.length, p.m) {
            Ok(m) => m,
            Err(e) => {
                failed(out, "pde", "mesh", "default", e);
                return Ok(());
            }
        };
        let scenarios = match Coefficient::scenarios(p.nu, p.length) {
            Ok(s) => s,
            Err(e) => {
                failed(out, "pde", "coefficients", "default", e);
                return Ok(());
            }
        };

        // envelope runs: every family against every coefficient, plus the first-mode equality case
        let mut items: Vec<(Family, usize, bool)> = Vec::new();
        for f in &p.families {
            for c in 0..scenarios.len() {
                items.push((f.clone(), c, false));
            }
            items.push((f.clone(), 0, true));
        }
        let datum = envelope_datum(&mesh);
        let results = par_map(&items, |(fam, c, first_mode)| -> crate::Result<_> {
            let pair = pair_of(fam)?;
            let grid = TimeGrid::graded(p.t_end, p.n, pair.default_grading())?;
            let coeff = &scenarios[*c];
            let u0 = if *first_mode { mesh.eigenvector(1) } else { datum.clone() };
            let run = linear::step_solve(&pair, &mesh, coeff, &u0, &grid)?;
            let mp = linear::max_principle_check(&run);
            Ok((linear::decay_check(&run, &pair, coeff)?, mp))
        });
        for ((fam, c, first_mode), res) in items.iter().zip(results) {
            let coeff = &scenarios[*c];
            let id = if *first_mode { format!("{}_first_mode", family_tag(fam)) } else { format!("{}_{}", family_tag(fam), coeff.label) };
            let check = if *first_mode { "equality_case" } else { "decay_envelope" };
            match res {
                Ok((rep, _)) => {
                    let rows: Vec<Vec<f64>> = (0..rep.times.len()).map(|i| vec![rep.times[i], rep.l2[i], rep.positive[i], rep.negative[i], rep.envelope[i] * rep.l2[0]]).collect();
                    out.csv(&format!("pde_{id}"), &["t", "l2_norm", "pos_part_norm", "neg_part_norm", "envelope"], &rows)?;
                    out.dat(&format!("pde_{id}"), &[rows.iter().map(|r| (r[0], r[1])).collect(), rows.iter().map(|r| (r[0], r[4])).collect()])?;
                    let verdict = if *first_mode {
                        let dev = (1..rep.times.len()).map(|i| (rep.l2[i] / (rep.envelope[i] * rep.l2[0]) - 1.0).abs()).fold(0.0, f64::max);
                        let report = json!({ "family": fam, "coefficient": coeff.label, "max_deviation": dev, "tolerance": EQUALITY_TOL });
                        out.record(Record::new("pde", check, id.clone(), Some(Verdict::from_bool(dev <= EQUALITY_TOL)), report));
                        None
                    } else {
                        Some(rep.verdict)
                    };
                    if let Some(v) = verdict {
                        let lp = json!({ "exponent": rep.lp_exponent, "max_ratio": rep.lp_max_ratio });
                        out.record(Record::new("pde", "lp_envelope", id.clone(), None, lp));
                        out.record(Record::new("pde", check, id, Some(v), rep));
                    }
                }
                Err(e) => failed(out, "pde", check, &id, e),
            }
        }

        // maximum principle for random bounded data
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let data: Vec<(usize, usize, Vec<f64>)> = (0..p.random_data)
            .map(|k| (k % p.families.len(), k % scenarios.len(), (0..mesh.m).map(|_| rng.gen_range(-1.0..1.0)).collect()))
            .collect();
        let results = par_map(&data, |(f, c, u0)| -> crate::Result<_> {
            let pair = pair_of(&p.families[*f])?;
            let grid = TimeGrid::graded(p.t_end, p.n, pair.default_grading())?;
            Ok(linear::max_principle_check(&linear::step_solve(&pair, &mesh, &scenarios[*c], u0, &grid)?))
        });
        let mut total = 0;
        let mut worst = 0.0f64;
        let mut errors = Vec::new();
        for r in results {
            match r {
                Ok(m) => {
                    total += m.violations;
                    worst = worst.max(m.max_excess);
                }
                Err(e) => errors.push(e.to_string()),
            }
        }
        let report = json!({ "trials": p.random_data, "violations": total, "max_excess": worst, "errors": errors });
        out.record(Record::new("pde", "maximum_principle", "random_data", Some(Verdict::from_bool(total == 0 && errors.is_empty())), report));

        // spectral oracle and convergence orders
        let results = par_map(&p.oracle_alphas, |&alpha| -> crate::Result<_> {
            let err = linear::oracle_error(alpha, p.oracle_m, p.oracle_n, 1.0)?;
            let temporal = linear::temporal_study(alpha, 15, 1.0, &p.temporal_levels)?;
            let spatial = linear::spatial_study(alpha, 50, 1.0, &p.spatial_levels)?;
            Ok((err, temporal, spatial))
        });
        for (&alpha, res) in p.oracle_alphas.iter().zip(results) {
            let id = format!("a{}", num(alpha));
            match res {
                Ok((err, temporal, spatial)) => {
                    out.record(Record::new("pde", "spectral_oracle", id.clone(), Some(Verdict::from_bool(err <= SPECTRAL_TOL)), json!({ "alpha": alpha, "relative_l2_error": err, "tolerance": SPECTRAL_TOL, "m": p.oracle_m, "n": p.oracle_n })));
                    let t_ok = temporal.min_order() >= MIN_TEMPORAL_ORDER;
                    out.record(Record::new("pde", "temporal_order", id.clone(), Some(Verdict::from_bool(t_ok)), json!({ "study": temporal, "minimum": MIN_TEMPORAL_ORDER })));
                    let s_ok = spatial.orders.iter().all(|o| (o - SPATIAL_ORDER).abs() <= SPATIAL_ORDER_BAND);
                    out.record(Record::new("pde", "spatial_order", id, Some(Verdict::from_bool(s_ok)), json!({ "study": spatial, "target": SPATIAL_ORDER, "band": SPATIAL_ORDER_BAND })));
                }
                Err(e) => failed(out, "pde", "spectral_oracle", &id, e),
            }
        }

        // late-time label of the first-mode run for each family
        let results = par_map(&p.sweep_families, |fam| -> crate::Result<_> {
            let pair = pair_of(fam)?;
            let m = Mesh1D::new(p.length, p.sweep_m)?;
            let coeff = Coefficient::constant(p.nu)?;
            let grid = asymptotics::default_grid(&pair, p.sweep_t_end)?;
            let run = linear::step_solve(&pair, &m, &coeff, &m.eigenvector(1), &grid)?;
            let mu = p.nu * m.eigenvalue(1);
            let n0 = m.l2(&run.fields[0]);
            let values = run.fields.iter().map(|f| m.l2(f) / n0).collect();
            let curve = RelaxationCurve { mu, grid: grid.clone(), values, method: RelaxMethod::History };
            let model = asymptotics::predict(&pair, mu)?;
            Ok(asymptotics::verify_asymptotics(&curve, model, model.default_window(p.sweep_t_end)))
        });
        for (fam, res) in p.sweep_families.iter().zip(results) {
            let id = family_tag(fam);
            match res {
                Ok(c) => {
                    let v = c.verdict;
                    out.record(Record::new("pde", "decay_label", id, Some(v), c));
                }
                Err(e) => failed(out, "pde", "decay_label", &id, e),
            }
        }
        Ok(())
    })
}

struct NonlinearSpec<'a> {
    command: &'a str,
    kinds: Vec<NonlinearKind>,
    alphas: &'a [f64],
    length: f64,
    m: usize,
    t_end: f64,
}

fn nonlinear_task(spec: NonlinearSpec, out: &mut Output) -> io::Result<()> {
    let items: Vec<(NonlinearKind, f64)> = spec.kinds.iter().flat_map(|&k| spec.alphas.iter().map(move |&a| (k, a))).collect();
    let window = (spec.t_end / 100.0, spec.t_end);
    let results = par_map(&items, |&(kind, alpha)| -> crate::Result<_> {
        let mesh = Mesh1D::new(spec.length, spec.m)?;
        let u0: Vec<f64> = mesh.nodes().iter().map(|x| (std::f64::consts::PI * x / spec.length).sin()).collect();
        let prob = NonlinearProblem::new(kind, alpha, mesh, u0, NonlinearProblem::default_grid(alpha, spec.t_end)?)?;
        let hist = prob.operator();
        let run = nonlinear::solve_nonlinear_with(&prob, &hist)?;
        let rep = nonlinear::exponent_report(&run, &prob, window);
        let sep = nonlinear::separable_check(&prob)?;
        let eps = match kind {
            NonlinearKind::PLaplace { .. } => nonlinear::epsilon_sensitivity(&prob, window)?,
            NonlinearKind::PorousMedium { .. } => None,
        };
        Ok((rep, sep, eps))
    });
    for (&(kind, alpha), res) in items.iter().zip(results) {
        let id = format!("{}_a{}", kind.label(), num(alpha));
        match res {
            Ok((rep, sep, eps)) => {
                let rows: Vec<Vec<f64>> = rep.times.iter().zip(&rep.norms).map(|(&t, &n)| vec![t, n, if t >= window.0 && t <= window.1 { 1.0 } else { 0.0 }]).collect();
                out.csv(&format!("{}_{id}", spec.command), &["t", "norm", "in_fit_window"], &rows)?;
                out.dat(&format!("{}_{id}", spec.command), &[rows.iter().map(|r| (r[0], r[1])).collect()])?;
                let v = rep.verdict;
                out.record(Record::new(spec.command, "decay_exponent", id.clone(), Some(v), rep));
                let v = sep.verdict;
                out.record(Record::new(spec.command, "separable_solution", id.clone(), Some(v), sep));
                if let Some(change) = eps {
                    out.record(Record::new(spec.command, "regularization_sensitivity", id, Some(Verdict::from_bool(change <= EPS_SENSITIVITY_TOL)), json!({ "relative_change": change, "tolerance": EPS_SENSITIVITY_TOL })));
                }
            }
            Err(e) => failed(out, spec.command, "decay_exponent", &id, e),
        }
    }
    Ok(())
}

pub fn plap(cfg: &RunConfig, out: &mut Output) -> io::Result<()> {
    let c = &cfg.plap;
    let spec = NonlinearSpec { command: "plap", kinds: c.ps.iter().map(|&p| NonlinearKind::PLaplace { p }).collect(), alphas: &c.alphas, length: c.length, m: c.m, t_end: c.t_end };
    timed(out, "plap", |out| nonlinear_task(spec, out))
}

pub fn pme(cfg: &RunConfig, out: &mut Output) -> io::Result<()> {
    let c = &cfg.pme;
    let spec = NonlinearSpec { command: "pme", kinds: c.ms.iter().map(|&m| NonlinearKind::PorousMedium { m }).collect(), alphas: &c.alphas, length: c.length, m: c.m, t_end: c.t_end };
    timed(out, "pme", |out| nonlinear_task(spec, out))
}

fn prediction(model: &AsymptoticModel, measured: f64, t: f64) -> f64 {
    match *model {
        AsymptoticModel::Algebraic { rate, prefactor } => prefactor * t.powf(-rate),
        AsymptoticModel::Logarithmic { mu } => 1.0 / (mu * t.ln()),
        AsymptoticModel::Exponential { rate } => (-rate * t).exp(),
        AsymptoticModel::Plateau { limit } => limit,
        AsymptoticModel::Reciprocal { mu } => measured / (mu * t),
    }
}

pub fn asympt(cfg: &RunConfig, out: &mut Output) -> io::Result<()> {
    timed(out, "asympt", |out| {
        let a = &cfg.asympt;
        let prepared = par_map(&a.families, |fam| -> crate::Result<_> {
            let pair = pair_of(fam)?;
            let model = asymptotics::predict(&pair, a.mu)?;
            let curve = solve_relaxation(&pair, a.mu, &asymptotics::default_grid(&pair, a.t_end)?)?;
            Ok((pair, model, curve))
        });
        let mut pairs = Vec::new();
        let mut models = Vec::new();
        let mut curves = Vec::new();
        for (fam, r) in a.families.iter().zip(prepared) {
            match r {
                Ok((p, m, c)) => {
                    pairs.push(p);
                    models.push(m);
                    curves.push(c);
                }
                Err(e) => failed(out, "asympt", "discrimination", &family_tag(fam), e),
            }
        }
        match asymptotics::sweep_curves(&pairs, &curves, &models, a.mu) {
            Ok(sweeps) => {
                for ((s, curve), pair) in sweeps.into_iter().zip(&curves).zip(&pairs) {
                    let id = family_tag(&pair.family);
                    let measured = s.checks[0].1.measured;
                    let rows: Vec<Vec<f64>> = curve
                        .t()
                        .iter()
                        .zip(&curve.values)
                        .skip(1)
                        .map(|(&t, &v)| {
                            let p = prediction(&s.predicted, measured, t);
                            vec![t, v, p, v / p]
                        })
                        .collect();
                    out.csv(&format!("asympt_{id}"), &["t", "s_mu", "prediction", "ratio"], &rows)?;
                    out.dat(&format!("asympt_{id}"), &[rows.iter().map(|r| (r[0], r[1])).collect()])?;
                    let v = s.verdict;
                    out.record(Record::new("asympt", "discrimination", id, Some(v), s));
                }
            }
            Err(e) => failed(out, "asympt", "discrimination", "sweep", e),
        }
        let sd = KernelPair::new(Family::SwitchedDistributed).expect("parameter-free family");
        match asymptotics::reciprocal_constants(&sd, &a.reciprocal_mus, a.t_end) {
            Ok(cs) => {
                let max = cs.iter().map(|c| c.c).fold(0.0, f64::max);
                let min = cs.iter().map(|c| c.c).fold(f64::INFINITY, f64::min);
                out.record(Record::new("asympt", "reciprocal_constant", "switched_distributed", None, json!({ "constants": cs, "uniform_c": max, "spread": max / min })));
            }
            Err(e) => failed(out, "asympt", "reciprocal_constant", "switched_distributed", e),
        }
        Ok(())
    })
}

pub fn verify_inequalities(cfg: &RunConfig, out: &mut Output) -> io::Result<()> {
    timed(out, "verify-inequalities", |out| {
        let q = &cfg.verify;
        match random_lp_trials(q.trials, cfg.seed) {
            Ok(s) => {
                let v = Verdict::from_bool(s.violations == 0);
                out.record(Record::new("verify-inequalities", "lp_gap", "random_trials", Some(v), s));
            }
            Err(e) => failed(out, "verify-inequalities", "lp_gap", "random_trials", e),
        }
        let items: Vec<(String, f64)> = q.maps.iter().flat_map(|m| q.identity_alphas.iter().map(move |&a| (m.clone(), a))).collect();
        let results = par_map(&items, |(name, alpha)| -> crate::Result<_> { identity_convergence(ConvexMap::from_name(name)?, *alpha, q.identity_n0) });
        let mut rows = Vec::new();
        for ((name, alpha), res) in items.iter().zip(results) {
            let id = format!("{name}_a{}", num(*alpha));
            match res {
                Ok((errs, orders)) => {
                    for (l, e) in errs.iter().enumerate() {
                        rows.push(vec![*alpha, (q.identity_n0 << l) as f64, *e]);
                    }
                    let ok = orders.iter().all(|&o| o >= MIN_IDENTITY_ORDER);
                    let report = json!({ "map": name, "alpha": alpha, "errors": errs, "orders": orders.iter().map(|o| if o.is_finite() { json!(o) } else { json!("exact") }).collect::<Vec<_>>(), "minimum": MIN_IDENTITY_ORDER });
                    out.record(Record::new("verify-inequalities", "identity_convergence", id, Some(Verdict::from_bool(ok)), report));
                }
                Err(e) => failed(out, "verify-inequalities", "identity_convergence", &id, e),
            }
        }
        out.csv("identity_convergence", &["alpha", "n", "max_residual"], &rows)?;
        Ok(())
    })
}

pub fn all(cfg: &RunConfig, out: &mut Output) -> io::Result<()> {
    relax(cfg, out)?;
    ml(cfg, out)?;
    verify_inequalities(cfg, out)?;
    ode(cfg, out)?;
    pde(cfg, out)?;
    plap(cfg, out)?;
    pme(cfg, out)?;
    asympt(cfg, out)
}

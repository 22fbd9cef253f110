//! Exit criteria. Each test prints one PASS/FAIL line and asserts it.

use nonlocal_decay::asymptotics::{self, AsymptoticModel};
use nonlocal_decay::calculus::{identity_convergence, random_lp_trials, ConvexMap};
use nonlocal_decay::cli::tasks::envelope_datum;
use nonlocal_decay::kernel::{default_grading, Family, KernelPair, TimeGrid};
use nonlocal_decay::linear::{self, Coefficient, Mesh1D};
use nonlocal_decay::nonlinear::{self, NonlinearKind, NonlinearProblem};
use nonlocal_decay::ode::{sandwich_check, ScalarProblem};
use nonlocal_decay::relaxation::{check_bounds, solve_relaxation};
use nonlocal_decay::report::Verdict;
use nonlocal_decay::special::{bounds_sweep, mittag_leffler_neg};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

const SEED: u64 = 20240601;

fn verdict(id: u32, name: &str, ok: bool, detail: String) {
    println!("criterion {id:>2} {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} {name} failed: {detail}");
}

#[test]
fn c01_relaxation_matches_mittag_leffler() {
    const TOL: f64 = 1e-4;
    const MAX_SECONDS: f64 = 10.0;
    let mut worst = 0.0f64;
    let mut slowest = 0.0f64;
    for alpha in [0.3, 0.5, 0.7] {
        let grid = TimeGrid::graded(50.0, 2000, default_grading(alpha)).unwrap();
        let pair = KernelPair::fractional(alpha).unwrap();
        for mu in [0.5, 1.0, 4.0] {
            let start = Instant::now();
            let curve = solve_relaxation(&pair, mu, &grid).unwrap();
            slowest = slowest.max(start.elapsed().as_secs_f64());
            for i in 1..grid.len() {
                let exact = mittag_leffler_neg(alpha, mu * grid.t(i).powf(alpha)).unwrap().value;
                worst = worst.max(((curve.values[i] - exact) / exact).abs());
            }
        }
    }
    verdict(1, "relaxation vs Mittag-Leffler", worst <= TOL && slowest <= MAX_SECONDS, format!("max rel err {worst:.2e} <= {TOL:e}, slowest curve {slowest:.2} s <= {MAX_SECONDS} s"));
}

#[test]
fn c02_mittag_leffler_bounds() {
    let rows = bounds_sweep(20, 20).unwrap();
    let outside = rows.iter().filter(|r| !r.inside).count();
    verdict(2, "Mittag-Leffler two-sided bounds", rows.len() == 400 && outside == 0, format!("{} pairs, {outside} violations", rows.len()));
}

#[test]
fn c03_relaxation_envelope_all_families() {
    const ABS_TOL: f64 = 1e-3;
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for pair in KernelPair::catalog() {
        let grid = TimeGrid::graded(50.0, 1000, pair.default_grading()).unwrap();
        for mu in [0.1, 1.0, 10.0] {
            let curve = solve_relaxation(&pair, mu, &grid).unwrap();
            let rep = check_bounds(&curve, &pair).unwrap();
            let allowed = ABS_TOL + rep.discretization_estimate;
            let excess = rep.max_lower_violation.max(rep.max_upper_violation);
            worst = worst.max(excess);
            if excess > allowed {
                failures.push(format!("{} mu={mu}: {excess:.2e} > {allowed:.2e}", pair.name()));
            }
        }
    }
    verdict(3, "relaxation two-sided envelope", failures.is_empty(), format!("6 families x 3 mu, worst excess {worst:.2e}; {failures:?}"));
}

#[test]
fn c04_lp_gap_and_identity_order() {
    const GAP_TOL: f64 = -1e-12;
    const MIN_ORDER: f64 = 1.0;
    let s = random_lp_trials(10_000, SEED).unwrap();
    let mut min_order = f64::INFINITY;
    for map in ["square", "power:3", "positive:0.1"] {
        for alpha in [0.3, 0.5, 0.7] {
            let (errs, orders) = identity_convergence(ConvexMap::from_name(map).unwrap(), alpha, 40).unwrap();
            assert_eq!(errs.len(), 3);
            for o in orders {
                min_order = min_order.min(o);
            }
        }
    }
    let ok = s.trials == 10_000 && s.min_gap >= GAP_TOL && s.violations == 0 && min_order >= MIN_ORDER;
    verdict(4, "Lp gap and identity convergence", ok, format!("min gap {:.2e} >= {GAP_TOL:e} over {} trials, min order {min_order:.3} >= {MIN_ORDER}", s.min_gap, s.trials));
}

fn envelope_families() -> Vec<KernelPair> {
    vec![
        KernelPair::fractional(0.5).unwrap(),
        KernelPair::new(Family::FractionalExp { alpha: 0.5, gamma: 1.0 }).unwrap(),
        KernelPair::new(Family::DistributedOrder).unwrap(),
    ]
}

#[test]
fn c05_linear_decay_envelope() {
    const SLACK: f64 = 0.05;
    const EQUALITY_TOL: f64 = 1e-3;
    let nu = 0.5;
    let mesh = Mesh1D::new(PI, 63).unwrap();
    let u0 = envelope_datum(&mesh);
    assert!(u0.iter().any(|&v| v < 0.0) && u0.iter().any(|&v| v > 0.0));
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut equality = 0.0f64;
    for pair in envelope_families() {
        let grid = TimeGrid::graded(10.0, 300, pair.default_grading()).unwrap();
        for coeff in Coefficient::scenarios(nu, PI).unwrap() {
            let run = linear::step_solve(&pair, &mesh, &coeff, &u0, &grid).unwrap();
            let rep = linear::decay_check(&run, &pair, &coeff).unwrap();
            worst = (worst.0.max(rep.max_ratio), worst.1.max(rep.max_ratio_positive), worst.2.max(rep.max_ratio_negative));
        }
        let coeff = Coefficient::constant(nu).unwrap();
        let phi = mesh.eigenvector(1);
        let run = linear::step_solve(&pair, &mesh, &coeff, &phi, &grid).unwrap();
        let rep = linear::decay_check(&run, &pair, &coeff).unwrap();
        for i in 1..rep.times.len() {
            equality = equality.max((rep.l2[i] / (rep.envelope[i] * rep.l2[0]) - 1.0).abs());
        }
    }
    let bound = 1.0 + SLACK;
    let ok = worst.0 <= bound && worst.1 <= bound && worst.2 <= bound && equality <= EQUALITY_TOL;
    verdict(5, "linear decay envelope", ok, format!("15 runs: max ratio {:.4}, positive {:.4}, negative {:.4} <= {bound}; equality deviation {equality:.2e} <= {EQUALITY_TOL:e}", worst.0, worst.1, worst.2));
}

#[test]
fn c06_maximum_principle() {
    let mesh = Mesh1D::new(PI, 63).unwrap();
    let scenarios = Coefficient::scenarios(0.5, PI).unwrap();
    let families = envelope_families();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = 0;
    let mut excess = 0.0f64;
    for k in 0..10 {
        let pair = &families[k % families.len()];
        let u0: Vec<f64> = (0..mesh.m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let grid = TimeGrid::graded(10.0, 300, pair.default_grading()).unwrap();
        let run = linear::step_solve(pair, &mesh, &scenarios[k % scenarios.len()], &u0, &grid).unwrap();
        let rep = linear::max_principle_check(&run);
        violations += rep.violations;
        excess = excess.max(rep.max_excess);
    }
    verdict(6, "maximum principle", violations == 0, format!("10 random data, {violations} violations, max excess {excess:.2e}"));
}

#[test]
fn c07_scalar_sandwich_and_exponent() {
    const BARRIER_TOL: f64 = 1e-3;
    const BAND: f64 = 0.10;
    let mut barrier_fail = Vec::new();
    let mut exponent_fail = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        for gamma in [0.5, 1.0, 2.0, 3.0] {
            let grid = ScalarProblem::default_grid(alpha, 1e4).unwrap();
            let (rep, _) = sandwich_check(&ScalarProblem::new(alpha, 1.0, gamma, 1.0, grid).unwrap()).unwrap();
            let allowed = BARRIER_TOL + rep.discretization_estimate;
            if rep.max_below_sub > allowed || rep.max_above_super > allowed {
                barrier_fail.push(format!("({alpha},{gamma})"));
            }
            assert_eq!(rep.fit_window, (1e2, 1e4));
            let predicted = -alpha / gamma;
            match rep.fitted_exponent {
                Some(f) if ((f - predicted) / predicted).abs() <= BAND => {}
                f => exponent_fail.push(format!("({alpha},{gamma}): {f:?} vs {predicted:.4}")),
            }
        }
    }
    let ok = barrier_fail.is_empty() && exponent_fail.is_empty();
    verdict(7, "scalar sandwich and exponent", ok, format!("barrier failures {barrier_fail:?}; exponent failures {exponent_fail:?}"));
}

#[test]
fn c08_nonlinear_exponents() {
    const BAND: f64 = 0.10;
    const MAX_RUN: Duration = Duration::from_secs(300);
    let mut kinds: Vec<NonlinearKind> = [1.5, 2.5, 3.0].iter().map(|&p| NonlinearKind::PLaplace { p }).collect();
    kinds.extend([0.5, 2.0, 3.0].iter().map(|&m| NonlinearKind::PorousMedium { m }));
    let mesh = Mesh1D::new(1.0, 31).unwrap();
    let u0: Vec<f64> = mesh.nodes().iter().map(|x| (PI * x).sin()).collect();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for kind in kinds {
        for alpha in [0.4, 0.6] {
            let start = Instant::now();
            let prob = NonlinearProblem::new(kind, alpha, mesh, u0.clone(), NonlinearProblem::default_grid(alpha, 1e4).unwrap()).unwrap();
            let run = nonlinear::solve_nonlinear(&prob).unwrap();
            let rep = nonlinear::exponent_report(&run, &prob, (1e2, 1e4));
            let elapsed = start.elapsed();
            let predicted = -alpha / kind.degree();
            let dev = rep.fitted_exponent.map_or(f64::INFINITY, |f| ((f - predicted) / predicted).abs());
            worst = worst.max(dev);
            let no_extinction = rep.norms.iter().all(|&n| n > 0.0);
            if dev > BAND || !no_extinction || elapsed > MAX_RUN {
                failures.push(format!("{} a={alpha}: dev {dev:.3}, positive {no_extinction}, {:.1} s", kind.label(), elapsed.as_secs_f64()));
            }
        }
    }
    verdict(8, "p-Laplace and porous-medium exponents", failures.is_empty(), format!("12 runs, worst relative deviation {worst:.3} <= {BAND}; {failures:?}"));
}

#[test]
fn c09_asymptotic_discrimination() {
    const RATE_FRACTION: f64 = 0.9;
    const PLATEAU_TOL: f64 = 1e-3;
    const SLOPE_BAND: f64 = 0.10;
    const LOG_BAND: (f64, f64) = (0.7, 1.3);
    let mu = 1.0;
    let sweeps = asymptotics::sweep(&KernelPair::catalog(), mu, 1e6).unwrap();
    let mut failures = Vec::new();
    for (s, pair) in sweeps.iter().zip(KernelPair::catalog()) {
        let own = &s.checks[0].1;
        let others_rejected = s.checks[1..].iter().all(|(_, c)| c.verdict != Verdict::Pass);
        let value_ok = match (&pair.family, own.model) {
            (_, AsymptoticModel::Algebraic { rate, .. }) => ((own.measured + rate) / rate).abs() <= SLOPE_BAND,
            (_, AsymptoticModel::Exponential { rate }) => own.measured >= RATE_FRACTION * rate,
            (Family::SwitchedExp { alpha, gamma }, AsymptoticModel::Plateau { .. }) => {
                let g = gamma.powf(1.0 - alpha);
                (own.measured - g / (mu + g)).abs() <= PLATEAU_TOL
            }
            (_, AsymptoticModel::Logarithmic { .. }) => (LOG_BAND.0..=LOG_BAND.1).contains(&own.measured),
            (_, AsymptoticModel::Reciprocal { .. }) => own.verdict == Verdict::Pass,
            _ => false,
        };
        if !(value_ok && own.verdict == Verdict::Pass && others_rejected && s.discriminates) {
            failures.push(format!("{}: measured {:.4}, own {:?}, others rejected {others_rejected}", s.family, own.measured, own.verdict));
        }
    }
    verdict(9, "asymptotic discrimination", failures.is_empty() && sweeps.len() == 6, format!("{} families; {failures:?}", sweeps.len()));
}

#[test]
fn c10_spectral_oracle_and_orders() {
    const ORACLE_TOL: f64 = 1e-3;
    const SPATIAL: f64 = 2.0;
    const SPATIAL_BAND: f64 = 0.1;
    const MIN_TEMPORAL: f64 = 1.5;
    let mut lines = Vec::new();
    let mut ok = true;
    for alpha in [0.3, 0.5] {
        let err = linear::oracle_error(alpha, 63, 400, 1.0).unwrap();
        let temporal = linear::temporal_study(alpha, 15, 1.0, &[100, 200, 400, 800]).unwrap();
        let spatial = linear::spatial_study(alpha, 50, 1.0, &[15, 31, 63, 127]).unwrap();
        let s_ok = spatial.orders.iter().all(|o| (o - SPATIAL).abs() <= SPATIAL_BAND);
        let t_ok = temporal.min_order() >= MIN_TEMPORAL;
        ok &= err <= ORACLE_TOL && s_ok && t_ok;
        lines.push(format!("a={alpha}: err {err:.2e}, spatial {:?}, temporal {:?}", spatial.orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>(), temporal.orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>()));
    }
    verdict(10, "spectral oracle and convergence orders", ok, format!("err <= {ORACLE_TOL:e}, |spatial - 2| <= {SPATIAL_BAND}, temporal >= {MIN_TEMPORAL}; {}", lines.join("; ")));
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    v.sort();
    v
}

#[test]
fn c11_end_to_end() {
    const MAX_WALL: Duration = Duration::from_secs(15 * 60);
    let runs: Vec<(tempfile::TempDir, i32, Duration)> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let start = Instant::now();
            let status = Command::new(env!("CARGO_BIN_EXE_nldecay"))
                .args(["all", "--jobs", "1", "--quiet", "--seed", &SEED.to_string(), "--out"])
                .arg(dir.path())
                .env_remove("NLD_SEED")
                .status()
                .unwrap();
            (dir, status.code().unwrap_or(-1), start.elapsed())
        })
        .collect();
    let (a, b) = (runs[0].0.path(), runs[1].0.path());
    let names = files(a);
    let mut differing = Vec::new();
    if names != files(b) {
        differing.push("file lists".to_string());
    }
    for n in names.iter().filter(|n| *n != "timing.jsonl") {
        if fs::read(a.join(n)).unwrap() != fs::read(b.join(n)).ok().unwrap_or_default() {
            differing.push(n.clone());
        }
    }
    let slowest = runs.iter().map(|r| r.2).max().unwrap();
    let codes: Vec<i32> = runs.iter().map(|r| r.1).collect();
    let ok = codes.iter().all(|&c| c == 0) && differing.is_empty() && slowest <= MAX_WALL && names.len() > 50;
    verdict(11, "end-to-end all", ok, format!("exit codes {codes:?}, {} files, differing {differing:?}, slowest {:.1} s <= {} s", names.len(), slowest.as_secs_f64(), MAX_WALL.as_secs()));
}

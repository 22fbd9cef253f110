//! Late-time behaviour of relaxation curves: predicted models, direct fits
//! and transform-side cross-checks.

use crate::error::{domain, Result};
use crate::kernel::{Family, KernelPair, TimeGrid};
use crate::relaxation::{limit_value, solve_relaxation, RelaxationCurve};
use crate::report::{fit_exponential, fit_power_law, Verdict};
use crate::special::{gamma, numerical_laplace, omega_root, TailModel};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum AsymptoticModel {
    /// s ~ prefactor t^{-rate}
    Algebraic { rate: f64, prefactor: f64 },
    /// mu s log t -> 1
    Logarithmic { mu: f64 },
    /// s <= M e^{-rate t}
    Exponential { rate: f64 },
    /// s -> limit > 0
    Plateau { limit: f64 },
    /// t mu s stays within a factor 2 of a fitted constant
    Reciprocal { mu: f64 },
}

impl AsymptoticModel {
    pub fn name(&self) -> &'static str {
        match self {
            AsymptoticModel::Algebraic { .. } => "algebraic",
            AsymptoticModel::Logarithmic { .. } => "logarithmic",
            AsymptoticModel::Exponential { .. } => "exponential",
            AsymptoticModel::Plateau { .. } => "plateau",
            AsymptoticModel::Reciprocal { .. } => "reciprocal",
        }
    }

    /// Fitting window for a curve computed up to t_end.
    pub fn default_window(&self, t_end: f64) -> (f64, f64) {
        match *self {
            AsymptoticModel::Exponential { rate } => (2.0 / rate, 15.0 / rate),
            _ => (t_end * 1e-2, t_end),
        }
    }
}

pub fn predict(pair: &KernelPair, mu: f64) -> Result<AsymptoticModel> {
    if !(mu > 0.0) || !mu.is_finite() {
        return domain(format!("mu = {mu} must be positive"));
    }
    Ok(match &pair.family {
        Family::Fractional { alpha } => AsymptoticModel::Algebraic { rate: *alpha, prefactor: 1.0 / (mu * gamma(1.0 - alpha)) },
        Family::SumFractional { terms } => {
            let (d, a) = terms.iter().copied().fold((0.0, f64::INFINITY), |acc, (d, a)| if a < acc.1 { (d, a) } else { acc });
            AsymptoticModel::Algebraic { rate: a, prefactor: 1.0 / (d * mu * gamma(1.0 - a)) }
        }
        Family::FractionalExp { alpha, gamma } => AsymptoticModel::Exponential { rate: omega_root(*alpha, *gamma, mu)? },
        Family::SwitchedExp { .. } => AsymptoticModel::Plateau { limit: limit_value(pair, mu)?.value() },
        Family::DistributedOrder => AsymptoticModel::Logarithmic { mu },
        Family::SwitchedDistributed => AsymptoticModel::Reciprocal { mu },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticCheck {
    pub model: AsymptoticModel,
    pub window: (f64, f64),
    pub points: usize,
    /// fitted log-log slope, fitted rate, end value, or fitted constant
    pub measured: f64,
    /// ratio to the prediction at the window end where defined
    pub ratio: Option<f64>,
    pub verdict: Verdict,
}

pub const SLOPE_BAND: f64 = 0.10;
pub const RATIO_BAND: (f64, f64) = (0.5, 2.0);
pub const LOG_BAND: (f64, f64) = (0.7, 1.3);
pub const RATE_FRACTION: f64 = 0.9;
pub const PLATEAU_TOL: f64 = 1e-3;
/// values below this are not resolved by the solvers
pub const RESOLUTION_FLOOR: f64 = 1e-9;
const MIN_POINTS: usize = 5;

fn value_at(curve: &RelaxationCurve, t: f64) -> f64 {
    let ts = curve.t();
    let i = ts.partition_point(|&x| x <= t).min(ts.len() - 1).max(1);
    let (t0, t1) = (ts[i - 1], ts[i]);
    let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
    curve.values[i - 1] * (1.0 - w) + curve.values[i] * w
}

pub fn verify_asymptotics(curve: &RelaxationCurve, model: AsymptoticModel, window: (f64, f64)) -> AsymptoticCheck {
    let ts = curve.t();
    let (lo, hi) = window;
    let in_window: Vec<usize> = (0..ts.len()).filter(|&i| ts[i] >= lo && ts[i] <= hi && curve.values[i] > RESOLUTION_FLOOR).collect();
    let points = in_window.len();
    let inconclusive = |measured: f64| AsymptoticCheck { model, window, points, measured, ratio: None, verdict: Verdict::Inconclusive };
    if points < MIN_POINTS || hi > *ts.last().unwrap() * (1.0 + 1e-12) || !(lo < hi) {
        return inconclusive(f64::NAN);
    }
    let t_end = ts[*in_window.last().unwrap()];
    let s_end = value_at(curve, t_end);
    let within = |x: f64, b: (f64, f64)| x >= b.0 && x <= b.1;
    match model {
        AsymptoticModel::Algebraic { rate, prefactor } => {
            let Some(fit) = fit_power_law(ts, &curve.values, lo, hi) else { return inconclusive(f64::NAN) };
            let ratio = s_end / (prefactor * t_end.powf(-rate));
            let ok = (fit.slope + rate).abs() <= SLOPE_BAND * rate && within(ratio, RATIO_BAND);
            AsymptoticCheck { model, window, points, measured: fit.slope, ratio: Some(ratio), verdict: Verdict::from_bool(ok) }
        }
        AsymptoticModel::Logarithmic { mu } => {
            let v = mu * s_end * t_end.ln();
            AsymptoticCheck { model, window, points, measured: v, ratio: Some(v), verdict: Verdict::from_bool(within(v, LOG_BAND)) }
        }
        AsymptoticModel::Exponential { rate } => {
            let Some(fit) = fit_exponential(ts, &curve.values, lo, hi.min(t_end)) else { return inconclusive(f64::NAN) };
            let measured = -fit.slope;
            AsymptoticCheck { model, window, points, measured, ratio: Some(measured / rate), verdict: Verdict::from_bool(measured >= RATE_FRACTION * rate) }
        }
        AsymptoticModel::Plateau { limit } => {
            let last = *curve.values.last().unwrap();
            let ok = (last - limit).abs() <= PLATEAU_TOL;
            AsymptoticCheck { model, window, points, measured: last, ratio: Some(last / limit), verdict: Verdict::from_bool(ok) }
        }
        AsymptoticModel::Reciprocal { mu } => {
            let prod: Vec<f64> = in_window.iter().map(|&i| ts[i] * mu * curve.values[i]).collect();
            let c = (prod.iter().map(|v| v.ln()).sum::<f64>() / prod.len() as f64).exp();
            let ok = prod.iter().all(|v| within(v / c, RATIO_BAND));
            let spread = prod.iter().copied().fold(0.0, f64::max) / prod.iter().copied().fold(f64::INFINITY, f64::min);
            AsymptoticCheck { model, window, points, measured: c, ratio: Some(spread), verdict: Verdict::from_bool(ok) }
        }
    }
}

/// Graded on [0, 1], then geometric with the given ratio.
pub fn default_grid(pair: &KernelPair, t_end: f64) -> Result<TimeGrid> {
    TimeGrid::composite(1.0, 200, pair.default_grading(), 1.02, t_end)
}

pub const DEFAULT_T_END: f64 = 1e6;

#[derive(Debug, Clone, Serialize)]
pub struct TransformPoint {
    pub z: f64,
    pub numerical: f64,
    pub closed_form: f64,
    pub relative_error: f64,
    pub tail_warning: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformCheck {
    pub family: String,
    pub mu: f64,
    pub points: Vec<TransformPoint>,
    pub tolerance: f64,
    pub verdict: Verdict,
}

pub const TRANSFORM_TOL: f64 = 0.05;
pub const TRANSFORM_POINTS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Transform of the sampled curve against 1/(z + mu z l^(z)).
pub fn tauberian_cross_check(curve: &RelaxationCurve, pair: &KernelPair, mu: f64) -> Result<TransformCheck> {
    let tail = match pair.family {
        Family::FractionalExp { .. } => TailModel::Exponential,
        _ => TailModel::Algebraic,
    };
    let mut points = Vec::new();
    let mut verdict = Verdict::Pass;
    for &z in &TRANSFORM_POINTS {
        let est = numerical_laplace(curve.t(), &curve.values, z, tail)?;
        let exact = pair.laplace_relaxation(z, mu)?;
        let rel = (est.value - exact).abs() / exact.abs();
        let v = if est.tail_warning { Verdict::Inconclusive } else { Verdict::from_bool(rel <= TRANSFORM_TOL) };
        verdict = verdict.combine(v);
        points.push(TransformPoint { z, numerical: est.value, closed_form: exact, relative_error: rel, tail_warning: est.tail_warning });
    }
    Ok(TransformCheck { family: pair.name().into(), mu, points, tolerance: TRANSFORM_TOL, verdict })
}

/// First node after which bound(t) >= s(t) holds at every later node.
pub fn envelope_threshold(curve: &RelaxationCurve, bound: impl Fn(f64) -> f64) -> Option<f64> {
    let ts = curve.t();
    let mut start = None;
    for i in (1..ts.len()).rev() {
        if curve.values[i] <= bound(ts[i]) {
            start = Some(ts[i]);
        } else {
            break;
        }
    }
    start
}

/// Explicit late-time envelopes for the lowest-order algebraic and logarithmic families.
pub fn explicit_envelope(pair: &KernelPair, mu: f64) -> Option<Box<dyn Fn(f64) -> f64>> {
    match &pair.family {
        Family::Fractional { alpha } => {
            let c = mu / (2.0 * gamma(1.0 + alpha));
            let a = *alpha;
            Some(Box::new(move |t: f64| 1.0 / (1.0 + c * t.powf(a))))
        }
        Family::SumFractional { terms } => {
            let (d, a) = terms.iter().copied().fold((0.0, f64::INFINITY), |acc, (d, a)| if a < acc.1 { (d, a) } else { acc });
            let c = mu / (2.0 * d * gamma(1.0 + a));
            Some(Box::new(move |t: f64| 1.0 / (1.0 + c * t.powf(a))))
        }
        Family::DistributedOrder => Some(Box::new(move |t: f64| if t > 1.0 { 1.0 / (1.0 + 0.5 * mu * t.ln()) } else { 1.0 })),
        _ => None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilySweep {
    pub family: String,
    pub mu: f64,
    pub predicted: AsymptoticModel,
    /// own model first, then every other family's model
    pub checks: Vec<(String, AsymptoticCheck)>,
    pub transform: TransformCheck,
    pub envelope_threshold: Option<f64>,
    /// passes its own model and no other
    pub discriminates: bool,
    pub verdict: Verdict,
}

/// Solve each family to t_end and check it against every family's predicted model.
pub fn sweep(pairs: &[KernelPair], mu: f64, t_end: f64) -> Result<Vec<FamilySweep>> {
    let models: Vec<AsymptoticModel> = pairs.iter().map(|p| predict(p, mu)).collect::<Result<_>>()?;
    let curves: Vec<RelaxationCurve> = pairs.iter().map(|p| solve_relaxation(p, mu, &default_grid(p, t_end)?)).collect::<Result<_>>()?;
    sweep_curves(pairs, &curves, &models, mu)
}

pub fn sweep_curves(pairs: &[KernelPair], curves: &[RelaxationCurve], models: &[AsymptoticModel], mu: f64) -> Result<Vec<FamilySweep>> {
    let mut out = Vec::new();
    for (i, (pair, curve)) in pairs.iter().zip(curves).enumerate() {
        let t_end = *curve.t().last().unwrap();
        let mut checks = Vec::new();
        let own = verify_asymptotics(curve, models[i], models[i].default_window(t_end));
        let own_pass = own.verdict == Verdict::Pass;
        checks.push((pairs[i].name().to_string(), own));
        let mut others_pass = false;
        for (j, m) in models.iter().enumerate() {
            if j == i || m.name() == models[i].name() && m == &models[i] {
                continue;
            }
            let c = verify_asymptotics(curve, *m, m.default_window(t_end));
            others_pass |= c.verdict == Verdict::Pass;
            checks.push((pairs[j].name().to_string(), c));
        }
        let transform = tauberian_cross_check(curve, pair, mu)?;
        let threshold = explicit_envelope(pair, mu).and_then(|f| envelope_threshold(curve, f));
        let discriminates = own_pass && !others_pass;
        let verdict = Verdict::from_bool(discriminates).combine(transform.verdict);
        out.push(FamilySweep { family: pair.name().into(), mu, predicted: models[i], checks, transform, envelope_threshold: threshold, discriminates, verdict });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ReciprocalConstant {
    pub mu: f64,
    /// max over nodes of s (1 + mu t)
    pub c: f64,
}

/// Smallest c with s_mu(t) <= c / (1 + mu t) on the grid, per mu.
pub fn reciprocal_constants(pair: &KernelPair, mus: &[f64], t_end: f64) -> Result<Vec<ReciprocalConstant>> {
    let grid = default_grid(pair, t_end)?;
    mus.iter()
        .map(|&mu| {
            let curve = solve_relaxation(pair, mu, &grid)?;
            let c = curve.t().iter().zip(&curve.values).map(|(t, s)| s * (1.0 + mu * t)).fold(0.0, f64::max);
            Ok(ReciprocalConstant { mu, c })
        })
        .collect()
}

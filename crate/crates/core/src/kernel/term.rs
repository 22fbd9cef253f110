//! Scalar kernels as sums of elementary terms, with interval moments.

use crate::error::{domain, Result};
use crate::quadrature::gl;
use crate::special::{exp_e1, gamma_p, rgamma};
use crate::special::gamma::EULER_GAMMA;
use std::sync::OnceLock;

/// The standard kernel g_beta(t) = t^{beta-1}/Gamma(beta).
pub fn eval_g(beta: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("g_beta needs t > 0, got {t}"));
    }
    if !(beta > 0.0) {
        return domain(format!("g_beta needs beta > 0, got {beta}"));
    }
    Ok(g(beta, t))
}

#[inline]
pub(crate) fn g(beta: f64, t: f64) -> f64 {
    if beta == 1.0 {
        1.0
    } else {
        t.powf(beta - 1.0) * rgamma(beta)
    }
}

/// One elementary piece of a kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// c g_beta(t)
    Power { c: f64, beta: f64, scale: f64 },
    /// c g_beta(t) e^{-rate t}
    DampedPower { c: f64, beta: f64, rate: f64, scale: f64 },
    /// c (1 * [g_beta e^{-rate .}])(t) = c rate^{-beta} P(beta, rate t)
    DampedPrimitive { c: f64, beta: f64, rate: f64 },
    /// int_0^1 g_beta(t) d beta
    OrderIntegral,
    /// e^t E1(t) = int_0^inf e^{-st}/(1+s) ds
    ExpE1,
}

impl Term {
    pub fn power(c: f64, beta: f64) -> Self {
        Term::Power { c, beta, scale: c * rgamma(beta) }
    }

    pub fn damped(c: f64, beta: f64, rate: f64) -> Self {
        Term::DampedPower { c, beta, rate, scale: c * rgamma(beta) }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Term::Power { beta, scale, .. } => {
                if beta == 1.0 {
                    scale
                } else {
                    scale * t.powf(beta - 1.0)
                }
            }
            Term::DampedPower { beta, rate, scale, .. } => scale * t.powf(beta - 1.0) * (-rate * t).exp(),
            Term::DampedPrimitive { c, beta, rate } => c * rate.powf(-beta) * gamma_p(beta, rate * t),
            Term::OrderIntegral => order_integral(t, |b, lt| (lt * (b - 1.0)).exp() * rgamma(b)),
            Term::ExpE1 => {
                if t > 0.0 {
                    exp_e1(t)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Largest h for which `head` is valid.
    fn head_limit(&self) -> f64 {
        match self {
            Term::ExpE1 => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// (int_0^h K, int_0^h s K(s) ds).
    fn head(&self, h: f64) -> (f64, f64) {
        match *self {
            Term::Power { c, beta, .. } => {
                (c * h.powf(beta) * rgamma(beta + 1.0), c * beta * h.powf(beta + 1.0) * rgamma(beta + 2.0))
            }
            Term::DampedPower { c, beta, rate, .. } => {
                if rate == 0.0 {
                    return Term::power(c, beta).head(h);
                }
                let m0 = c * rate.powf(-beta) * gamma_p(beta, rate * h);
                let m1 = c * beta * rate.powf(-beta - 1.0) * gamma_p(beta + 1.0, rate * h);
                (m0, m1)
            }
            Term::DampedPrimitive { c, beta, rate } => {
                let x = rate * h;
                let f = c * rate.powf(-beta) * gamma_p(beta, x);
                let m0 = h * f - c * beta * rate.powf(-beta - 1.0) * gamma_p(beta + 1.0, x);
                let m1 = 0.5 * h * h * f
                    - 0.5 * c * beta * (beta + 1.0) * rate.powf(-beta - 2.0) * gamma_p(beta + 2.0, x);
                (m0, m1)
            }
            Term::OrderIntegral => {
                let m0 = order_integral(h, |b, lh| (lh * b).exp() * rgamma(b + 1.0));
                let m1 = order_integral(h, |b, lh| b * (lh * (b + 1.0)).exp() * rgamma(b + 2.0));
                (m0, m1)
            }
            Term::ExpE1 => exp_e1_head(h),
        }
    }

    /// (int_a^b K, int_a^b K(s)(s - a) ds) for 0 <= a < b.
    pub fn moments(&self, a: f64, b: f64) -> (f64, f64) {
        if a == 0.0 {
            let lim = self.head_limit();
            if b <= lim {
                return self.head(b);
            }
            let (h0, h1) = self.head(lim);
            let (t0, t1) = self.smooth_moments(lim, b, 0.0);
            return (h0 + t0, h1 + t1);
        }
        self.smooth_moments(a, b, a)
    }

    /// Gauss-Legendre on panels [c, d] with d - c <= c/2, weight (s - shift).
    fn smooth_moments(&self, a: f64, b: f64, shift: f64) -> (f64, f64) {
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        let mut c = a;
        while c < b {
            let d = if b <= 1.5 * c { b } else { 1.5 * c };
            let ratio = (d - c) / c;
            let rule = if ratio <= 0.05 {
                gl(4)
            } else if ratio <= 0.25 {
                gl(6)
            } else {
                gl(8)
            };
            let mid = 0.5 * (c + d);
            let half = 0.5 * (d - c);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let s = mid + half * x;
                let k = self.eval(s);
                m0 += w * half * k;
                m1 += w * half * k * (s - shift);
            }
            c = d;
        }
        (m0, m1)
    }
}

struct BetaRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn beta_rule(panels: usize) -> &'static BetaRule {
    static RULES: OnceLock<Vec<BetaRule>> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        (1..=64)
            .map(|p| {
                let r = gl(16);
                let mut nodes = Vec::with_capacity(16 * p);
                let mut weights = Vec::with_capacity(16 * p);
                let w = 1.0 / p as f64;
                for i in 0..p {
                    let c = (i as f64 + 0.5) * w;
                    for (x, wt) in r.nodes.iter().zip(&r.weights) {
                        nodes.push(c + 0.5 * w * x);
                        weights.push(0.5 * w * wt);
                    }
                }
                BetaRule { nodes, weights }
            })
            .collect()
    });
    &rules[panels.clamp(1, 64) - 1]
}

/// int_0^1 f(beta, ln t) d beta with panels sized to the exponential rate ln t.
fn order_integral<F: Fn(f64, f64) -> f64>(t: f64, f: F) -> f64 {
    let lt = t.ln();
    let panels = ((lt.abs() / 8.0).ceil() as usize).max(1);
    let rule = beta_rule(panels);
    rule.nodes.iter().zip(&rule.weights).map(|(&b, &w)| w * f(b, lt)).sum()
}

fn exp_e1_head(h: f64) -> (f64, f64) {
    // e^s E1(s) = e^s A(s) - e^s ln s with A(s) = -gamma_E + sum (-1)^{k+1} s^k/(k k!)
    let a_fn = |s: f64| {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..40 {
            let kf = k as f64;
            term *= -s / kf;
            sum -= term / kf;
            if term.abs() < 1e-18 {
                break;
            }
        }
        s.exp() * (-EULER_GAMMA + sum)
    };
    let rule = gl(16);
    let (mut s0, mut s1) = (0.0, 0.0);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let s = 0.5 * h * (1.0 + x);
        let v = a_fn(s);
        s0 += 0.5 * h * w * v;
        s1 += 0.5 * h * w * v * s;
    }
    // - int_0^h s^j e^s ln s ds = - sum_m 1/m! int_0^h s^{m+j} ln s ds
    let lh = h.ln();
    let log_moment = |j: usize| {
        let mut total = 0.0;
        let mut fact = 1.0;
        for m in 0..60 {
            if m > 0 {
                fact *= m as f64;
            }
            let n1 = (m + j + 1) as f64;
            let piece = h.powf(n1) * (lh / n1 - 1.0 / (n1 * n1)) / fact;
            total += piece;
            if piece.abs() < 1e-18 * total.abs().max(1e-300) && m > 3 {
                break;
            }
        }
        -total
    };
    (s0 + log_moment(0), s1 + log_moment(1))
}

/// A scalar kernel on (0, inf).
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    Terms(Vec<Term>),
    /// Piecewise-linear interpolant of samples; value[0] is the value at t = 0.
    Sampled { nodes: Vec<f64>, values: Vec<f64> },
}

impl Kernel {
    pub fn sampled(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 || nodes[0] != 0.0 {
            return domain("sampled kernel needs matching nodes from 0 and values");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("sampled kernel values must be finite");
        }
        Ok(Kernel::Sampled { nodes, values })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Kernel::Terms(ts) => ts.iter().map(|x| x.eval(t)).sum(),
            Kernel::Sampled { nodes, values } => interp(nodes, values, t),
        }
    }

    /// (int_a^b K, int_a^b K(s)(s - a) ds) for 0 <= a < b.
    pub fn moments(&self, a: f64, b: f64) -> (f64, f64) {
        match self {
            Kernel::Terms(ts) => ts.iter().fold((0.0, 0.0), |acc, x| {
                let m = x.moments(a, b);
                (acc.0 + m.0, acc.1 + m.1)
            }),
            Kernel::Sampled { nodes, values } => sampled_moments(nodes, values, a, b),
        }
    }

    /// (1 * K)(t).
    pub fn primitive(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.moments(0.0, t).0
        }
    }
}

fn interp(nodes: &[f64], values: &[f64], t: f64) -> f64 {
    let n = nodes.len();
    if t >= nodes[n - 1] {
        return values[n - 1];
    }
    if t <= 0.0 {
        return values[0];
    }
    let i = nodes.partition_point(|&x| x <= t);
    let (x0, x1) = (nodes[i - 1], nodes[i]);
    let th = (t - x0) / (x1 - x0);
    values[i - 1] * (1.0 - th) + values[i] * th
}

fn sampled_moments(nodes: &[f64], values: &[f64], a: f64, b: f64) -> (f64, f64) {
    let mut m0 = 0.0;
    let mut m1 = 0.0;
    let mut x0 = a;
    let mut f0 = interp(nodes, values, a);
    let mut i = nodes.partition_point(|&x| x <= a);
    loop {
        let x1 = if i < nodes.len() { nodes[i].min(b) } else { b };
        let f1 = interp(nodes, values, x1);
        let l = x1 - x0;
        if l > 0.0 {
            let i0 = 0.5 * l * (f0 + f1);
            let is = l * (f0 * (2.0 * x0 + x1) + f1 * (x0 + 2.0 * x1)) / 6.0;
            m0 += i0;
            m1 += is - a * i0;
        }
        if x1 >= b {
            break;
        }
        x0 = x1;
        f0 = f1;
        i += 1;
    }
    (m0, m1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive;

    fn check_moments(term: &Term, a: f64, b: f64, tol: f64) {
        let (m0, m1) = term.moments(a, b);
        // oracle: adaptive quadrature with the algebraic singularity split off
        let r0 = adaptive(|s| term.eval(s), a, b, 1e-13, 1e-16).value;
        let r1 = adaptive(|s| term.eval(s) * (s - a), a, b, 1e-13, 1e-16).value;
        assert!((m0 - r0).abs() <= tol * r0.abs(), "{term:?} [{a},{b}] m0 {m0} vs {r0}");
        assert!((m1 - r1).abs() <= tol * r1.abs(), "{term:?} [{a},{b}] m1 {m1} vs {r1}");
    }

    #[test]
    fn g_values() {
        assert_eq!(eval_g(1.0, 3.7).unwrap(), 1.0);
        assert!((eval_g(0.5, 1.0).unwrap() - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert!((eval_g(2.0, 3.0).unwrap() - 3.0).abs() < 1e-14);
        assert!(eval_g(0.5, 0.0).is_err());
        assert!(eval_g(-0.5, 1.0).is_err());
    }

    #[test]
    fn moments_match_adaptive_quadrature() {
        let terms = [
            Term::power(1.0, 0.5),
            Term::power(2.0, 0.3),
            Term::damped(1.0, 0.5, 1.0),
            Term::DampedPrimitive { c: 1.0, beta: 0.5, rate: 1.0 },
            Term::OrderIntegral,
            Term::ExpE1,
        ];
        for t in &terms {
            for &(a, b) in &[(0.3, 0.5), (1.0, 3.0), (2.0, 2.01), (0.01, 40.0)] {
                check_moments(t, a, b, 1e-11);
            }
        }
    }

    #[test]
    fn head_moments_exact_for_power() {
        let t = Term::power(1.0, 0.5);
        let (m0, m1) = t.moments(0.0, 1.0);
        // int_0^1 g_{1/2} = g_{3/2}(1), int_0^1 s g_{1/2} = (1/2) g_{5/2}(1)
        assert!((m0 - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-14);
        assert!((m1 - 0.5 * 0.752_252_778_063_675_1).abs() < 1e-14);
    }

    #[test]
    fn head_moments_of_log_singular_and_order_kernels() {
        // split at 0.5 so both halves are handled by different code paths
        for term in [Term::ExpE1, Term::OrderIntegral, Term::damped(1.0, 0.3, 2.0)] {
            for &h in &[0.01, 0.7, 1.0, 5.0] {
                let (a0, a1) = term.moments(0.0, h);
                let (b0, b1) = term.moments(0.0, 0.5 * h);
                let (c0, c1) = term.moments(0.5 * h, h);
                assert!((a0 - b0 - c0).abs() < 1e-12 * a0, "{term:?} h={h}");
                // shift the second moment of the tail back to the origin
                let c1o = c1 + 0.5 * h * c0;
                assert!((a1 - b1 - c1o).abs() < 1e-12 * a1, "{term:?} h={h}");
            }
        }
    }

    #[test]
    fn order_integral_is_normalized() {
        // int_0^1 g_beta(1) d beta = int_0^1 1/Gamma(beta) d beta
        let v = Term::OrderIntegral.eval(1.0);
        let r = adaptive(rgamma, 0.0, 1.0, 1e-14, 0.0).value;
        assert!((v - r).abs() < 1e-13);
    }

    #[test]
    fn sampled_moments_are_exact_on_pieces() {
        let k = Kernel::sampled(vec![0.0, 1.0, 2.0, 4.0], vec![3.0, 2.0, 1.0, 0.0]).unwrap();
        let (m0, m1) = k.moments(0.5, 3.0);
        let r0 = adaptive(|s| k.eval(s), 0.5, 3.0, 1e-14, 0.0).value;
        let r1 = adaptive(|s| k.eval(s) * (s - 0.5), 0.5, 3.0, 1e-14, 0.0).value;
        assert!((m0 - r0).abs() < 1e-12 && (m1 - r1).abs() < 1e-12);
    }
}

use super::term::{Kernel, Term};
use crate::error::{domain, Result};
use crate::special::{talbot, TALBOT_TERMS};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The six kernel families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// k = g_{1-alpha}, l = g_alpha
    Fractional { alpha: f64 },
    /// k = g_{1-alpha} e^{-gamma t}
    FractionalExp { alpha: f64, gamma: f64 },
    /// k = sum delta_j g_{1-alpha_j}, terms as (delta_j, alpha_j)
    SumFractional { terms: Vec<(f64, f64)> },
    /// k = int_0^1 g_beta d beta
    DistributedOrder,
    /// roles of the distributed-order pair exchanged
    SwitchedDistributed,
    /// roles of the tempered pair exchanged
    SwitchedExp { alpha: f64, gamma: f64 },
}

/// A kernel pair (k, l) with k nonnegative nonincreasing and k * l = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelPair {
    pub family: Family,
}

fn check_alpha(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        domain(format!("alpha = {a} outside (0, 1)"))
    }
}

impl KernelPair {
    /// One representative of each family.
    pub fn catalog() -> Vec<KernelPair> {
        vec![
            KernelPair { family: Family::Fractional { alpha: 0.5 } },
            KernelPair { family: Family::FractionalExp { alpha: 0.5, gamma: 1.0 } },
            KernelPair { family: Family::SumFractional { terms: vec![(1.0, 0.3), (1.0, 0.7)] } },
            KernelPair { family: Family::DistributedOrder },
            KernelPair { family: Family::SwitchedDistributed },
            KernelPair { family: Family::SwitchedExp { alpha: 0.5, gamma: 4.0 } },
        ]
    }

    pub fn new(family: Family) -> Result<Self> {
        match &family {
            Family::Fractional { alpha } => check_alpha(*alpha)?,
            Family::FractionalExp { alpha, gamma } | Family::SwitchedExp { alpha, gamma } => {
                check_alpha(*alpha)?;
                if !(*gamma > 0.0) {
                    return domain(format!("gamma = {gamma} must be positive"));
                }
            }
            Family::SumFractional { terms } => {
                if terms.is_empty() {
                    return domain("sum of fractional kernels needs at least one term");
                }
                for (d, a) in terms {
                    check_alpha(*a)?;
                    if !(*d > 0.0) {
                        return domain(format!("weight {d} must be positive"));
                    }
                }
                if terms.windows(2).any(|w| !(w[0].1 < w[1].1)) {
                    return domain("orders must be strictly increasing");
                }
            }
            Family::DistributedOrder | Family::SwitchedDistributed => {}
        }
        Ok(Self { family })
    }

    pub fn fractional(alpha: f64) -> Result<Self> {
        Self::new(Family::Fractional { alpha })
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Fractional { .. } => "fractional",
            Family::FractionalExp { .. } => "fractional_exp",
            Family::SumFractional { .. } => "sum_fractional",
            Family::DistributedOrder => "distributed_order",
            Family::SwitchedDistributed => "switched_distributed",
            Family::SwitchedExp { .. } => "switched_exp",
        }
    }

    /// Order driving the initial singularity, used for grid grading.
    pub fn leading_order(&self) -> Option<f64> {
        match &self.family {
            Family::Fractional { alpha } | Family::FractionalExp { alpha, .. } => Some(*alpha),
            Family::SwitchedExp { alpha, .. } => Some(1.0 - *alpha),
            Family::SumFractional { terms } => Some(terms.last().unwrap().1),
            _ => None,
        }
    }

    /// Default grid grading: 2/alpha for fractional-type kernels, 2 otherwise.
    pub fn default_grading(&self) -> f64 {
        match self.leading_order() {
            Some(a) => (2.0 / a).max(1.0),
            None => 2.0,
        }
    }

    pub fn k(&self) -> Kernel {
        Kernel::Terms(match &self.family {
            Family::Fractional { alpha } => vec![Term::power(1.0, 1.0 - alpha)],
            Family::FractionalExp { alpha, gamma } => vec![Term::damped(1.0, 1.0 - alpha, *gamma)],
            Family::SwitchedExp { alpha, gamma } => tempered_partner(*alpha, *gamma),
            Family::SumFractional { terms } => terms.iter().map(|(d, a)| Term::power(*d, 1.0 - a)).collect(),
            Family::DistributedOrder => vec![Term::OrderIntegral],
            Family::SwitchedDistributed => vec![Term::ExpE1],
        })
    }

    /// l as an explicit kernel, when one is available in the time domain.
    pub fn l(&self) -> Option<Kernel> {
        Some(Kernel::Terms(match &self.family {
            Family::Fractional { alpha } => vec![Term::power(1.0, *alpha)],
            Family::FractionalExp { alpha, gamma } => tempered_partner(*alpha, *gamma),
            Family::SwitchedExp { alpha, gamma } => vec![Term::damped(1.0, 1.0 - alpha, *gamma)],
            Family::SumFractional { .. } => return None,
            Family::DistributedOrder => vec![Term::ExpE1],
            Family::SwitchedDistributed => vec![Term::OrderIntegral],
        }))
    }

    pub fn eval_k(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return domain(format!("kernel evaluation needs t > 0, got {t}"));
        }
        Ok(self.k().eval(t))
    }

    pub fn eval_l(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return domain(format!("kernel evaluation needs t > 0, got {t}"));
        }
        Ok(match self.l() {
            Some(l) => l.eval(t),
            None => talbot(|z| self.laplace_l_c(z), t, TALBOT_TERMS),
        })
    }

    /// (1 * l)(t).
    pub fn primitive_l(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.l() {
            Some(l) => l.primitive(t),
            None => talbot(|z| self.laplace_l_c(z) / z, t, TALBOT_TERMS),
        }
    }

    /// |l|_{L1} when l is integrable on the half line.
    pub fn l_integral(&self) -> Option<f64> {
        match self.family {
            Family::SwitchedExp { alpha, gamma } => Some(gamma.powf(alpha - 1.0)),
            _ => None,
        }
    }

    pub fn laplace_k(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) {
            return domain(format!("Laplace transform needs z > 0, got {z}"));
        }
        Ok(self.laplace_k_c(Complex64::new(z, 0.0)).re)
    }

    pub fn laplace_l(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) {
            return domain(format!("Laplace transform needs z > 0, got {z}"));
        }
        Ok(self.laplace_l_c(Complex64::new(z, 0.0)).re)
    }

    pub fn laplace_k_c(&self, z: Complex64) -> Complex64 {
        match &self.family {
            Family::Fractional { alpha } => z.powf(alpha - 1.0),
            Family::FractionalExp { alpha, gamma } => (z + gamma).powf(alpha - 1.0),
            Family::SwitchedExp { alpha, gamma } => (z + gamma).powf(1.0 - alpha) / z,
            Family::SumFractional { terms } => terms.iter().map(|(d, a)| *d * z.powf(a - 1.0)).sum(),
            Family::DistributedOrder => z_minus_one_over_log(z) / z,
            Family::SwitchedDistributed => 1.0 / z_minus_one_over_log(z),
        }
    }

    pub fn laplace_l_c(&self, z: Complex64) -> Complex64 {
        match &self.family {
            Family::Fractional { alpha } => z.powf(-alpha),
            Family::FractionalExp { alpha, gamma } => (z + gamma).powf(1.0 - alpha) / z,
            Family::SwitchedExp { alpha, gamma } => (z + gamma).powf(alpha - 1.0),
            Family::SumFractional { terms } => 1.0 / terms.iter().map(|(d, a)| *d * z.powf(*a)).sum::<Complex64>(),
            Family::DistributedOrder => 1.0 / z_minus_one_over_log(z),
            Family::SwitchedDistributed => z_minus_one_over_log(z) / z,
        }
    }

    /// Transform of the relaxation function, 1/(z + mu z l(z)).
    pub fn laplace_relaxation_c(&self, z: Complex64, mu: f64) -> Complex64 {
        1.0 / (z + mu * z * self.laplace_l_c(z))
    }

    pub fn laplace_relaxation(&self, z: f64, mu: f64) -> Result<f64> {
        if !(z > 0.0) {
            return domain(format!("Laplace transform needs z > 0, got {z}"));
        }
        Ok(self.laplace_relaxation_c(Complex64::new(z, 0.0), mu).re)
    }
}

/// g_alpha e^{-gamma t} + gamma (1 * [g_alpha e^{-gamma .}])
fn tempered_partner(alpha: f64, gamma: f64) -> Vec<Term> {
    vec![Term::damped(1.0, alpha, gamma), Term::DampedPrimitive { c: gamma, beta: alpha, rate: gamma }]
}

/// (z - 1)/log z with the removable singularity at z = 1 expanded.
fn z_minus_one_over_log(z: Complex64) -> Complex64 {
    let w = z - 1.0;
    if w.norm() < 1e-4 {
        1.0 + w / 2.0 - w * w / 12.0 + w * w * w / 24.0
    } else {
        w / z.ln()
    }
}

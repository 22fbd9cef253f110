//! Special functions used as oracles and kernel building blocks.

pub mod gamma;
pub mod laplace;
pub mod mittag_leffler;

pub use gamma::{e1, erfc, erfcx, exp_e1, gamma, gamma_p, gamma_q, ln_gamma, rgamma};
pub use laplace::{numerical_laplace, talbot, TALBOT_TERMS, LaplaceEstimate, TailModel};
pub use mittag_leffler::{bounds_sweep, ml, ml_bounds, mittag_leffler_neg, omega_root, BoundsRow, MlEvaluation, MlMethod};

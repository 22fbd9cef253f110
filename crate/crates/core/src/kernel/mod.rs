//! Kernel pairs, time grids and product-integration weights.

pub mod family;
pub mod grid;
pub mod term;
pub mod weights;

pub use family::{Family, KernelPair};
pub use grid::{default_grading, TimeGrid};
pub use term::{eval_g, Kernel, Term};
pub use weights::ConvolutionWeights;

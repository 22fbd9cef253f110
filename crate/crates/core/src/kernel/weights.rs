use super::grid::TimeGrid;
use super::term::Kernel;
use crate::error::{usage, Result};

/// Product-integration weights for (k * v)(t_n) with piecewise-linear v.
///
/// Row n holds the hat weights w[n][0..=n] and the plain interval integrals
/// a[n][j-1] = int_{t_{j-1}}^{t_j} k(t_n - s) ds used by the history operator.
#[derive(Debug, Clone)]
pub struct ConvolutionWeights {
    grid: TimeGrid,
    hat: Vec<Vec<f64>>,
    interval: Vec<Vec<f64>>,
}

impl ConvolutionWeights {
    pub fn new(kernel: &Kernel, grid: &TimeGrid) -> Self {
        let t = grid.nodes();
        let n_max = grid.n();
        let mut hat = Vec::with_capacity(n_max + 1);
        let mut interval = Vec::with_capacity(n_max + 1);
        hat.push(vec![0.0]);
        interval.push(Vec::new());
        for n in 1..=n_max {
            let mut w = vec![0.0; n + 1];
            let mut a_row = vec![0.0; n];
            for j in 1..=n {
                let a = t[n] - t[j];
                let b = t[n] - t[j - 1];
                let h = b - a;
                let (m0, m1) = kernel.moments(a, b);
                w[j - 1] += m1 / h;
                w[j] += m0 - m1 / h;
                a_row[j - 1] = m0;
            }
            hat.push(w);
            interval.push(a_row);
        }
        Self { grid: grid.clone(), hat, interval }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// w[n][0..=n].
    pub fn hat(&self, n: usize) -> &[f64] {
        &self.hat[n]
    }

    /// int over interval j (stored at j-1) of k(t_n - s) ds.
    pub fn interval(&self, n: usize) -> &[f64] {
        &self.interval[n]
    }

    /// (k * v)(t_n) for every node, v piecewise linear through the samples.
    pub fn convolve(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.grid.len() {
            return usage(format!("samples have length {}, grid has {}", v.len(), self.grid.len()));
        }
        Ok((0..v.len()).map(|n| self.hat[n].iter().zip(v).map(|(w, x)| w * x).sum()).collect())
    }
}

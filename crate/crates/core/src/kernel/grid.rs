use crate::error::{domain, Result};
use serde::Serialize;

/// Strictly increasing time nodes starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    /// Grading exponent of the initial segment (1 for uniform).
    pub grading: f64,
}

impl TimeGrid {
    pub fn from_nodes(nodes: Vec<f64>, grading: f64) -> Result<Self> {
        if nodes.len() < 3 {
            return domain("time grid needs N >= 2 intervals");
        }
        if nodes[0] != 0.0 {
            return domain("time grid must start at 0");
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return domain("time grid must be strictly increasing and finite");
        }
        Ok(Self { nodes, grading })
    }

    /// t_i = T (i/N)^r.
    pub fn graded(t_end: f64, n: usize, r: f64) -> Result<Self> {
        if !(t_end > 0.0) || !(r >= 1.0) || n < 2 {
            return domain(format!("graded grid needs T > 0, r >= 1, N >= 2; got T={t_end}, r={r}, N={n}"));
        }
        let nodes = (0..=n).map(|i| t_end * (i as f64 / n as f64).powf(r)).collect();
        Self::from_nodes(nodes, r)
    }

    pub fn uniform(t_end: f64, n: usize) -> Result<Self> {
        Self::graded(t_end, n, 1.0)
    }

    /// Graded on [0, t_switch] with n_graded intervals, then geometric with the given
    /// ratio until t_end (the last node is clipped to t_end).
    pub fn composite(t_switch: f64, n_graded: usize, r: f64, ratio: f64, t_end: f64) -> Result<Self> {
        if !(ratio > 1.0) || !(t_end > t_switch) {
            return domain("composite grid needs ratio > 1 and T > t_switch");
        }
        let mut nodes: Vec<f64> = Self::graded(t_switch, n_graded, r)?.nodes;
        let first = nodes[n_graded] - nodes[n_graded - 1];
        let mut h = first;
        let mut t = t_switch;
        while t < t_end {
            // grow the step until it matches the geometric profile
            h = (h * ratio).min(t * (ratio - 1.0)).max(h);
            t += h;
            if t > t_end * (1.0 - 1e-12) || t_end - t < 0.5 * h {
                t = t_end;
            }
            nodes.push(t);
        }
        Self::from_nodes(nodes, r)
    }

    /// Every other node (keeping the last), with the fine index of each coarse node.
    pub fn coarsened(&self) -> Result<(TimeGrid, Vec<usize>)> {
        let mut idx: Vec<usize> = (0..self.nodes.len()).step_by(2).collect();
        if *idx.last().unwrap() != self.n() {
            idx.push(self.n());
        }
        let nodes = idx.iter().map(|&i| self.nodes[i]).collect();
        Ok((Self::from_nodes(nodes, self.grading)?, idx))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of intervals N.
    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn t(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Step h_i = t_i - t_{i-1}, i >= 1.
    pub fn step(&self, i: usize) -> f64 {
        self.nodes[i] - self.nodes[i - 1]
    }

    pub fn t_end(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Index of the first node >= t.
    pub fn index_at_or_after(&self, t: f64) -> usize {
        self.nodes.partition_point(|&x| x < t).min(self.n())
    }
}

/// Default grading 2/alpha, at least 1.
pub fn default_grading(alpha: f64) -> f64 {
    (2.0 / alpha).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_nodes() {
        let g = TimeGrid::graded(4.0, 4, 2.0).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 1.0, 2.25, 4.0]);
        assert_eq!(g.n(), 4);
    }

    #[test]
    fn composite_is_monotone_and_reaches_end() {
        let g = TimeGrid::composite(1.0, 50, 4.0, 1.05, 1e6).unwrap();
        assert_eq!(g.t_end(), 1e6);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        let tail: Vec<f64> = g.nodes().windows(2).filter(|w| w[0] > 10.0).map(|w| w[1] / w[0]).collect();
        assert!(tail[..tail.len() - 1].iter().all(|&q| q <= 1.05 + 1e-12));
        assert!(g.n() < 400);
    }

    #[test]
    fn coarsening_keeps_end() {
        let g = TimeGrid::uniform(1.0, 5).unwrap();
        let (c, idx) = g.coarsened().unwrap();
        assert_eq!(idx, vec![0, 2, 4, 5]);
        assert_eq!(c.t_end(), 1.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::graded(1.0, 1, 1.0).is_err());
        assert!(TimeGrid::from_nodes(vec![0.0, 1.0, 1.0], 1.0).is_err());
        assert!(TimeGrid::from_nodes(vec![0.1, 1.0, 2.0], 1.0).is_err());
    }
}

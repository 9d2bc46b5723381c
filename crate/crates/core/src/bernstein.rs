//! Bernstein basis tables mapping grid distributions to expected fingerprints.

use crate::distribution::AtomicDistribution;
use crate::error::{invalid, Result};
use crate::fingerprint::Fingerprint;
use crate::special::bernstein;

/// `(t+1) x (m+1)` table of `B_s^t(j/m)`, stored row-major by `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinMatrix {
    t: u32,
    grid: Vec<f64>,
    entries: Vec<f64>,
}

impl BernsteinMatrix {
    /// Table on the uniform grid `j/m`, `j = 0..=m`.
    pub fn new(t: u32, m: usize) -> Result<Self> {
        if t == 0 || m == 0 {
            return Err(invalid("bernstein_matrix requires t >= 1 and m >= 1"));
        }
        let grid = (0..=m).map(|j| j as f64 / m as f64).collect();
        Self::on_nodes(t, grid)
    }

    /// Table on arbitrary nodes in `[0, 1]`.
    pub fn on_nodes(t: u32, grid: Vec<f64>) -> Result<Self> {
        if t == 0 || grid.is_empty() {
            return Err(invalid("bernstein table requires t >= 1 and at least one node"));
        }
        let cols = grid.len();
        let mut entries = vec![0.0; (t as usize + 1) * cols];
        for s in 0..=t {
            let row = &mut entries[s as usize * cols..(s as usize + 1) * cols];
            for (e, &x) in row.iter_mut().zip(&grid) {
                *e = bernstein(t, s, x);
            }
        }
        Ok(Self { t, grid, entries })
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn cols(&self) -> usize {
        self.grid.len()
    }

    /// Row `s`: `B_s^t` across the grid.
    pub fn row(&self, s: u32) -> &[f64] {
        let c = self.cols();
        &self.entries[s as usize * c..(s as usize + 1) * c]
    }

    pub fn get(&self, s: u32, j: usize) -> f64 {
        self.entries[s as usize * self.cols() + j]
    }

    /// Column `j`: the Binomial(t, x_j) pmf.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..=self.t).map(|s| self.get(s, j)).collect()
    }

    /// Expected fingerprint of grid weights `q` (not required to be normalised).
    pub fn apply(&self, q: &[f64]) -> Vec<f64> {
        assert_eq!(q.len(), self.cols(), "weight vector does not match grid");
        (0..=self.t)
            .map(|s| self.row(s).iter().zip(q).map(|(b, w)| b * w).sum())
            .collect()
    }
}

/// `E_Q[h_s] = sum over atoms of mass * B_s^t(x)`.
pub fn expected_fingerprint(dist: &AtomicDistribution, t: u32) -> Result<Fingerprint> {
    if t == 0 {
        return Err(invalid("t must be at least 1"));
    }
    let mut h = vec![0.0; t as usize + 1];
    for (x, w) in dist.atoms() {
        for (s, hs) in h.iter_mut().enumerate() {
            *hs += w * bernstein(t, s as u32, x);
        }
    }
    Ok(Fingerprint::from_raw(h))
}

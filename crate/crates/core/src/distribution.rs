use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Locations closer than this are treated as the same atom.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// A finitely supported probability distribution on `[0, 1]`.
///
/// Atoms are kept sorted by location with strictly positive masses; atoms
/// whose locations differ by less than [`MERGE_TOLERANCE`] are merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicDistribution {
    locations: Vec<f64>,
    masses: Vec<f64>,
}

impl AtomicDistribution {
    /// Builds a distribution from `(location, mass)` pairs whose masses must
    /// already sum to one (within `1e-10`).
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let dist = Self::collect(atoms)?;
        let total: f64 = dist.masses.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("atom masses sum to {total}, expected 1")));
        }
        Ok(dist)
    }

    /// Like [`AtomicDistribution::new`] but rescales the masses to sum to one.
    pub fn normalized(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut dist = Self::collect(atoms)?;
        let total: f64 = dist.masses.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(invalid("distribution has no mass"));
        }
        dist.masses.iter_mut().for_each(|m| *m /= total);
        Ok(dist)
    }

    fn collect(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        for &(x, w) in &atoms {
            if !x.is_finite() || !(-MERGE_TOLERANCE..=1.0 + MERGE_TOLERANCE).contains(&x) {
                return Err(invalid(format!("atom location {x} outside [0, 1]")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(invalid(format!("atom mass {w} is negative or not finite")));
            }
        }
        atoms.retain(|&(_, w)| w > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut locations: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut masses: Vec<f64> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            let x = x.clamp(0.0, 1.0);
            match locations.last() {
                Some(&last) if x - last < MERGE_TOLERANCE => {
                    *masses.last_mut().unwrap() += w;
                }
                _ => {
                    locations.push(x);
                    masses.push(w);
                }
            }
        }
        if locations.is_empty() {
            return Err(invalid("distribution needs at least one atom with positive mass"));
        }
        Ok(Self { locations, masses })
    }

    /// Point mass at `c`.
    pub fn point_mass(c: f64) -> Result<Self> {
        Self::new([(c, 1.0)])
    }

    /// Distribution on the uniform grid `j/m`, `j = 0..=m`, with the given
    /// (unnormalised) weights.
    pub fn on_grid(weights: &[f64]) -> Result<Self> {
        if weights.len() < 2 {
            return Err(invalid("grid needs at least two nodes"));
        }
        let m = (weights.len() - 1) as f64;
        Self::normalized(weights.iter().enumerate().map(|(j, &w)| (j as f64 / m, w)))
    }

    /// Equal masses on all `m + 1` grid nodes.
    pub fn uniform_grid(m: usize) -> Result<Self> {
        Self::on_grid(&vec![1.0; m + 1])
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.locations.iter().copied().zip(self.masses.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(x, w)| x * w).sum()
    }

    /// `E[f(p)]`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms().map(|(x, w)| w * f(x)).sum()
    }

    /// Mixture `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &Self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(invalid("mixture weight must lie in [0, 1]"));
        }
        Self::normalized(
            self.atoms()
                .map(|(x, w)| (x, alpha * w))
                .chain(other.atoms().map(|(x, w)| (x, (1.0 - alpha) * w))),
        )
    }

    /// Drops atoms lighter than `floor` and renormalises.
    pub fn pruned(&self, floor: f64) -> Self {
        match Self::normalized(self.atoms().filter(|&(_, w)| w >= floor)) {
            Ok(d) => d,
            Err(_) => self.clone(),
        }
    }

    /// Pushes the distribution forward through `x -> a + (b - a) x`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        Self::new(self.atoms().map(|(x, w)| (a + (b - a) * x, w)))
    }
}

//! Global moment matching and the moment-fitting LP shared with local
//! moment matching.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{EstimateReport, Method};
use crate::distribution::AtomicDistribution;
use crate::error::{invalid, Result};
use crate::lp::LinearProgram;
use crate::metrics::MomentVector;
use crate::observations::ObservationSet;
use crate::special::falling_ratio;

/// How moment mismatches are aggregated in the LP objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentNorm {
    /// Largest absolute mismatch.
    #[default]
    LInf,
    /// Sum of absolute mismatches.
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentLpConfig {
    pub norm: MomentNorm,
    pub max_pivots: usize,
}

impl Default for MomentLpConfig {
    fn default() -> Self {
        Self {
            norm: MomentNorm::LInf,
            max_pivots: 200_000,
        }
    }
}

/// Measure returned by [`solve_moment_lp`]; masses sum to the requested total.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFit {
    pub locations: Vec<f64>,
    pub masses: Vec<f64>,
    /// Largest per-unit-mass moment mismatch `max_k |Σ w (x-s)^k / mass - μ_k|`.
    pub residual: f64,
    pub pivots: usize,
}

impl MomentFit {
    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn to_distribution(&self) -> Result<AtomicDistribution> {
        AtomicDistribution::normalized(self.locations.iter().copied().zip(self.masses.iter().copied()))
    }
}

/// Sample means of the unbiased power estimators `C(X_i, l) / C(t, l)`,
/// `l = 1..=k`.
pub fn unbiased_moments(counts: &[u32], t: u32, k: u32) -> Result<Vec<f64>> {
    if k > t {
        return Err(invalid(format!(
            "moment order {k} exceeds t={t}; higher moments have no unbiased estimator"
        )));
    }
    let n = counts.len() as f64;
    Ok((1..=k)
        .map(|l| counts.iter().map(|&x| falling_ratio(x, t, l)).sum::<f64>() / n)
        .collect())
}

/// Fits a measure of total `mass` on `grid_size + 1` equispaced nodes of
/// `interval` whose moments about `target.shift` best match `target.values`
/// (per unit mass).
pub fn solve_moment_lp(
    interval: (f64, f64),
    grid_size: usize,
    target: &MomentVector,
    mass: f64,
    cfg: &MomentLpConfig,
) -> Result<MomentFit> {
    let (a, b) = interval;
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(invalid(format!("moment LP interval [{a}, {b}] is empty")));
    }
    if !(mass > 0.0) {
        return Err(invalid("moment LP mass must be positive"));
    }
    if grid_size == 0 || target.values.is_empty() {
        return Err(invalid("moment LP needs a grid and at least one target moment"));
    }
    let nodes: Vec<f64> = (0..=grid_size)
        .map(|j| a + (b - a) * j as f64 / grid_size as f64)
        .collect();
    let k = target.values.len();
    let n = nodes.len();
    let powers: Vec<Vec<f64>> = (1..=k)
        .map(|p| nodes.iter().map(|&x| (x - target.shift).powi(p as i32)).collect())
        .collect();

    let n_slack = match cfg.norm {
        MomentNorm::LInf => 1,
        MomentNorm::L1 => k,
    };
    let mut cost = vec![0.0; n + n_slack];
    cost[n..].iter_mut().for_each(|c| *c = 1.0);
    let mut lp = LinearProgram::new(cost);
    let mut total = vec![0.0; n + n_slack];
    total[..n].iter_mut().for_each(|c| *c = 1.0);
    lp.add_eq(total, mass);
    for (p, row_pow) in powers.iter().enumerate() {
        let slack = match cfg.norm {
            MomentNorm::LInf => n,
            MomentNorm::L1 => n + p,
        };
        let goal = mass * target.values[p];
        let mut up = vec![0.0; n + n_slack];
        up[..n].copy_from_slice(row_pow);
        up[slack] = -1.0;
        lp.add_le(up, goal);
        let mut down = vec![0.0; n + n_slack];
        down[..n].iter_mut().zip(row_pow).for_each(|(d, &v)| *d = -v);
        down[slack] = -1.0;
        lp.add_le(down, -goal);
    }
    let sol = lp.solve(cfg.max_pivots)?;
    let weights = &sol.x[..n];
    let residual = powers
        .iter()
        .zip(&target.values)
        .map(|(row, &mu)| {
            let got: f64 = row.iter().zip(weights).map(|(x, w)| x * w).sum();
            (got / mass - mu).abs()
        })
        .fold(0.0, f64::max);
    let (locations, masses) = nodes
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&x, &w)| (x, w))
        .unzip();
    Ok(MomentFit {
        locations,
        masses,
        residual,
        pivots: sol.pivots,
    })
}

/// Moment matching with the default LP settings.
pub fn estimate_moment_matching(obs: &ObservationSet, k: u32, grid_size: usize) -> Result<EstimateReport> {
    estimate_moment_matching_with(obs, k, grid_size, &MomentLpConfig::default())
}

/// Matches the first `k` unbiased empirical moments with a distribution on
/// the grid `j / grid_size`.
pub fn estimate_moment_matching_with(
    obs: &ObservationSet,
    k: u32,
    grid_size: usize,
    cfg: &MomentLpConfig,
) -> Result<EstimateReport> {
    if k == 0 {
        return Err(invalid("moment matching needs at least one moment"));
    }
    let start = Instant::now();
    let values = unbiased_moments(obs.counts(), obs.t(), k)?;
    let target = MomentVector { shift: 0.0, values };
    let fit = solve_moment_lp((0.0, 1.0), grid_size, &target, 1.0, cfg)?;
    Ok(EstimateReport {
        method: Method::MomentMatching,
        distribution: fit.to_distribution()?,
        iterations: fit.pivots,
        final_objective: fit.residual,
        converged: true,
        elapsed: start.elapsed(),
    })
}

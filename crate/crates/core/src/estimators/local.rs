//! Local moment matching.
//!
//! Each individual's trials are split in two batches. The first batch bins
//! individuals by their plug-in rate on intervals that are fine near zero,
//! the second batch yields unbiased shifted moments per bin, and each bin's
//! measure is recovered by the moment LP on a widened interval.

use std::time::Instant;

use super::moment_matching::{solve_moment_lp, MomentLpConfig};
use super::{EstimateReport, Method};
use crate::distribution::AtomicDistribution;
use crate::error::{invalid, Error, Result};
use crate::metrics::MomentVector;
use crate::observations::{Observations, TrialMatrix};
use crate::special::{binomial, falling_ratio};

#[derive(Debug, Clone, PartialEq)]
pub struct LmmConfig {
    /// Interval width constant.
    pub c1: f64,
    /// Moment count constant.
    pub c2: f64,
    /// Grid intervals per bin for the recovery LP.
    pub grid_size: usize,
    pub lp: MomentLpConfig,
}

impl Default for LmmConfig {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c2: 1.0,
            grid_size: 200,
            lp: MomentLpConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmmBin {
    /// 1-based bin index.
    pub index: usize,
    pub left: f64,
    pub right: f64,
    /// Widened interval the bin's measure is recovered on.
    pub recovery: (f64, f64),
    /// Individuals assigned to the bin.
    pub members: Vec<usize>,
}

/// Binning and batch split, before any LP is solved.
#[derive(Debug, Clone, PartialEq)]
pub struct LmmPlan {
    /// `max(1, ln N)`.
    pub log_n: f64,
    pub first_batch: u32,
    pub second_batch: u32,
    /// Number of shifted moments matched per bin.
    pub moments: u32,
    pub bins: Vec<LmmBin>,
}

fn check_config(cfg: &LmmConfig) -> Result<()> {
    if !(cfg.c1 > 0.0) || !(cfg.c2 > 0.0) {
        return Err(invalid("local moment matching constants c1 and c2 must be positive"));
    }
    if cfg.grid_size == 0 {
        return Err(invalid("local moment matching grid size must be positive"));
    }
    Ok(())
}

/// Splits trials, builds the bins, and assigns individuals to them.
pub fn lmm_plan(trials: &TrialMatrix, cfg: &LmmConfig) -> Result<LmmPlan> {
    check_config(cfg)?;
    let t = trials.t();
    let n = trials.len();
    if t < 4 {
        return Err(invalid("local moment matching needs t >= 4"));
    }
    if n < 2 {
        return Err(invalid("local moment matching needs N >= 2"));
    }
    let first = t / 2;
    let second = t - first;
    let log_n = (n as f64).ln().max(1.0);
    let bins_wanted = ((t as f64 / (cfg.c2 * log_n)).sqrt().floor() as usize).max(1);
    let unit = cfg.c1 * log_n / t as f64;
    let mut bins: Vec<LmmBin> = (1..=bins_wanted)
        .map(|j| {
            let jf = j as f64;
            let left = (jf - 1.0).powi(2) * unit;
            let wide_left = if j == 1 { 0.0 } else { (jf - 1.5).powi(2) * unit };
            LmmBin {
                index: j,
                left,
                right: (jf * jf * unit).min(1.0),
                recovery: (wide_left.min(1.0), ((jf + 1.0).powi(2) * unit).min(1.0)),
                members: Vec::new(),
            }
        })
        .take_while(|b| b.left < 1.0)
        .collect();
    if let Some(last) = bins.last_mut() {
        last.right = 1.0;
        last.recovery.1 = 1.0;
    }
    let rates = trials.partial_counts(0..first as usize);
    for (i, &x) in rates.iter().enumerate() {
        let r = x as f64 / first as f64;
        let j = bins
            .iter()
            .position(|b| r < b.right)
            .unwrap_or(bins.len() - 1);
        bins[j].members.push(i);
    }
    let moments = ((cfg.c2 * log_n).ceil() as u32).min(first).max(1);
    Ok(LmmPlan {
        log_n,
        first_batch: first,
        second_batch: second,
        moments,
        bins,
    })
}

/// Local moment matching. Requires raw trials; counts-only input is rejected.
pub fn estimate_local_moment_matching(input: &Observations, cfg: &LmmConfig) -> Result<EstimateReport> {
    let trials = input.trials().ok_or(Error::RawTrialsRequired)?;
    let start = Instant::now();
    let plan = lmm_plan(trials, cfg)?;
    let n = trials.len() as f64;
    let second = trials.partial_counts(plan.first_batch as usize..trials.t() as usize);
    let k_max = plan.moments;

    let mut atoms: Vec<(f64, f64)> = Vec::new();
    let mut residual = 0.0f64;
    let mut pivots = 0;
    for bin in plan.bins.iter().filter(|b| !b.members.is_empty()) {
        let shift = bin.left;
        let size = bin.members.len() as f64;
        let values: Vec<f64> = (1..=k_max)
            .map(|k| {
                let sum: f64 = bin
                    .members
                    .iter()
                    .map(|&i| {
                        (0..=k)
                            .map(|l| {
                                binomial(k as u64, l as u64)
                                    * (-shift).powi((k - l) as i32)
                                    * falling_ratio(second[i], plan.second_batch, l)
                            })
                            .sum::<f64>()
                    })
                    .sum();
                sum / size
            })
            .collect();
        let target = MomentVector { shift, values };
        let fit = solve_moment_lp(bin.recovery, cfg.grid_size, &target, size / n, &cfg.lp)?;
        residual = residual.max(fit.residual);
        pivots += fit.pivots;
        atoms.extend(fit.locations.iter().copied().zip(fit.masses.iter().copied()));
    }
    Ok(EstimateReport {
        method: Method::LocalMomentMatching,
        distribution: AtomicDistribution::normalized(atoms)?,
        iterations: pivots,
        final_objective: residual,
        converged: true,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::estimate_moment_matching;
    use crate::metrics::wasserstein1;
    use crate::observations::ObservationSet;

    fn rows(rows: &[&str]) -> TrialMatrix {
        let rows: Vec<Vec<bool>> = rows.iter().map(|r| r.chars().map(|c| c == '1').collect()).collect();
        TrialMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn counts_only_input_is_rejected() {
        let obs = ObservationSet::new(4, vec![1, 2, 3]).unwrap();
        let err = estimate_local_moment_matching(&Observations::Counts(obs), &LmmConfig::default()).unwrap_err();
        assert_eq!(err, Error::RawTrialsRequired);
        assert!(err.to_string().contains("raw trials required"));
    }

    #[test]
    fn small_t_and_n_rejected() {
        let m = rows(&["101", "011"]);
        assert!(lmm_plan(&m, &LmmConfig::default()).is_err());
        let m = rows(&["1010"]);
        assert!(lmm_plan(&m, &LmmConfig::default()).is_err());
        let m = rows(&["1010", "0000"]);
        let bad = LmmConfig {
            c1: 0.0,
            ..Default::default()
        };
        assert!(lmm_plan(&m, &bad).is_err());
    }

    #[test]
    fn plan_for_small_population_is_single_bin() {
        // N = 2: ln N < 1 is floored to 1, and sqrt(4 / 1) = 2 bins would start at
        // 1/4; the odd split puts 2 trials in each batch
        let m = rows(&["1010", "0001"]);
        let plan = lmm_plan(&m, &LmmConfig::default()).unwrap();
        assert_eq!(plan.log_n, 1.0);
        assert_eq!((plan.first_batch, plan.second_batch), (2, 2));
        assert_eq!(plan.bins.len(), 2);
        assert_eq!(plan.bins[0].recovery.0, 0.0);
        assert_eq!(plan.bins.last().unwrap().right, 1.0);
        let total: usize = plan.bins.iter().map(|b| b.members.len()).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn odd_t_split() {
        let m = rows(&["10101", "01010", "11111"]);
        let plan = lmm_plan(&m, &LmmConfig::default()).unwrap();
        assert_eq!((plan.first_batch, plan.second_batch), (2, 3));
    }

    #[test]
    fn single_bin_matches_global_moment_matching() {
        let patterns = ["1101", "0110", "1111", "0001", "1000", "0111", "1010", "0011"];
        let m = rows(&patterns);
        let cfg = LmmConfig {
            grid_size: 50,
            ..Default::default()
        };
        let plan = lmm_plan(&m, &cfg).unwrap();
        assert_eq!(plan.bins.len(), 1);
        assert_eq!(plan.moments, 2);
        let local = estimate_local_moment_matching(&Observations::Trials(m.clone()), &cfg).unwrap();
        let batch = ObservationSet::new(2, m.partial_counts(2..4)).unwrap();
        let global = estimate_moment_matching(&batch, 2, 50).unwrap();
        assert!(wasserstein1(&local.distribution, &global.distribution) < 1e-9);
        assert!((local.final_objective - global.final_objective).abs() < 1e-9);
    }
}

//! The four estimators of the mixing distribution.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::distribution::AtomicDistribution;
use crate::error::{invalid, Error, Result};
use crate::observations::Observations;

mod empirical;
mod local;
mod mle;
mod moment_matching;

pub use empirical::estimate_empirical;
pub use local::{estimate_local_moment_matching, lmm_plan, LmmBin, LmmConfig, LmmPlan};
pub use mle::{em_solve, estimate_mle, estimate_mle_from, EmOutcome, MleConfig};
pub use moment_matching::{
    estimate_moment_matching, estimate_moment_matching_with, solve_moment_lp, unbiased_moments,
    MomentFit, MomentLpConfig, MomentNorm,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mle,
    Empirical,
    MomentMatching,
    LocalMomentMatching,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Mle,
        Method::Empirical,
        Method::MomentMatching,
        Method::LocalMomentMatching,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mle => "mle",
            Method::Empirical => "empirical",
            Method::MomentMatching => "moment_matching",
            Method::LocalMomentMatching => "local_moment_matching",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                let valid: Vec<_> = Method::ALL.iter().map(|m| m.as_str()).collect();
                invalid(format!("unknown method '{s}'; valid methods: {}", valid.join(", ")))
            })
    }
}

/// Output of an estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub method: Method,
    pub distribution: AtomicDistribution,
    pub iterations: usize,
    /// KL for the MLE, maximum moment residual for the LP methods, zero for
    /// the empirical estimator.
    pub final_objective: f64,
    pub converged: bool,
    pub elapsed: Duration,
}

#[derive(Serialize)]
struct ReportJson {
    method: Method,
    atoms: Vec<[f64; 2]>,
    iterations: usize,
    final_objective: f64,
    converged: bool,
    elapsed_ms: f64,
}

impl EstimateReport {
    /// JSON form `{method, atoms, iterations, final_objective, converged,
    /// elapsed_ms}`. Without `timing`, `elapsed_ms` is written as 0 so the
    /// output is reproducible.
    pub fn to_json(&self, timing: bool) -> serde_json::Value {
        let json = ReportJson {
            method: self.method,
            atoms: self.distribution.atoms().map(|(x, w)| [x, w]).collect(),
            iterations: self.iterations,
            final_objective: self.final_objective,
            converged: self.converged,
            elapsed_ms: if timing {
                self.elapsed.as_secs_f64() * 1e3
            } else {
                0.0
            },
        };
        serde_json::to_value(json).expect("report serialises")
    }
}

/// Settings for every estimator, as used by [`estimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub mle: MleConfig,
    /// Grid intervals for global moment matching.
    pub moment_grid: usize,
    /// Number of matched moments; defaults to `t`.
    pub moments: Option<u32>,
    pub lp: MomentLpConfig,
    pub lmm: LmmConfig,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            mle: MleConfig::default(),
            moment_grid: 1000,
            moments: None,
            lp: MomentLpConfig::default(),
            lmm: LmmConfig::default(),
        }
    }
}

/// Runs `method` on `input`.
pub fn estimate(method: Method, input: &Observations, cfg: &EstimatorConfig) -> Result<EstimateReport> {
    match method {
        Method::Mle => estimate_mle(&input.counts(), &cfg.mle),
        Method::Empirical => estimate_empirical(&input.counts()),
        Method::MomentMatching => {
            let obs = input.counts();
            let k = cfg.moments.unwrap_or(obs.t());
            estimate_moment_matching_with(&obs, k, cfg.moment_grid, &cfg.lp)
        }
        Method::LocalMomentMatching => estimate_local_moment_matching(input, &cfg.lmm),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        let err = "mlee".parse::<Method>().unwrap_err().to_string();
        assert!(err.contains("local_moment_matching"));
    }
}

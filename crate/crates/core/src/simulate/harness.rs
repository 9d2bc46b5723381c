use std::time::Instant;

use rayon::prelude::*;

use super::rng::replication_seed;
use super::{sample_counts, sample_population, sample_trials, Truth};
use crate::error::{invalid, Result};
use crate::estimators::{estimate, EstimatorConfig, Method};
use crate::metrics::wasserstein1;
use crate::observations::Observations;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub id: String,
    pub truth: Truth,
    pub n: usize,
    pub t: u32,
    pub seed: u64,
    pub replications: usize,
    pub methods: Vec<Method>,
    pub estimators: EstimatorConfig,
    /// Worker cap for replications; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl ScenarioSpec {
    pub fn new(truth: Truth, n: usize, t: u32, seed: u64) -> Self {
        Self {
            id: "scenario".into(),
            truth,
            n,
            t,
            seed,
            replications: 5,
            methods: vec![Method::Mle, Method::Empirical],
            estimators: EstimatorConfig::default(),
            jobs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.t == 0 || self.replications == 0 {
            return Err(invalid("scenario needs N >= 1, t >= 1 and at least one replication"));
        }
        if self.methods.is_empty() {
            return Err(invalid("scenario needs at least one estimator"));
        }
        self.truth.validate()
    }
}

/// One estimator run within one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario_id: String,
    pub estimator: Method,
    pub n: usize,
    pub t: u32,
    pub rep: usize,
    /// W1 to the truth; NaN when the estimator failed.
    pub w1: f64,
    pub runtime_ms: f64,
    pub error: Option<String>,
}

/// Per-estimator aggregate over replications (failed runs excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub estimator: Method,
    pub mean_w1: f64,
    pub stderr_w1: f64,
    pub successes: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub rows: Vec<ResultRow>,
    pub summaries: Vec<Summary>,
}

impl ScenarioResult {
    pub fn summary(&self, method: Method) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.estimator == method)
    }
}

/// Samples each replication, runs every requested estimator, and scores it
/// by W1 to the truth. Estimator failures are recorded per row and the
/// remaining cells still run.
///
/// Trials are materialised only when local moment matching is requested;
/// otherwise counts are drawn directly from the binomial.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioResult> {
    spec.validate()?;
    let reference = spec.truth.reference_distribution()?;
    let needs_trials = spec.methods.contains(&Method::LocalMomentMatching);

    let run_rep = |rep: usize| -> Result<Vec<ResultRow>> {
        let seed = replication_seed(spec.seed, rep);
        let p = sample_population(&spec.truth, spec.n, seed)?;
        let input = if needs_trials {
            Observations::Trials(sample_trials(&p, spec.t, seed)?)
        } else {
            Observations::Counts(sample_counts(&p, spec.t, seed)?)
        };
        Ok(spec
            .methods
            .iter()
            .map(|&method| {
                let start = Instant::now();
                let outcome = estimate(method, &input, &spec.estimators);
                let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
                let (w1, error) = match outcome {
                    Ok(report) => (wasserstein1(&report.distribution, &reference), None),
                    Err(e) => (f64::NAN, Some(e.to_string())),
                };
                ResultRow {
                    scenario_id: spec.id.clone(),
                    estimator: method,
                    n: spec.n,
                    t: spec.t,
                    rep,
                    w1,
                    runtime_ms,
                    error,
                }
            })
            .collect())
    };

    let per_rep: Vec<Result<Vec<ResultRow>>> = match spec.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| invalid(e.to_string()))?;
            pool.install(|| (0..spec.replications).into_par_iter().map(run_rep).collect())
        }
        None => (0..spec.replications).into_par_iter().map(run_rep).collect(),
    };
    let mut rows = Vec::new();
    for r in per_rep {
        rows.extend(r?);
    }
    let summaries = spec
        .methods
        .iter()
        .map(|&method| {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.estimator == method && r.error.is_none())
                .map(|r| r.w1)
                .collect();
            let k = values.len();
            let mean = if k > 0 { values.iter().sum::<f64>() / k as f64 } else { f64::NAN };
            let stderr = if k > 1 {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
                (var / k as f64).sqrt()
            } else {
                0.0
            };
            Summary {
                estimator: method,
                mean_w1: mean,
                stderr_w1: stderr,
                successes: k,
                failures: spec.replications - k,
            }
        })
        .collect();
    Ok(ScenarioResult { rows, summaries })
}

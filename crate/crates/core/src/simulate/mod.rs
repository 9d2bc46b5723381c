//! Synthetic populations, binomial observations, and the replication harness.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{invalid, Result};
use crate::observations::{ObservationSet, TrialMatrix};

mod harness;
pub mod rng;
mod truth;

pub use harness::{run_scenario, ResultRow, ScenarioResult, ScenarioSpec, Summary};
pub use truth::{Truth, TruthSampler, QUANTILE_TABLE, REFERENCE_CELLS};

/// Draws `p_1..p_N` from `truth`; individual `i` uses its own substream.
pub fn sample_population(truth: &Truth, n: usize, seed: u64) -> Result<Vec<f64>> {
    let sampler = truth.sampler()?;
    Ok((0..n)
        .map(|i| sampler.sample(&mut rng::substream(seed, rng::POPULATION, i as u64)))
        .collect())
}

fn check_probabilities(p: &[f64], t: u32) -> Result<()> {
    if t == 0 {
        return Err(invalid("t must be at least 1"));
    }
    if p.is_empty() {
        return Err(invalid("population is empty"));
    }
    if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(invalid("success probabilities must lie in [0, 1]"));
    }
    Ok(())
}

/// Independent Bernoulli(`p_i`) outcomes, `t` per individual.
pub fn sample_trials(p: &[f64], t: u32, seed: u64) -> Result<TrialMatrix> {
    check_probabilities(p, t)?;
    let mut outcomes = Vec::with_capacity(p.len() * t as usize);
    for (i, &pi) in p.iter().enumerate() {
        let mut rng = rng::substream(seed, rng::TRIALS, i as u64);
        outcomes.extend((0..t).map(|_| rng.gen::<f64>() < pi));
    }
    TrialMatrix::new(t, outcomes)
}

/// `X_i ~ Binomial(t, p_i)` drawn directly, without materialising trials.
pub fn sample_counts(p: &[f64], t: u32, seed: u64) -> Result<ObservationSet> {
    check_probabilities(p, t)?;
    let counts = p
        .iter()
        .enumerate()
        .map(|(i, &pi)| {
            let mut rng = rng::substream(seed, rng::COUNTS, i as u64);
            Binomial::new(t as u64, pi).expect("probability checked").sample(&mut rng) as u32
        })
        .collect();
    ObservationSet::new(t, counts)
}

use std::time::Instant;

use super::{EstimateReport, Method};
use crate::distribution::AtomicDistribution;
use crate::error::Result;
use crate::observations::ObservationSet;

/// Plug-in estimator: mass `1/N` at each `X_i / t`.
pub fn estimate_empirical(obs: &ObservationSet) -> Result<EstimateReport> {
    let start = Instant::now();
    let t = obs.t() as f64;
    let w = 1.0 / obs.len() as f64;
    let distribution = AtomicDistribution::normalized(obs.counts().iter().map(|&x| (x as f64 / t, w)))?;
    Ok(EstimateReport {
        method: Method::Empirical,
        distribution,
        iterations: 0,
        final_objective: 0.0,
        converged: true,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_at_observed_rates() {
        let obs = ObservationSet::new(2, vec![0, 1, 1, 2]).unwrap();
        let r = estimate_empirical(&obs).unwrap();
        assert_eq!(r.distribution.locations(), &[0.0, 0.5, 1.0]);
        assert_eq!(r.distribution.masses(), &[0.25, 0.5, 0.25]);

        let obs = ObservationSet::new(4, vec![2, 2]).unwrap();
        let r = estimate_empirical(&obs).unwrap();
        assert_eq!(r.distribution, AtomicDistribution::point_mass(0.5).unwrap());
    }
}

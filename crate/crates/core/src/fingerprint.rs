//! Fingerprints: the histogram of success counts, a sufficient statistic for
//! the mixing distribution.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::observations::ObservationSet;

/// Fractions `h_0..h_t` of individuals that showed each success count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    t: u32,
    fractions: Vec<f64>,
    total_count: usize,
}

impl Fingerprint {
    /// Builds a fingerprint from arbitrary fractions, e.g. an expected
    /// fingerprint. `total_count` is zero for fingerprints that did not come
    /// from observations.
    pub fn from_fractions(fractions: Vec<f64>) -> Result<Self> {
        if fractions.len() < 2 {
            return Err(invalid("fingerprint needs at least two entries (t >= 1)"));
        }
        if fractions.iter().any(|&h| !(-1e-12..=1.0 + 1e-12).contains(&h)) {
            return Err(invalid("fingerprint entries must lie in [0, 1]"));
        }
        let sum: f64 = fractions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("fingerprint sums to {sum}, expected 1")));
        }
        let fractions = fractions.into_iter().map(|h| h.clamp(0.0, 1.0)).collect::<Vec<_>>();
        Ok(Self {
            t: (fractions.len() - 1) as u32,
            fractions,
            total_count: 0,
        })
    }

    pub(crate) fn from_raw(fractions: Vec<f64>) -> Self {
        Self {
            t: (fractions.len() - 1) as u32,
            fractions,
            total_count: 0,
        }
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn total_count(&self) -> usize {
        self.total_count
    }

    /// Raw counts `n_s`, rounded. Only meaningful for observed fingerprints.
    pub fn counts(&self) -> Vec<u64> {
        self.fractions
            .iter()
            .map(|h| (h * self.total_count as f64).round() as u64)
            .collect()
    }

    pub(crate) fn check_same_t(&self, other: &Fingerprint) -> Result<()> {
        if self.t != other.t {
            return Err(Error::MismatchedT {
                left: self.t,
                right: other.t,
            });
        }
        Ok(())
    }
}

/// Histogram of the observed counts, normalised by `N`.
pub fn fingerprint_of(obs: &ObservationSet) -> Fingerprint {
    let t = obs.t();
    let mut counts = vec![0u64; t as usize + 1];
    for &x in obs.counts() {
        counts[x as usize] += 1;
    }
    let n = obs.len();
    Fingerprint {
        t,
        fractions: counts.iter().map(|&c| c as f64 / n as f64).collect(),
        total_count: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_small_example() {
        let obs = ObservationSet::new(2, vec![0, 1, 1, 2]).unwrap();
        let h = fingerprint_of(&obs);
        assert_eq!(h.fractions(), &[0.25, 0.5, 0.25]);
        assert_eq!(h.counts(), vec![1, 2, 1]);
        assert_eq!(h.total_count(), 4);
    }

    #[test]
    fn all_maximal_counts() {
        let obs = ObservationSet::new(3, vec![3, 3, 3]).unwrap();
        assert_eq!(fingerprint_of(&obs).fractions(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn from_fractions_validates() {
        assert!(Fingerprint::from_fractions(vec![0.5, 0.4]).is_err());
        assert!(Fingerprint::from_fractions(vec![1.0]).is_err());
        assert!(Fingerprint::from_fractions(vec![1.5, -0.5]).is_err());
        assert_eq!(Fingerprint::from_fractions(vec![0.5, 0.5]).unwrap().t(), 1);
    }
}

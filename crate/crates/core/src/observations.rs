use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Success counts `X_i` for `N` individuals, each observed over `t` trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationSet {
    t: u32,
    counts: Vec<u32>,
}

impl ObservationSet {
    pub fn new(t: u32, counts: Vec<u32>) -> Result<Self> {
        if t == 0 {
            return Err(invalid("t must be at least 1"));
        }
        if counts.is_empty() {
            return Err(invalid("at least one individual is required"));
        }
        if let Some((i, &x)) = counts.iter().enumerate().find(|(_, &x)| x > t) {
            return Err(invalid(format!("count {x} of individual {i} exceeds t={t}")));
        }
        Ok(Self { t, counts })
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Number of individuals.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Raw per-trial outcomes, one row of `t` Bernoulli results per individual.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialMatrix {
    t: u32,
    n: usize,
    outcomes: Vec<bool>,
}

impl TrialMatrix {
    /// `outcomes` is row-major with `t` entries per individual.
    pub fn new(t: u32, outcomes: Vec<bool>) -> Result<Self> {
        if t == 0 {
            return Err(invalid("t must be at least 1"));
        }
        if outcomes.is_empty() || !outcomes.len().is_multiple_of(t as usize) {
            return Err(invalid("trial outcomes must form complete rows of length t"));
        }
        Ok(Self {
            t,
            n: outcomes.len() / t as usize,
            outcomes,
        })
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let t = rows.first().map_or(0, |r| r.len()) as u32;
        if rows.iter().any(|r| r.len() != t as usize) {
            return Err(invalid("all trial rows must have the same length"));
        }
        Self::new(t, rows.concat())
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn row(&self, i: usize) -> &[bool] {
        let t = self.t as usize;
        &self.outcomes[i * t..(i + 1) * t]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[bool]> {
        self.outcomes.chunks(self.t as usize)
    }

    /// Successes among trials `range` of every individual.
    pub fn partial_counts(&self, range: std::ops::Range<usize>) -> Vec<u32> {
        self.rows()
            .map(|r| r[range.clone()].iter().filter(|&&b| b).count() as u32)
            .collect()
    }

    /// Row sums as an observation set.
    pub fn observations(&self) -> ObservationSet {
        ObservationSet {
            t: self.t,
            counts: self.partial_counts(0..self.t as usize),
        }
    }
}

/// Estimator input: either success counts or the full trial outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observations {
    Counts(ObservationSet),
    Trials(TrialMatrix),
}

impl Observations {
    pub fn counts(&self) -> ObservationSet {
        match self {
            Observations::Counts(o) => o.clone(),
            Observations::Trials(m) => m.observations(),
        }
    }

    pub fn trials(&self) -> Option<&TrialMatrix> {
        match self {
            Observations::Counts(_) => None,
            Observations::Trials(m) => Some(m),
        }
    }

    pub fn t(&self) -> u32 {
        match self {
            Observations::Counts(o) => o.t(),
            Observations::Trials(m) => m.t(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_rows_sum_to_counts() {
        let m = TrialMatrix::from_rows(&[vec![true, false, true], vec![false, false, false]]).unwrap();
        assert_eq!(m.observations().counts(), &[2, 0]);
        assert_eq!(m.partial_counts(0..1), vec![1, 0]);
        assert!(TrialMatrix::from_rows(&[vec![true], vec![true, false]]).is_err());
        assert!(TrialMatrix::new(2, vec![true]).is_err());
    }

    #[test]
    fn rejects_out_of_range_counts() {
        assert!(ObservationSet::new(2, vec![0, 3]).is_err());
        assert!(ObservationSet::new(0, vec![0]).is_err());
        assert!(ObservationSet::new(2, vec![]).is_err());
        assert_eq!(ObservationSet::new(2, vec![0, 2]).unwrap().len(), 2);
    }
}

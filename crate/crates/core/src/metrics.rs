//! Distances between distributions and between fingerprints.

use serde::{Deserialize, Serialize};

use crate::distribution::AtomicDistribution;
use crate::error::{invalid, Result};
use crate::fingerprint::Fingerprint;

/// Wasserstein-1 distance `∫|F_P - F_Q|` on `[0, 1]`.
///
/// Both CDFs are step functions, so the integral is a finite sum over the
/// merged breakpoints.
pub fn wasserstein1(p: &AtomicDistribution, q: &AtomicDistribution) -> f64 {
    let (px, pw) = (p.locations(), p.masses());
    let (qx, qw) = (q.locations(), q.masses());
    let (mut i, mut j) = (0, 0);
    let mut diff = 0.0f64; // F_P - F_Q just right of `prev`
    let mut prev: Option<f64> = None;
    let mut total = 0.0;
    while i < px.len() || j < qx.len() {
        let next = match (px.get(i), qx.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        if let Some(x0) = prev {
            total += diff.abs() * (next - x0);
        }
        while i < px.len() && px[i] == next {
            diff += pw[i];
            i += 1;
        }
        while j < qx.len() && qx[j] == next {
            diff -= qw[j];
            j += 1;
        }
        prev = Some(next);
    }
    total
}

/// `KL(A, B) = Σ A_s ln(A_s / B_s)`; `+inf` when `B` misses mass of `A`.
pub fn kl_divergence(a: &Fingerprint, b: &Fingerprint) -> Result<f64> {
    a.check_same_t(b)?;
    Ok(kl_slices(a.fractions(), b.fractions()))
}

pub(crate) fn kl_slices(a: &[f64], b: &[f64]) -> f64 {
    let mut kl = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        if x > 0.0 {
            if y <= 0.0 {
                return f64::INFINITY;
            }
            kl += x * (x / y).ln();
        }
    }
    kl.max(0.0)
}

/// Half-normalised total variation `½ Σ |A_s - B_s|`.
pub fn total_variation_fingerprint(a: &Fingerprint, b: &Fingerprint) -> Result<f64> {
    a.check_same_t(b)?;
    Ok(0.5 * l1(a.fractions(), b.fractions()))
}

pub(crate) fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Moments `μ_1..μ_k` about `shift`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    pub shift: f64,
    pub values: Vec<f64>,
}

impl MomentVector {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// Re-expresses the moments about a different centre via the binomial
    /// expansion `(x - c)^k = Σ_l C(k,l) (x - s)^l (s - c)^(k-l)`.
    pub fn reshift(&self, new_shift: f64) -> MomentVector {
        let d = self.shift - new_shift;
        let mu = |l: usize| if l == 0 { 1.0 } else { self.values[l - 1] };
        let values = (1..=self.order())
            .map(|k| {
                let mut c = 1.0; // C(k, l)
                let mut acc = 0.0;
                for l in 0..=k {
                    acc += c * mu(l) * d.powi((k - l) as i32);
                    c = c * (k - l) as f64 / (l + 1) as f64;
                }
                acc
            })
            .collect();
        MomentVector {
            shift: new_shift,
            values,
        }
    }
}

/// `μ_k = Σ mass (x - shift)^k` for `k = 1..=k_max`.
pub fn moments(p: &AtomicDistribution, k_max: usize, shift: f64) -> Result<MomentVector> {
    if k_max == 0 {
        return Err(invalid("k_max must be at least 1"));
    }
    let mut values = vec![0.0; k_max];
    for (x, w) in p.atoms() {
        let d = x - shift;
        let mut pow = 1.0;
        for v in values.iter_mut() {
            pow *= d;
            *v += w * pow;
        }
    }
    Ok(MomentVector { shift, values })
}

/// Whether Pinsker's inequality `KL >= ||A - B||_1^2 / (2 ln 2)` holds for the
/// pair, with KL measured in bits.
pub fn pinsker_check(a: &Fingerprint, b: &Fingerprint) -> Result<bool> {
    let kl = kl_divergence(a, b)? / std::f64::consts::LN_2;
    let d = l1(a.fractions(), b.fractions());
    Ok(kl >= d * d / (2.0 * std::f64::consts::LN_2) - 1e-12)
}

/// One metric result as emitted by the command-line tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub metric: String,
    pub value: f64,
    pub details: serde_json::Value,
}

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::distribution::AtomicDistribution;
use crate::error::{invalid, Error, Result};

/// Cells used to discretise continuous truths for W1 evaluation.
pub const REFERENCE_CELLS: usize = 100_000;
/// Quantile table resolution for the truncated Gaussian sampler.
pub const QUANTILE_TABLE: usize = 100_000;

/// Ground-truth mixing distribution of a synthetic scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Truth {
    Spike(f64),
    /// Equal masses at 0.25, 0.5, 0.75.
    ThreeSpikes,
    /// Gaussian conditioned on `[0, 1]`.
    TruncatedGaussian { mean: f64, variance: f64 },
    Uniform,
    Custom(AtomicDistribution),
}

impl Truth {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Truth::Spike(c) if !(0.0..=1.0).contains(&c) => Err(invalid("spike location must lie in [0, 1]")),
            Truth::TruncatedGaussian { variance, mean } if !(variance > 0.0) || !mean.is_finite() => {
                Err(invalid("truncated gaussian needs a finite mean and positive variance"))
            }
            _ => Ok(()),
        }
    }

    /// Atomic stand-in used when measuring W1 to the truth. Continuous
    /// truths are represented by cell midpoints carrying the cell's mass.
    pub fn reference_distribution(&self) -> Result<AtomicDistribution> {
        self.validate()?;
        match self {
            Truth::Spike(c) => AtomicDistribution::point_mass(*c),
            Truth::ThreeSpikes => AtomicDistribution::normalized([(0.25, 1.0), (0.5, 1.0), (0.75, 1.0)]),
            Truth::Custom(d) => Ok(d.clone()),
            Truth::Uniform => cells(|x| x),
            Truth::TruncatedGaussian { mean, variance } => {
                let normal = Normal::new(*mean, variance.sqrt()).map_err(|e| invalid(e.to_string()))?;
                cells(|x| normal.cdf(x))
            }
        }
    }

    pub fn sampler(&self) -> Result<TruthSampler> {
        self.validate()?;
        Ok(match self {
            Truth::Spike(c) => TruthSampler::Atoms(AtomicDistribution::point_mass(*c)?),
            Truth::ThreeSpikes | Truth::Custom(_) => TruthSampler::Atoms(self.reference_distribution()?),
            Truth::Uniform => TruthSampler::Uniform,
            Truth::TruncatedGaussian { mean, variance } => {
                let normal = Normal::new(*mean, variance.sqrt()).map_err(|e| invalid(e.to_string()))?;
                let (lo, hi) = (normal.cdf(0.0), normal.cdf(1.0));
                let table = (0..=QUANTILE_TABLE)
                    .map(|k| {
                        let u = lo + (hi - lo) * k as f64 / QUANTILE_TABLE as f64;
                        normal.inverse_cdf(u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)).clamp(0.0, 1.0)
                    })
                    .collect();
                TruthSampler::Quantiles(table)
            }
        })
    }
}

fn cells(cdf: impl Fn(f64) -> f64) -> Result<AtomicDistribution> {
    let n = REFERENCE_CELLS;
    let atoms = (0..n).map(|k| {
        let (a, b) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
        ((a + b) / 2.0, cdf(b) - cdf(a))
    });
    AtomicDistribution::normalized(atoms)
}

/// Draws `p_i` from a [`Truth`].
#[derive(Debug, Clone)]
pub enum TruthSampler {
    Atoms(AtomicDistribution),
    Uniform,
    /// Inverse CDF tabulated at equally spaced probabilities.
    Quantiles(Vec<f64>),
}

impl TruthSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            TruthSampler::Uniform => rng.gen::<f64>(),
            TruthSampler::Atoms(d) => {
                if d.len() == 1 {
                    return d.locations()[0];
                }
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (x, w) in d.atoms() {
                    acc += w;
                    if u < acc {
                        return x;
                    }
                }
                *d.locations().last().unwrap()
            }
            TruthSampler::Quantiles(table) => {
                let pos = rng.gen::<f64>() * (table.len() - 1) as f64;
                let k = (pos.floor() as usize).min(table.len() - 2);
                let frac = pos - k as f64;
                table[k] + frac * (table[k + 1] - table[k])
            }
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truth::Spike(c) => write!(f, "spike:{c}"),
            Truth::ThreeSpikes => f.write_str("three_spikes"),
            Truth::TruncatedGaussian { mean, variance } => write!(f, "truncated_gaussian:{mean}:{variance}"),
            Truth::Uniform => f.write_str("uniform"),
            Truth::Custom(_) => f.write_str("custom"),
        }
    }
}

impl FromStr for Truth {
    type Err = Error;

    /// `spike:<c>`, `three_spikes`, `truncated_gaussian[:<mean>:<variance>]`
    /// (default 0.5 and 0.1), or `uniform`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<f64> = parts
            .map(|p| p.trim().parse::<f64>().map_err(|_| invalid(format!("bad number '{p}' in truth '{s}'"))))
            .collect::<Result<_>>()?;
        let truth = match (name, args.as_slice()) {
            ("spike", [c]) => Truth::Spike(*c),
            ("three_spikes", []) => Truth::ThreeSpikes,
            ("truncated_gaussian", []) => Truth::TruncatedGaussian {
                mean: 0.5,
                variance: 0.1,
            },
            ("truncated_gaussian", [mean, variance]) => Truth::TruncatedGaussian {
                mean: *mean,
                variance: *variance,
            },
            ("uniform", []) => Truth::Uniform,
            _ => {
                return Err(invalid(format!(
                    "unknown truth '{s}'; expected spike:<c>, three_spikes, truncated_gaussian[:<mean>:<var>] or uniform"
                )))
            }
        };
        truth.validate()?;
        Ok(truth)
    }
}

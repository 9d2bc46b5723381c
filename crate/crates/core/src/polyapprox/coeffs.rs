//! Bernstein coefficients `C(t, m, j)` of the shifted Chebyshev polynomials:
//! `T̃_m(x) = Σ_j C(t, m, j) B_j^t(x)` with
//! `C(t, m, j) = Σ_l (-1)^(m-l) C(2m, 2l) C(t-m, j-l) / C(t, j)`.
//!
//! The alternating sum is accumulated with compensated summation, from plain
//! products while they fit a float and from log-space terms otherwise; the
//! result is stored as a sign and a log magnitude.

use serde::Serialize;

use super::chebyshev::ChebyshevFit;
use crate::error::{invalid, Result};
use crate::special::{bernstein, binomial, ln_binomial};

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    t: u32,
    m_max: u32,
    /// -1, 0 or 1
    signs: Vec<i8>,
    log_magnitudes: Vec<f64>,
}

impl CoeffTable {
    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    fn index(&self, m: u32, j: u32) -> usize {
        assert!(m <= self.m_max && j <= self.t, "C({}, {m}, {j}) not in table", self.t);
        m as usize * (self.t as usize + 1) + j as usize
    }

    pub fn sign(&self, m: u32, j: u32) -> i8 {
        self.signs[self.index(m, j)]
    }

    /// `ln |C(t, m, j)|`; `-inf` for a zero coefficient.
    pub fn log_abs(&self, m: u32, j: u32) -> f64 {
        self.log_magnitudes[self.index(m, j)]
    }

    pub fn get(&self, m: u32, j: u32) -> f64 {
        let i = self.index(m, j);
        self.signs[i] as f64 * self.log_magnitudes[i].exp()
    }

    /// Row `m` as plain floats.
    pub fn row(&self, m: u32) -> Vec<f64> {
        (0..=self.t).map(|j| self.get(m, j)).collect()
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in terms {
        let s = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - s) + x;
        } else {
            comp += (x - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

pub fn coeff_table(t: u32, m_max: u32) -> Result<CoeffTable> {
    if t == 0 {
        return Err(invalid("coefficient table needs t >= 1"));
    }
    if m_max > t {
        return Err(invalid(format!("m_max={m_max} exceeds t={t}")));
    }
    let width = t as usize + 1;
    let mut signs = vec![0i8; (m_max as usize + 1) * width];
    let mut log_magnitudes = vec![f64::NEG_INFINITY; signs.len()];
    for m in 0..=m_max {
        for j in 0..=t {
            let lo = j.saturating_sub(t - m);
            let hi = j.min(m);
            let sign = |l: u32| if (m - l).is_multiple_of(2) { 1.0 } else { -1.0 };
            // plain products of accurate binomials while they stay finite
            let denom = binomial(t as u64, j as u64);
            let direct: Vec<f64> = (lo..=hi)
                .map(|l| {
                    sign(l) * (binomial(2 * m as u64, 2 * l as u64) / denom)
                        * binomial((t - m) as u64, (j - l) as u64)
                })
                .collect();
            let (scaled, peak) = if direct.iter().all(|v| v.is_finite()) && denom.is_finite() {
                let peak = direct.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                (compensated_sum(direct.iter().map(|v| v / peak)), peak.ln())
            } else {
                let ln_tj = ln_binomial(t as u64, j as u64);
                let logs: Vec<(f64, f64)> = (lo..=hi)
                    .map(|l| {
                        let ln = ln_binomial(2 * m as u64, 2 * l as u64)
                            + ln_binomial((t - m) as u64, (j - l) as u64)
                            - ln_tj;
                        (sign(l), ln)
                    })
                    .collect();
                let peak = logs.iter().map(|&(_, ln)| ln).fold(f64::NEG_INFINITY, f64::max);
                (compensated_sum(logs.iter().map(|&(s, ln)| s * (ln - peak).exp())), peak)
            };
            let i = m as usize * width + j as usize;
            // exact cancellation shows up as round-off far below the largest term
            if scaled.abs() > 1e-13 {
                signs[i] = scaled.signum() as i8;
                log_magnitudes[i] = scaled.abs().ln() + peak;
            }
        }
    }
    Ok(CoeffTable {
        t,
        m_max,
        signs,
        log_magnitudes,
    })
}

/// Sweep of the coefficient bounds for one `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffBoundRow {
    pub t: u32,
    pub m: u32,
    pub max_abs_coeff: f64,
    pub l2_norm: f64,
    /// `(t + 1) e^(m^2 / t)`
    pub lemma4_bound: f64,
    /// `e^(m^2 / t)`, the conjectured sharper bound.
    pub conjecture_bound: f64,
    /// Both the entrywise and the L2 form hold.
    pub lemma4_ok: bool,
    pub conjecture_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffBoundReport {
    pub t: u32,
    pub rows: Vec<CoeffBoundRow>,
    /// Rows violating `(t + 1) e^(m^2 / t)` in either form.
    pub violations: usize,
    /// Informational only.
    pub conjecture_violations: usize,
    /// Largest `max_abs_coeff / lemma4_bound` over `m`.
    pub max_ratio: f64,
}

impl CoeffBoundReport {
    /// Row with the largest ratio to the proven bound.
    pub fn worst_row(&self) -> &CoeffBoundRow {
        self.rows
            .iter()
            .max_by(|a, b| {
                (a.max_abs_coeff / a.lemma4_bound).total_cmp(&(b.max_abs_coeff / b.lemma4_bound))
            })
            .expect("report has rows")
    }
}

/// Checks `|C(t,m,j)| <= (t+1) e^(m^2/t)` and `sqrt(Σ_j C^2) <= (t+1) e^(m^2/t)`
/// for every `m, j <= t`, working with log magnitudes. Violations are
/// reported, not raised.
pub fn verify_coeff_bound(t: u32) -> Result<CoeffBoundReport> {
    let table = coeff_table(t, t)?;
    let mut rows = Vec::with_capacity(t as usize + 1);
    let mut max_ratio = 0.0f64;
    for m in 0..=t {
        let log_bound = ((t + 1) as f64).ln() + (m * m) as f64 / t as f64;
        let log_conj = (m * m) as f64 / t as f64;
        let logs: Vec<f64> = (0..=t).map(|j| table.log_abs(m, j)).collect();
        let log_max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_l2 = log_max + 0.5 * logs.iter().map(|&l| (2.0 * (l - log_max)).exp()).sum::<f64>().ln();
        let slack = 1e-12;
        let lemma4_ok = log_max <= log_bound + slack && log_l2 <= log_bound + slack;
        let conjecture_ok = log_max <= log_conj + slack;
        max_ratio = max_ratio.max((log_max - log_bound).exp());
        rows.push(CoeffBoundRow {
            t,
            m,
            max_abs_coeff: log_max.exp(),
            l2_norm: log_l2.exp(),
            lemma4_bound: log_bound.exp(),
            conjecture_bound: log_conj.exp(),
            lemma4_ok,
            conjecture_ok,
        });
    }
    Ok(CoeffBoundReport {
        t,
        violations: rows.iter().filter(|r| !r.lemma4_ok).count(),
        conjecture_violations: rows.iter().filter(|r| !r.conjecture_ok).count(),
        max_ratio,
        rows,
    })
}

/// Degree-`t` Bernstein coefficients of a Chebyshev fit.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinCoeffs {
    pub t: u32,
    pub coefficients: Vec<f64>,
    pub max_abs: f64,
    /// `sqrt(k) (t + 1) e^(k^2 / t)` for fit degree `k`.
    pub bound: f64,
    pub within_bound: bool,
}

impl BernsteinCoeffs {
    pub fn eval(&self, x: f64) -> f64 {
        bernstein_eval(&self.coefficients, x)
    }
}

/// `b_j = Σ_m a_m C(t, m, j)`, so that `Σ_j b_j B_j^t` equals the fit.
pub fn assemble_bernstein_coeffs(fit: &ChebyshevFit, t: u32) -> Result<BernsteinCoeffs> {
    let k = fit.degree as u32;
    if k > t {
        return Err(invalid(format!("fit degree {k} exceeds Bernstein degree {t}")));
    }
    let table = coeff_table(t, k)?;
    let coefficients: Vec<f64> = (0..=t)
        .map(|j| {
            compensated_sum(
                fit.coefficients
                    .iter()
                    .enumerate()
                    .map(|(m, &a)| a * table.get(m as u32, j)),
            )
        })
        .collect();
    let max_abs = coefficients.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let bound = (k as f64).sqrt() * (t + 1) as f64 * ((k * k) as f64 / t as f64).exp();
    Ok(BernsteinCoeffs {
        t,
        max_abs,
        bound,
        within_bound: max_abs <= bound,
        coefficients,
    })
}

/// `Σ_j b_j B_j^t(x)` with `t = b.len() - 1`.
pub fn bernstein_eval(coefficients: &[f64], x: f64) -> f64 {
    let t = (coefficients.len() - 1) as u32;
    coefficients
        .iter()
        .enumerate()
        .map(|(j, &b)| b * bernstein(t, j as u32, x))
        .sum()
}

/// Re-expresses a degree-`m` Bernstein expansion in degree `t >= m` using
/// `B_i^m = Σ_j [C(m,i) C(t-m,j-i) / C(t,j)] B_j^t`.
pub fn degree_raise(coefficients: &[f64], t: u32) -> Result<Vec<f64>> {
    if coefficients.is_empty() {
        return Err(invalid("empty Bernstein expansion"));
    }
    let m = (coefficients.len() - 1) as u32;
    if t < m {
        return Err(invalid(format!("cannot lower degree {m} to {t}")));
    }
    Ok((0..=t)
        .map(|j| {
            let lo = j.saturating_sub(t - m);
            (lo..=j.min(m))
                .map(|i| {
                    let w = (ln_binomial(m as u64, i as u64) + ln_binomial((t - m) as u64, (j - i) as u64)
                        - ln_binomial(t as u64, j as u64))
                    .exp();
                    coefficients[i as usize] * w
                })
                .sum()
        })
        .collect())
}

/// Classical Bernstein approximation: coefficients `f(j / t)`.
pub fn bernstein_sample_coeffs(f: impl Fn(f64) -> f64, t: u32) -> Vec<f64> {
    (0..=t).map(|j| f(j as f64 / t as f64)).collect()
}

//! The k-th derivative of `B_j^t` at `x = 1/2` through Kravchuk polynomials:
//! `B_j^{(k)}(1/2) / k! = (-1)^k 2^(k-t) C(t, k) K_j(k; t)` with
//! `K_j(k; t) = Σ_i (-1)^i C(k, i) C(t-k, j-i)`.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::special::ln_binomial;

/// Above this `t` the sums are done in floating point.
pub const EXACT_T_MAX: u32 = 30;

const GENERATING_POINTS: [f64; 3] = [-0.5, 0.5, 2.0];
const GENERATING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KravchukReport {
    pub t: u32,
    pub k: u32,
    /// `Σ_j |B_j^{(k)}(1/2)| / k!`
    pub abs_sum: f64,
    /// `sqrt(t) e^k t^(k/2) / k^(k/2)`
    pub bound: f64,
    pub holds: bool,
    /// Worst relative error of `Σ_j K_j z^j = (1+z)^(t-k) (1-z)^k`.
    pub identity_error: f64,
    pub identity_ok: bool,
    pub exact: bool,
}

/// `K_j(k; t)` for `j = 0..=t`, exact for `t <= 30`.
pub fn kravchuk_exact(t: u32, k: u32) -> Result<Vec<i128>> {
    if t > EXACT_T_MAX || k > t {
        return Err(invalid(format!("exact Kravchuk values need k <= t <= {EXACT_T_MAX}")));
    }
    let binom = |n: u32, r: u32| -> i128 {
        if r > n {
            return 0;
        }
        (0..r).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
    };
    Ok((0..=t)
        .map(|j| {
            (0..=j.min(k))
                .map(|i| {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    sign * binom(k, i) * binom(t - k, j - i)
                })
                .sum()
        })
        .collect())
}

/// `K_j(k; t)` in floating point.
pub fn kravchuk_float(t: u32, k: u32) -> Vec<f64> {
    (0..=t)
        .map(|j| {
            let lo = j.saturating_sub(t - k);
            (lo..=j.min(k))
                .map(|i| {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    sign * (ln_binomial(k as u64, i as u64) + ln_binomial((t - k) as u64, (j - i) as u64)).exp()
                })
                .sum()
        })
        .collect()
}

pub fn kravchuk_bound_check(t: u32, k: u32) -> Result<KravchukReport> {
    if t == 0 || k == 0 || k > t {
        return Err(invalid(format!("need 1 <= k <= t, got k={k}, t={t}")));
    }
    let exact = t <= EXACT_T_MAX;
    let values: Vec<f64> = if exact {
        kravchuk_exact(t, k)?.into_iter().map(|v| v as f64).collect()
    } else {
        kravchuk_float(t, k)
    };
    let ln_scale = ln_binomial(t as u64, k as u64) - (t - k) as f64 * std::f64::consts::LN_2;
    let abs_sum = if exact {
        let total: i128 = kravchuk_exact(t, k)?.iter().map(|v| v.abs()).sum();
        total as f64 * ln_scale.exp()
    } else {
        values.iter().map(|v| v.abs()).sum::<f64>() * ln_scale.exp()
    };
    let (tf, kf) = (t as f64, k as f64);
    let bound = (0.5 * tf.ln() + kf + 0.5 * kf * tf.ln() - 0.5 * kf * kf.ln()).exp();

    let identity_error = GENERATING_POINTS
        .iter()
        .map(|&z| {
            let (mut lhs, mut scale, mut zp) = (0.0, 0.0, 1.0);
            for v in &values {
                lhs += v * zp;
                scale += (v * zp).abs();
                zp *= z;
            }
            let rhs = (1.0 + z).powi((t - k) as i32) * (1.0 - z).powi(k as i32);
            (lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);

    Ok(KravchukReport {
        t,
        k,
        abs_sum,
        bound,
        holds: abs_sum <= bound,
        identity_error,
        identity_ok: identity_error <= GENERATING_TOL,
        exact,
    })
}

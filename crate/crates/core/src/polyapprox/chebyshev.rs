use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Shifted Chebyshev polynomial `T̃_m(x) = T_m(2x - 1)` by the three-term
/// recurrence `T̃_m = (4x - 2) T̃_{m-1} - T̃_{m-2}`.
pub fn shifted_chebyshev(m: usize, x: f64) -> f64 {
    let y = 2.0 * x - 1.0;
    match m {
        0 => 1.0,
        1 => y,
        _ => {
            let (mut prev, mut cur) = (1.0, y);
            for _ in 2..=m {
                let next = 2.0 * y * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Degree-`k` approximation `Σ a_m T̃_m` of a function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevFit {
    pub degree: usize,
    pub coefficients: Vec<f64>,
    /// Largest deviation from the target over `10k + 1` equispaced points.
    pub uniform_error: f64,
}

impl ChebyshevFit {
    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let y = 2.0 * x - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &a in self.coefficients.iter().skip(1).rev() {
            let b0 = a + 2.0 * y * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coefficients[0] + y * b1 - b2
    }

    pub fn l2_norm(&self) -> f64 {
        self.coefficients.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

/// Interpolates `f` at the `k + 1` shifted Chebyshev points; the
/// coefficients come from the discrete cosine projection at those points.
pub fn chebyshev_fit(f: impl Fn(f64) -> f64, k: usize) -> Result<ChebyshevFit> {
    if k == 0 {
        return Err(invalid("Chebyshev fit degree must be at least 1"));
    }
    let n = k + 1;
    let angles: Vec<f64> = (0..n).map(|i| PI * (i as f64 + 0.5) / n as f64).collect();
    let values: Vec<f64> = angles.iter().map(|&th| f((1.0 + th.cos()) / 2.0)).collect();
    let coefficients = (0..=k)
        .map(|m| {
            let s: f64 = angles
                .iter()
                .zip(&values)
                .map(|(&th, &v)| v * (m as f64 * th).cos())
                .sum();
            let a = 2.0 * s / n as f64;
            if m == 0 {
                a / 2.0
            } else {
                a
            }
        })
        .collect();
    let mut fit = ChebyshevFit {
        degree: k,
        coefficients,
        uniform_error: 0.0,
    };
    let points = 10 * k;
    fit.uniform_error = (0..=points)
        .map(|i| {
            let x = i as f64 / points as f64;
            (f(x) - fit.eval(x)).abs()
        })
        .fold(0.0, f64::max);
    Ok(fit)
}

//! Log-space binomial coefficients and Bernstein basis values.

use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

const TABLE_LEN: usize = 4096;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(TABLE_LEN);
        let mut acc = 0.0f64;
        table.push(0.0);
        for k in 1..TABLE_LEN {
            acc += (k as f64).ln();
            table.push(acc);
        }
        table
    })
}

/// `ln(n!)`: accumulated `ln k` for moderate `n`, log-gamma beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        ln_factorial_table()[n as usize]
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Rows of Pascal's triangle kept in memory; row 1023 still fits an `f64`.
const PASCAL_ROWS: usize = 1024;

fn pascal() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(PASCAL_ROWS * (PASCAL_ROWS + 1) / 2);
        table.push(1.0);
        for n in 1..PASCAL_ROWS {
            let prev = (n - 1) * n / 2;
            table.push(1.0);
            for k in 1..n {
                let v = table[prev + k - 1] + table[prev + k];
                table.push(v);
            }
            table.push(1.0);
        }
        table
    })
}

fn pascal_entry(n: u64, k: u64) -> f64 {
    let (n, k) = (n as usize, k as usize);
    pascal()[n * (n + 1) / 2 + k]
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    if (n as usize) < PASCAL_ROWS {
        return pascal_entry(n, k).ln();
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `C(n, k)` as a float: summed from Pascal's triangle up to row 1023 (exact
/// while below `2^53`), through log-gamma beyond.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if (n as usize) < PASCAL_ROWS {
        return pascal_entry(n, k);
    }
    ln_binomial(n, k).exp()
}

/// Bernstein basis value `C(t,s) x^s (1-x)^(t-s)` evaluated in log space.
pub fn bernstein(t: u32, s: u32, x: f64) -> f64 {
    if s > t {
        return 0.0;
    }
    let (t64, s64) = (t as u64, s as u64);
    if x <= 0.0 {
        return if s == 0 { 1.0 } else { 0.0 };
    }
    if x >= 1.0 {
        return if s == t { 1.0 } else { 0.0 };
    }
    let ln = ln_binomial(t64, s64) + s as f64 * x.ln() + (t - s) as f64 * (-x).ln_1p();
    ln.exp()
}

/// Unbiased estimator of `p^l` from `X ~ Binomial(n, p)`: `C(x,l)/C(n,l)`.
pub fn falling_ratio(x: u32, n: u32, l: u32) -> f64 {
    if l > x {
        return 0.0;
    }
    // product form is exact enough and avoids ln_gamma round-off for small l
    let mut r = 1.0;
    for i in 0..l {
        r *= (x - i) as f64 / (n - i) as f64;
    }
    r
}

//! Lawson-Hanson non-negative least squares: `min ||Ax - b||, x >= 0`.

use nalgebra::{DMatrix, DVector};

/// `a` is given column-major as a list of columns of equal length.
pub fn nnls(columns: &[Vec<f64>], b: &[f64], max_iter: usize) -> Vec<f64> {
    let n = columns.len();
    let rows = b.len();
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let tol = 1e-12 * columns
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);

    let residual = |x: &[f64]| -> Vec<f64> {
        let mut r = b.to_vec();
        for (c, &xi) in columns.iter().zip(x) {
            if xi != 0.0 {
                for (ri, ci) in r.iter_mut().zip(c) {
                    *ri -= ci * xi;
                }
            }
        }
        r
    };
    let solve_passive = |passive: &[bool]| -> (Vec<usize>, Vec<f64>) {
        let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let a = DMatrix::from_fn(rows, idx.len(), |r, c| columns[idx[c]][r]);
        let rhs = DVector::from_column_slice(b);
        let z = a
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map(|z| z.iter().copied().collect())
            .unwrap_or_else(|_| vec![0.0; idx.len()]);
        (idx, z)
    };

    for _ in 0..max_iter {
        let r = residual(&x);
        let w: Vec<f64> = columns.iter().map(|c| c.iter().zip(&r).map(|(a, b)| a * b).sum()).collect();
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;
        loop {
            let (idx, z) = solve_passive(&passive);
            if z.iter().all(|&v| v > 0.0) {
                for (&i, &v) in idx.iter().zip(&z) {
                    x[i] = v;
                }
                break;
            }
            // step back towards the feasible region until a variable hits zero
            let mut alpha = f64::INFINITY;
            for (&i, &v) in idx.iter().zip(&z) {
                if v <= 0.0 {
                    alpha = alpha.min(x[i] / (x[i] - v));
                }
            }
            for (&i, &v) in idx.iter().zip(&z) {
                x[i] += alpha * (v - x[i]);
                if x[i] <= tol * 1e-3 {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

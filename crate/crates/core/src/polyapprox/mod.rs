//! Polynomial approximation tools: shifted Chebyshev fits, their Bernstein
//! coefficients with magnitude bounds, and Kravchuk derivative bounds.

mod chebyshev;
mod coeffs;
mod kravchuk;

pub use chebyshev::{chebyshev_fit, shifted_chebyshev, ChebyshevFit};
pub use coeffs::{
    assemble_bernstein_coeffs, bernstein_eval, bernstein_sample_coeffs, coeff_table, degree_raise,
    verify_coeff_bound, BernsteinCoeffs, CoeffBoundReport, CoeffBoundRow, CoeffTable,
};
pub use kravchuk::{kravchuk_bound_check, kravchuk_exact, kravchuk_float, KravchukReport, EXACT_T_MAX};

/// Largest `|p(z)|` over `samples` equally spaced points of the unit circle
/// for `p(z) = Σ c_i z^i`.
pub fn circle_sup_norm(coefficients: &[f64], samples: usize) -> f64 {
    (0..samples)
        .map(|s| {
            let th = 2.0 * std::f64::consts::PI * s as f64 / samples as f64;
            let (mut re, mut im) = (0.0, 0.0);
            for (i, c) in coefficients.iter().enumerate() {
                re += c * (i as f64 * th).cos();
                im += c * (i as f64 * th).sin();
            }
            re.hypot(im)
        })
        .fold(0.0, f64::max)
}

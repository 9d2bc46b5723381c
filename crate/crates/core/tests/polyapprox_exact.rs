use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use popdist::polyapprox::*;
use popdist::special::bernstein;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn binom(n: u32, r: u32) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    (0..r).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn exact_c(t: u32, m: u32, j: u32) -> BigRational {
    let lo = j.saturating_sub(t - m);
    let mut num = BigInt::zero();
    for l in lo..=j.min(m) {
        let term = binom(2 * m, 2 * l) * binom(t - m, j - l);
        if (m - l).is_multiple_of(2) {
            num += term;
        } else {
            num -= term;
        }
    }
    BigRational::new(num, binom(t, j))
}

#[test]
fn coeff_table_matches_rational_arithmetic() {
    for t in 1..=25 {
        let table = coeff_table(t, t).unwrap();
        for m in 0..=t {
            for j in 0..=t {
                let exact = exact_c(t, m, j);
                let e = exact.to_f64().unwrap();
                let got = table.get(m, j);
                assert!(
                    (got - e).abs() <= 1e-11 * e.abs().max(1.0),
                    "C({t},{m},{j}) = {got}, exact {e}"
                );
                if exact.is_zero() {
                    assert_eq!(table.sign(m, j), 0, "C({t},{m},{j}) should vanish");
                } else {
                    assert_eq!(table.sign(m, j) as i32, if exact.is_negative() { -1 } else { 1 });
                }
            }
        }
    }
}

#[test]
fn coefficient_bound_sweep_up_to_fifty() {
    for t in 1..=50 {
        let r = verify_coeff_bound(t).unwrap();
        assert_eq!(r.violations, 0, "t={t}");
        assert_eq!(r.rows.len(), t as usize + 1);
        assert!(r.max_ratio <= 1.0);
    }
}

/// `B_j^{(k)}(1/2) / k!` by expanding `C(t,j) x^j (1-x)^(t-j)` into monomials.
fn exact_derivative(t: u32, j: u32, k: u32) -> BigRational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut total = BigRational::zero();
    for i in 0..=(t - j) {
        let n = j + i;
        if n < k {
            continue;
        }
        let mut coef = binom(t, j) * binom(t - j, i) * binom(n, k);
        if i % 2 == 1 {
            coef = -coef;
        }
        let mut term = BigRational::from_integer(coef);
        for _ in 0..(n - k) {
            term *= &half;
        }
        total += term;
    }
    total
}

#[test]
fn kravchuk_sum_matches_direct_differentiation() {
    for t in 1..=14 {
        for k in 1..=t {
            let mut sum = BigRational::zero();
            for j in 0..=t {
                sum += exact_derivative(t, j, k).abs();
            }
            let exact = sum.to_f64().unwrap();
            let r = kravchuk_bound_check(t, k).unwrap();
            assert!((r.abs_sum - exact).abs() <= 1e-12 * exact, "t={t} k={k}: {} vs {exact}", r.abs_sum);
        }
    }
}

#[test]
fn kravchuk_bound_holds_exhaustively() {
    for t in 1..=EXACT_T_MAX {
        for k in 1..=t {
            let r = kravchuk_bound_check(t, k).unwrap();
            assert!(r.exact);
            assert!(r.holds, "t={t} k={k}: {} > {}", r.abs_sum, r.bound);
            assert!(r.identity_ok, "t={t} k={k}: identity error {}", r.identity_error);
        }
    }
}

#[test]
fn first_order_kravchuk() {
    let r = kravchuk_bound_check(1, 1).unwrap();
    assert!((r.abs_sum - 2.0).abs() < 1e-15);
    assert!((r.bound - std::f64::consts::E).abs() < 1e-12);
    for t in 1..=30 {
        let r = kravchuk_bound_check(t, 1).unwrap();
        assert!(r.abs_sum <= t as f64 * std::f64::consts::E);
    }
}

#[test]
fn kravchuk_values_sum_to_zero() {
    for t in 1..=30 {
        for k in 1..=t {
            assert_eq!(kravchuk_exact(t, k).unwrap().iter().sum::<i128>(), 0);
        }
    }
}

#[test]
fn degree_raising_preserves_basis_polynomials() {
    for t in 2..=20u32 {
        for m in 1..t {
            for i in 0..=m {
                let mut unit = vec![0.0; m as usize + 1];
                unit[i as usize] = 1.0;
                let raised = degree_raise(&unit, t).unwrap();
                for p in 0..100 {
                    let x = p as f64 / 99.0;
                    let d = bernstein_eval(&raised, x) - bernstein(m, i, x);
                    assert!(d.abs() <= 1e-10, "m={m} i={i} t={t} x={x}");
                }
            }
        }
    }
}

#[test]
fn bernstein_sampling_error_decay() {
    for t in [16u32, 64, 256] {
        let b = bernstein_sample_coeffs(|x| (x - 0.5).abs(), t);
        let err = (0..=2000)
            .map(|i| {
                let x = i as f64 / 2000.0;
                (bernstein_eval(&b, x) - (x - 0.5).abs()).abs()
            })
            .fold(0.0, f64::max);
        assert!(err <= 1.5 / (t as f64).sqrt(), "t={t}: {err}");
    }
}

#[test]
fn circle_samples_bound_coefficient_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let degree = rng.gen_range(0..=16);
        let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let c = circle_sup_norm(&coeffs, 64);
        let energy: f64 = coeffs.iter().map(|a| a * a).sum();
        assert!(energy <= c * c + 1e-8);
    }
}

#[test]
fn assembled_coefficients_at_full_degree() {
    let fit = chebyshev_fit(|x| (x - 0.5).abs(), 12).unwrap();
    let b = assemble_bernstein_coeffs(&fit, 12).unwrap();
    assert!(b.max_abs <= 12f64.sqrt() * 4096.0);
    for i in 0..=500 {
        let x = i as f64 / 500.0;
        assert!((b.eval(x) - fit.eval(x)).abs() <= 1e-8);
    }
}

proptest! {
    #[test]
    fn partition_of_unity(t in 1u32..300, x in 0.0f64..=1.0) {
        let s: f64 = (0..=t).map(|j| bernstein(t, j, x)).sum();
        prop_assert!((s - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn lipschitz_fits_have_bounded_coefficients(c in 0.0f64..=1.0, k in 1usize..40) {
        let fit = chebyshev_fit(|x| (x - c).abs() - 0.5, k).unwrap();
        prop_assert!(fit.l2_norm() <= 1.05, "norm {}", fit.l2_norm());
    }

    #[test]
    fn assembled_polynomial_matches_fit(c in 0.0f64..=1.0, k in 1usize..10, extra in 0u32..40) {
        let t = k as u32 + extra;
        let fit = chebyshev_fit(|x| (x - c).abs() - 0.5, k).unwrap();
        let b = assemble_bernstein_coeffs(&fit, t).unwrap();
        prop_assert!(b.within_bound);
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            prop_assert!((b.eval(x) - fit.eval(x)).abs() <= 1e-8);
        }
    }
}

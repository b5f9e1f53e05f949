//! Special functions against exact or independent references.

use lbharm_core::specfun::{laguerre_poly, laguerre_poly_sum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// L_m^α(x) summed exactly in rational arithmetic; α = a_num/2, x = x_num/4.
fn laguerre_exact(m: usize, a_num: i64, x_num: i64) -> f64 {
    let alpha = rat(a_num, 2);
    let x = rat(x_num, 4);
    // j = 0 coefficient: binomial(m+α, m)
    let mut coef = BigRational::one();
    for k in 1..=m {
        coef = coef * (rat(k as i64, 1) + &alpha) / rat(k as i64, 1);
    }
    let mut sum = BigRational::zero();
    let mut xp = BigRational::one();
    for j in 0..=m {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        sum += &coef * &xp * rat(sign, 1);
        if j < m {
            coef = coef * rat((m - j) as i64, 1) / ((rat(j as i64 + 1, 1) + &alpha) * rat(j as i64 + 1, 1));
            xp *= &x;
        }
    }
    sum.to_f64().unwrap()
}

#[test]
fn recurrence_matches_exact_sum() {
    let mut worst: f64 = 0.0;
    for a_num in [0, 1, 2, 4] {
        for m in 0..=20usize {
            for x_num in (0..=80).step_by(3) {
                let exact = laguerre_exact(m, a_num, x_num);
                let x = x_num as f64 / 4.0;
                let rec = laguerre_poly(m, a_num as f64 / 2.0, x);
                let rel = if exact == 0.0 { rec.abs() } else { (rec - exact).abs() / exact.abs() };
                worst = worst.max(rel);
                assert!(rel <= 1e-10, "m={m} alpha={} x={x}: {rec} vs {exact}", a_num as f64 / 2.0);
            }
        }
    }
    eprintln!("worst relative error {worst:e}");
}

#[test]
fn compensated_sum_is_exact_for_moderate_arguments() {
    for a_num in [0, 1, 2, 4] {
        for m in 0..=20usize {
            for x_num in (0..=12).step_by(1) {
                let exact = laguerre_exact(m, a_num, x_num);
                let s = laguerre_poly_sum(m, a_num as f64 / 2.0, x_num as f64 / 4.0);
                assert!((s - exact).abs() <= 1e-10 * exact.abs().max(1.0));
            }
        }
    }
}

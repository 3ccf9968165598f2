//! Free Schrödinger kernel `E(t, x) = exp(i x² / 4t) / sqrt(4 π i t)` and the
//! special-function helpers shared by the rest of the crate.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ComplexAmplitude;

/// Principal square root of `4 i t`, i.e. `sqrt(4|t|) exp(i π/4 sign t)`.
///
/// Every fractional power of `4 i t` in the crate goes through this one
/// function so that `eval_e` and `eval_dx_e` share a branch.
pub fn sqrt_4it(t: f64) -> Complex64 {
    Complex64::from_polar((4.0 * t.abs()).sqrt(), PI / 4.0 * t.signum())
}

fn check_time(t: f64) -> Result<()> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!(
            "fundamental solution needs a finite nonzero time, got t = {t}"
        )));
    }
    Ok(())
}

/// `E(t, x)`.
pub fn eval_e(t: f64, x: f64) -> Result<ComplexAmplitude> {
    check_time(t)?;
    Ok(eval_e_unchecked(t, x))
}

#[inline]
pub(crate) fn eval_e_unchecked(t: f64, x: f64) -> Complex64 {
    Complex64::cis(x * x / (4.0 * t)) / (PI.sqrt() * sqrt_4it(t))
}

/// Physicists' Hermite polynomial `H_k(z)` by the ascending three-term
/// recurrence.
///
/// No rescaling is done. For `|z| <= 5` and `k` up to a few hundred the
/// values stay inside the f64 range; around `|z| = 10` the recurrence
/// overflows for `k ≳ 300`.
pub fn hermite(k: usize, z: ComplexAmplitude) -> ComplexAmplitude {
    let mut prev = Complex64::new(1.0, 0.0);
    if k == 0 {
        return prev;
    }
    let mut cur = 2.0 * z;
    for n in 1..k {
        let next = 2.0 * z * cur - 2.0 * n as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `∂ₓᵏ E(t, x) = (-1)ᵏ (4it)^(-k/2) H_k(x / sqrt(4it)) E(t, x)`.
pub fn eval_dx_e(k: usize, t: f64, x: f64) -> Result<ComplexAmplitude> {
    check_time(t)?;
    let root = sqrt_4it(t);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let h = hermite(k, x / root);
    Ok(sign * h / root.powi(k as i32) * eval_e_unchecked(t, x))
}

/// Natural log of `Γ(x)` for `x > 0`.
pub fn log_gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma_real needs x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// `ln n!`. Exact products up to 170!, log-Gamma beyond.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    if n <= 170 {
        (2..=n).fold(1.0f64, |acc, i| acc * i as f64).ln()
    } else {
        statrs::function::gamma::ln_gamma(n as f64 + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn modulus_is_independent_of_x() {
        for &t in &[0.01f64, 0.3, -0.2, 2.0] {
            let expected = 1.0 / (4.0 * PI * t.abs()).sqrt();
            for &x in &[0.0, 0.4, -3.0, 10.0] {
                let e = eval_e(t, x).unwrap();
                assert!((e.norm() - expected).abs() < 1e-14 * expected);
                assert_eq!(e, eval_e(t, -x).unwrap());
            }
        }
    }

    #[test]
    fn matches_extended_precision_value() {
        // 40-digit evaluation of the closed form.
        let e = eval_e(0.05, 1.0).unwrap();
        let oracle = c(-0.602_375_689_032_633_525_49, -1.108_464_234_958_175_523_3);
        assert!(rel(e, oracle) < 1e-14, "{e}");
    }

    #[test]
    fn zero_time_is_rejected() {
        assert!(matches!(eval_e(0.0, 1.0), Err(Error::Domain(_))));
        assert!(eval_dx_e(2, 0.0, 1.0).is_err());
    }

    #[test]
    fn hermite_low_orders() {
        let z = c(0.7, -0.2);
        assert_eq!(hermite(0, z), c(1.0, 0.0));
        assert_eq!(hermite(1, z), 2.0 * z);
        assert_eq!(hermite(2, c(1.0, 0.0)), c(2.0, 0.0));
    }

    #[test]
    fn hermite_ten_against_coefficient_table() {
        let table = [
            -30240.0, 0.0, 302400.0, 0.0, -403200.0, 0.0, 161280.0, 0.0, -23040.0, 0.0, 1024.0,
        ];
        for z in [c(0.3, 0.0), c(-1.1, 0.4), c(2.0, 2.0)] {
            let direct = table
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
            assert!(rel(hermite(10, z), direct) < 1e-12);
        }
        assert!((hermite(10, c(0.3, 0.0)).re + 6173.852_487_782_4).abs() < 1e-9);
    }

    #[test]
    fn hermite_derivative_identity() {
        let h = 1e-6;
        for k in 1..=20 {
            for z in [c(0.4, 0.1), c(-1.3, 0.5)] {
                let fd = (hermite(k, z + h) - hermite(k, z - h)) / (2.0 * h);
                let exact = 2.0 * k as f64 * hermite(k - 1, z);
                assert!(rel(fd, exact) < 1e-6, "k = {k}");
            }
        }
    }

    #[test]
    fn dx_e_low_orders() {
        let (t, x) = (0.07, 0.45);
        assert_eq!(eval_dx_e(0, t, x).unwrap(), eval_e(t, x).unwrap());
        let first = eval_dx_e(1, t, x).unwrap();
        let expected = c(0.0, x / (2.0 * t)) * eval_e(t, x).unwrap();
        assert!(rel(first, expected) < 1e-14);
    }

    #[test]
    fn dx_e_third_order_against_finite_difference() {
        let (t, x, h) = (0.05, 0.7, 1e-5);
        let fd = (eval_dx_e(2, t, x + h).unwrap() - eval_dx_e(2, t, x - h).unwrap()) / (2.0 * h);
        assert!(rel(eval_dx_e(3, t, x).unwrap(), fd) < 1e-6);
    }

    #[test]
    fn schrodinger_identity_in_time() {
        for &(t, x) in &[(0.05, 0.3), (0.2, 1.0), (-0.1, 0.5), (1.0, 2.0)] {
            let h = 1e-6 * f64::abs(t);
            let dt = (eval_e(t + h, x).unwrap() - eval_e(t - h, x).unwrap()) / (2.0 * h);
            let rhs = c(0.0, 1.0) * eval_dx_e(2, t, x).unwrap();
            assert!(rel(dt, rhs) < 1e-6, "t = {t}, x = {x}");
        }
    }

    #[test]
    fn dx_e_parity() {
        for k in 0..8 {
            let a = eval_dx_e(k, 0.1, 0.6).unwrap();
            let b = eval_dx_e(k, 0.1, -0.6).unwrap();
            let expected = if k % 2 == 0 { a } else { -a };
            assert!((b - expected).norm() < 1e-12 * a.norm());
        }
    }

    #[test]
    fn log_gamma_values() {
        assert!(log_gamma_real(1.0).unwrap().abs() < 1e-15);
        assert!(log_gamma_real(2.0).unwrap().abs() < 1e-15);
        assert!((log_gamma_real(6.0).unwrap().exp() - 120.0).abs() < 1e-11);
        assert!(log_gamma_real(0.0).is_err());
        assert!(log_gamma_real(-2.5).is_err());
    }

    #[test]
    fn gamma_duplication() {
        for &xi in &[0.5, 1.0, 3.5, 10.0] {
            let lhs = log_gamma_real(xi).unwrap() + log_gamma_real(xi + 0.5).unwrap();
            let rhs = (1.0 - 2.0 * xi) * 2f64.ln() + 0.5 * PI.ln() + log_gamma_real(2.0 * xi).unwrap();
            assert!(((lhs - rhs).exp() - 1.0).abs() < 1e-12, "xi = {xi}");
        }
    }
}

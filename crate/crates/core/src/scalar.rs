//! Coefficient backends for the symbolic layer.
//!
//! Two backends implement [`Scalar`]: `Complex64` for everything that feeds
//! quadrature, and [`crate::exact::ExactScalar`] for coefficient-identity
//! checks where the √n! normalizations must cancel exactly.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest n with n! representable in f64.
pub const FLOAT_FACTORIAL_CAP: u32 = 170;

/// Ring operations plus the handful of special values (√n, √n!, rationals)
/// the ladder algebra needs from its coefficients.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    /// n! as a scalar. The floating backend refuses n > 170.
    fn factorial(n: u32) -> Result<Self>;
    /// √n, exactly in the exact backend.
    fn sqrt_int(n: u64) -> Self;
    /// 1/√(n!), the normalization carried by both families.
    fn inv_sqrt_factorial(n: u32) -> Result<Self>;
    /// Magnitude as f64, for error reporting only.
    fn abs_f64(&self) -> f64;
}

pub(crate) fn pow_scalar<S: Scalar>(base: &S, exp: u32) -> S {
    let mut acc = S::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}

pub(crate) fn f64_factorial(n: u32) -> Result<f64> {
    if n > FLOAT_FACTORIAL_CAP {
        return Err(Error::FactorialOverflow(n));
    }
    let mut acc = 1.0f64;
    for k in 2..=n {
        acc *= k as f64;
    }
    Ok(acc)
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn factorial(n: u32) -> Result<Self> {
        Ok(Complex64::new(f64_factorial(n)?, 0.0))
    }
    fn sqrt_int(n: u64) -> Self {
        Complex64::new((n as f64).sqrt(), 0.0)
    }
    fn inv_sqrt_factorial(n: u32) -> Result<Self> {
        Ok(Complex64::new(1.0 / f64_factorial(n)?.sqrt(), 0.0))
    }
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_factorial_caps_at_170() {
        assert!(f64_factorial(170).unwrap().is_finite());
        assert!(matches!(
            f64_factorial(171),
            Err(Error::FactorialOverflow(171))
        ));
    }

    #[test]
    fn inv_sqrt_factorial_values() {
        let v = <Complex64 as Scalar>::inv_sqrt_factorial(4).unwrap();
        assert!((v.re - 1.0 / 24f64.sqrt()).abs() < 1e-16);
        assert!((v.re - 0.2041241452319315).abs() < 1e-15);
    }
}

//! Polynomials in one real variable with coefficients in a [`Scalar`] backend.

use crate::scalar::Scalar;

/// Dense polynomial, coefficient of x^k at index k.
///
/// Canonical form: no trailing zero coefficients; the zero polynomial is the
/// empty coefficient vector (degree `None`).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self {
            coeffs: vec![S::one()],
        }
    }

    /// x
    pub fn x() -> Self {
        Self {
            coeffs: vec![S::zero(), S::one()],
        }
    }

    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        let mut p = Self { coeffs };
        p.canonicalize();
        p
    }

    /// c·x^k
    pub fn monomial(k: usize, c: S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = c;
        Self { coeffs }
    }

    fn canonicalize(&mut self) {
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of x^k (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &S) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * c.clone()).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::from_coeffs(coeffs)
    }

    /// Multiplication by x: shifts every index up by one.
    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(S::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// d/dx: coefficient c at x^k contributes k·c at x^{k-1}.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| S::from_int(k as i64) * c.clone())
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// q with q(x) = p(x + c) identically, by repeated synthetic division
    /// (no binomial coefficients, so it stays exact in the exact backend).
    pub fn taylor_shift(&self, c: &S) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let upd = a[j].clone() + c.clone() * a[j + 1].clone();
                a[j] = upd;
            }
        }
        Self::from_coeffs(a)
    }

    pub fn conj(&self) -> Self {
        let coeffs = self.coeffs.iter().map(Scalar::conj).collect();
        Self::from_coeffs(coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Largest coefficient magnitude of the difference, for error reports.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let d = self.sub(other);
        d.coeffs
            .iter()
            .map(Scalar::abs_f64)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactScalar;
    use num_complex::Complex64;
    use proptest::prelude::*;

    type PC = Polynomial<Complex64>;
    type PE = Polynomial<ExactScalar>;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn canonical_form_drops_trailing_zeros() {
        let p = PC::from_coeffs(vec![c(1.0), c(2.0), c(0.0), c(0.0)]);
        assert_eq!(p.degree(), Some(1));
        assert!(PC::from_coeffs(vec![c(0.0)]).is_zero());
        assert_eq!(PC::zero().degree(), None);
    }

    #[test]
    fn shift_binomial_example() {
        // (x+1)^2 = x^2 + 2x + 1
        let p = PC::monomial(2, c(1.0));
        let q = p.taylor_shift(&c(1.0));
        assert_eq!(q.coeff(0), c(1.0));
        assert_eq!(q.coeff(1), c(2.0));
        assert_eq!(q.coeff(2), c(1.0));
        // identity shift
        assert_eq!(p.taylor_shift(&c(0.0)), p);
        // x -> x - zbar
        let lin = PC::x().taylor_shift(&Complex64::new(-1.0, 1.0));
        assert_eq!(lin.coeff(0), Complex64::new(-1.0, 1.0));
        assert_eq!(lin.coeff(1), c(1.0));
    }

    #[test]
    fn exact_shift_roundtrip() {
        let p = PE::from_coeffs(vec![
            ExactScalar::from_parts(2, 1, 1, 1),
            ExactScalar::from_ratio(-1, 3),
            ExactScalar::from_int(7),
        ]);
        let cshift = ExactScalar::from_parts(1, 2, -3, 5);
        let back = p
            .taylor_shift(&cshift)
            .taylor_shift(&(-cshift.clone()));
        assert_eq!(back, p);
    }

    proptest! {
        #[test]
        fn float_shift_roundtrip(coeffs in proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 0..20),
                                 sh in (-2.0..2.0f64, -2.0..2.0f64)) {
            let p = PC::from_coeffs(coeffs.iter().map(|&(r, i)| Complex64::new(r, i)).collect());
            let s = Complex64::new(sh.0, sh.1);
            let shifted = p.taylor_shift(&s);
            let back = shifted.taylor_shift(&(-s));
            // conditioning is set by the intermediate coefficients, which
            // grow like (1+|c|)^deg
            let scale = p.coeffs().iter().chain(shifted.coeffs())
                .map(|c| c.norm()).fold(1.0, f64::max);
            prop_assert!(back.max_coeff_distance(&p) <= 1e-12 * scale);
        }

        #[test]
        fn derivative_of_product_rule_spot(k in 1usize..12) {
            // d/dx x^k = k x^{k-1}
            let p = PC::monomial(k, c(1.0));
            let d = p.derivative();
            prop_assert_eq!(d, PC::monomial(k - 1, c(k as f64)));
        }
    }
}

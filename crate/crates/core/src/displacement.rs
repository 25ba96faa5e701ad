//! The two displacement-type operators V(z) = e^{z·x − z̄·d/dx} and
//! W(z) = e^{−z̄·x − z·d/dx}, given rigorous meaning as convergent series on
//! the two vacua and on monomials.
//!
//! On the polynomial side the n-th series term h_n has a closed form and a
//! one-step recursion; on the delta side the terms w_n act weakly through a
//! derivative-sequence transform. Both orderings of the factorized
//! exponentials are evaluated term-by-term so the commutator corrections
//! e^{±|z|²/2} can be checked numerically.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ladder::LadderOp;
use crate::poly::Polynomial;
use crate::quad::KahanComplex;
use crate::scalar::{pow_scalar, Scalar};
use crate::testfn::TestFunction;

/// Default truncation for the polynomial-side series.
pub const DEFAULT_H_TERMS: u32 = 80;
/// Default truncation for the weak (delta-side) series.
pub const DEFAULT_W_TERMS: u32 = 60;

/// n-th series term of V(z) applied to a vacuum or monomial: a polynomial
/// in x whose coefficients depend on the fixed z.
///
/// Degrees appearing in `poly` do not exceed n and share its parity.
#[derive(Clone, Debug)]
pub struct HTerm<S: Scalar> {
    pub n: u32,
    pub poly: Polynomial<S>,
}

/// n-th weak series term of W(z) against a test function.
#[derive(Clone, Debug)]
pub struct WTerm {
    pub n: u32,
    pub value: Complex64,
}

/// (z·x − z̄·d/dx) applied to p.
fn displace_step<S: Scalar>(z: &S, zbar: &S, p: &Polynomial<S>) -> Polynomial<S> {
    LadderOp::B
        .apply_to_poly(p)
        .scale(z)
        .sub(&LadderOp::A.apply_to_poly(p).scale(zbar))
}

/// 1/n! as a scalar (exact in the exact backend).
fn inv_factorial<S: Scalar>(n: u32) -> Result<S> {
    let half = S::inv_sqrt_factorial(n)?;
    Ok(half.clone() * half)
}

/// Closed form h_n = Σ_{k ≤ ⌊n/2⌋} (−1)^k |z|^{2k} (xz)^{n−2k} / (2^k (n−2k)! k!).
pub fn h_closed<S: Scalar>(n: u32, z: &S) -> Result<HTerm<S>> {
    let zbar = z.conj();
    let z_abs_sq = z.clone() * zbar;
    let mut coeffs = vec![S::zero(); n as usize + 1];
    // rational factor 1/(2^k (n−2k)! k!) built up incrementally
    let mut rational = inv_factorial::<S>(n)?;
    for k in 0..=(n / 2) {
        if k > 0 {
            let deg_back = (n - 2 * k + 2) as i64 * (n - 2 * k + 1) as i64;
            rational = rational * S::from_int(deg_back) * S::from_ratio(1, 2 * k as i64);
        }
        let mut c = pow_scalar(z, n - 2 * k) * pow_scalar(&z_abs_sq, k) * rational.clone();
        if k % 2 == 1 {
            c = -c;
        }
        coeffs[(n - 2 * k) as usize] = c;
    }
    Ok(HTerm {
        n,
        poly: Polynomial::from_coeffs(coeffs),
    })
}

impl<S: Scalar> HTerm<S> {
    /// h_0 = 1, the polynomial vacuum.
    pub fn vacuum() -> Self {
        Self {
            n: 0,
            poly: Polynomial::one(),
        }
    }

    /// One recursion step: h_{n+1} = (z·x − z̄·d/dx)·h_n/(n+1).
    pub fn next(&self, z: &S) -> Self {
        let zbar = z.conj();
        HTerm {
            n: self.n + 1,
            poly: displace_step(z, &zbar, &self.poly)
                .scale(&S::from_ratio(1, (self.n + 1) as i64)),
        }
    }
}

/// h_n by n applications of the one-step recursion from h_0 = 1.
pub fn h_recursive<S: Scalar>(n: u32, z: &S) -> HTerm<S> {
    let mut term = HTerm::vacuum();
    for _ in 0..n {
        term = term.next(z);
    }
    term
}

/// Σ_{n ≤ N} h_n evaluated at x; converges to e^{−|z|²/2}e^{zx}.
pub fn v_on_vacuum(z: Complex64, x: f64, n_terms: u32) -> Result<Complex64> {
    v_on_monomial(0, z, x, n_terms)
}

/// Σ_{n ≤ N} h_n^{[l]}(x) where h_0^{[l]} = x^l and the recursion matches
/// h_n; converges to (x − z̄)^l e^{−|z|²/2}e^{zx}.
pub fn v_on_monomial(l: u32, z: Complex64, x: f64, n_terms: u32) -> Result<Complex64> {
    if !(z.is_finite() && x.is_finite()) {
        return Err(Error::NonFinite("displacement arguments"));
    }
    let xc = Complex64::new(x, 0.0);
    if z.is_zero() {
        // only the n = 0 term survives
        return Ok(xc.powu(l));
    }
    let zbar = z.conj();
    let mut term = Polynomial::<Complex64>::monomial(l as usize, Complex64::new(1.0, 0.0));
    let mut acc = KahanComplex::new();
    acc.add(term.eval(&xc));
    for j in 0..n_terms {
        term = displace_step(&z, &zbar, &term)
            .scale(&Complex64::new(1.0 / (j as f64 + 1.0), 0.0));
        acc.add(term.eval(&xc));
    }
    Ok(acc.value())
}

/// Symbolic difference [(z·x − z̄·d/dx)^n, x]p + n·z̄·(z·x − z̄·d/dx)^{n−1}p;
/// the zero polynomial whenever the power-commutator identity holds.
pub fn commutator_power_check<S: Scalar>(
    n: u32,
    z: &S,
    p: &Polynomial<S>,
) -> Result<Polynomial<S>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "power-commutator check needs n >= 1".into(),
        ));
    }
    let zbar = z.conj();
    let op_pow = |mut q: Polynomial<S>, times: u32| {
        for _ in 0..times {
            q = displace_step(z, &zbar, &q);
        }
        q
    };
    let lhs = op_pow(p.mul_x(), n).sub(&op_pow(p.clone(), n).mul_x());
    let rhs = op_pow(p.clone(), n - 1).scale(&(-(S::from_int(n as i64) * zbar)));
    Ok(lhs.sub(&rhs))
}

/// Closed form w_n = Σ_{k ≤ ⌊n/2⌋} (−1)^k |z|^{2k} z̄^{n−2k} f^{(n−2k)}(0) / (2^k (n−2k)! k!).
pub fn w_closed(f: &TestFunction, n: u32, z: Complex64) -> Result<WTerm> {
    if !z.is_finite() {
        return Err(Error::NonFinite("w term argument"));
    }
    let zbar = z.conj();
    let abs_sq = z.norm_sqr();
    let mut rational = 1.0 / crate::scalar::f64_factorial(n)?;
    let mut acc = KahanComplex::new();
    for k in 0..=(n / 2) {
        if k > 0 {
            rational *= (n - 2 * k + 2) as f64 * (n - 2 * k + 1) as f64 / (2.0 * k as f64);
        }
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        let deriv = f.deriv_at_zero(n - 2 * k)?;
        acc.add(sign * abs_sq.powi(k as i32) * zbar.powu(n - 2 * k) * deriv * rational);
    }
    Ok(WTerm {
        n,
        value: acc.value(),
    })
}

/// w_n by recursing on the derivative-at-zero sequence: one step maps
/// d_m ← z̄·d_{m+1} − m·z·d_{m−1} and divides by the step index, so that
/// w_{n+1}(f) = w_n(z̄f' − z·x·f)/(n+1) without materializing products.
pub fn w_recursive(f: &TestFunction, n: u32, z: Complex64) -> Result<WTerm> {
    if !z.is_finite() {
        return Err(Error::NonFinite("w term argument"));
    }
    let zbar = z.conj();
    let mut seq: Vec<Complex64> = (0..=n)
        .map(|m| f.deriv_at_zero(m))
        .collect::<Result<_>>()?;
    for step in 1..=n {
        let len = seq.len() - 1;
        let mut next = Vec::with_capacity(len);
        for m in 0..len {
            let lower = if m == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                m as f64 * z * seq[m - 1]
            };
            next.push((zbar * seq[m + 1] - lower) / step as f64);
        }
        seq = next;
    }
    Ok(WTerm { n, value: seq[0] })
}

/// Σ_{n ≤ N} w_n: the weak action of W(z) on the delta vacuum against f;
/// converges to e^{−|z|²/2}·f(z̄).
pub fn w_weak_action(f: &TestFunction, z: Complex64, n_terms: u32) -> Result<Complex64> {
    if !z.is_finite() {
        return Err(Error::NonFinite("w action argument"));
    }
    if z.is_zero() {
        return f.deriv_at_zero(0);
    }
    let mut acc = KahanComplex::new();
    for n in 0..=n_terms {
        acc.add(w_closed(f, n, z)?.value);
    }
    Ok(acc.value())
}

/// The three orderings of V(z) on the polynomial vacuum:
/// direct series, e^{−|z|²/2}e^{z·x}e^{−z̄·d/dx}, e^{+|z|²/2}e^{−z̄·d/dx}e^{z·x}.
pub fn bch_check_v(z: Complex64, x: f64, n_terms: u32) -> Result<(Complex64, Complex64, Complex64)> {
    if !(z.is_finite() && x.is_finite()) {
        return Err(Error::NonFinite("bch arguments"));
    }
    let first = v_on_vacuum(z, x, n_terms)?;

    // e^{−z̄·d/dx} on the constant vacuum is the identity
    let second = (-z.norm_sqr() / 2.0).exp() * (z * x).exp();

    // each application of −z̄·d/dx to e^{zx} brings down −z̄·z = −|z|²
    let mut acc = KahanComplex::new();
    let mut term = Complex64::new(1.0, 0.0);
    acc.add(term);
    for n in 1..=n_terms {
        term *= -z.norm_sqr() / n as f64;
        acc.add(term);
    }
    let third = (z.norm_sqr() / 2.0).exp() * acc.value() * (z * x).exp();

    Ok((first, second, third))
}

/// The three evaluations of the weak action of W(z) on the delta vacuum:
/// e^{−|z|²/2}e^{−z·d/dx}e^{−z̄·x} ordering, the reversed
/// e^{+|z|²/2}e^{−z̄·x}e^{−z·d/dx} ordering (a binomial double sum), and the
/// closed form e^{−|z|²/2}f(z̄).
pub fn bch_check_w(
    f: &TestFunction,
    z: Complex64,
    n_terms: u32,
) -> Result<(Complex64, Complex64, Complex64)> {
    if !z.is_finite() {
        return Err(Error::NonFinite("bch arguments"));
    }
    let zbar = z.conj();
    let derivs: Vec<Complex64> = (0..=n_terms)
        .map(|m| f.deriv_at_zero(m))
        .collect::<Result<_>>()?;

    // Σ_n z̄^n f^{(n)}(0)/n!
    let mut acc = KahanComplex::new();
    let mut zn_over_fact = Complex64::new(1.0, 0.0);
    for (n, d) in derivs.iter().enumerate() {
        if n > 0 {
            zn_over_fact *= zbar / n as f64;
        }
        acc.add(zn_over_fact * d);
    }
    let first = (-z.norm_sqr() / 2.0).exp() * acc.value();

    // Σ_n (z̄^n/n!) Σ_{k≤n} C(n,k)(−z)^{n−k} f^{(k)}(0)
    let mut acc = KahanComplex::new();
    let mut zn_over_fact = Complex64::new(1.0, 0.0);
    for n in 0..=(n_terms as usize) {
        if n > 0 {
            zn_over_fact *= zbar / n as f64;
        }
        let mut inner = KahanComplex::new();
        let mut binom = 1.0f64;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
            }
            inner.add(binom * (-z).powu((n - k) as u32) * derivs[k]);
        }
        acc.add(zn_over_fact * inner.value());
    }
    let second = (z.norm_sqr() / 2.0).exp() * acc.value();

    let third = (-z.norm_sqr() / 2.0).exp() * f.eval_complex(zbar)?;

    Ok((first, second, third))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactScalar;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn h_small_closed_forms() {
        let z = c64(0.7, -0.4);
        let h0 = h_closed::<Complex64>(0, &z).unwrap();
        assert_eq!(h0.poly, Polynomial::one());
        // h1 = z·x
        let h1 = h_closed::<Complex64>(1, &z).unwrap();
        assert!((h1.poly.coeff(1) - z).norm() < 1e-16);
        assert!(h1.poly.coeff(0).norm() == 0.0);
        // h2 = (z²/2)x² − |z|²/2
        let h2 = h_closed::<Complex64>(2, &z).unwrap();
        assert!((h2.poly.coeff(2) - z * z / 2.0).norm() < 1e-16);
        assert!((h2.poly.coeff(0) + z.norm_sqr() / 2.0).norm() < 1e-16);
        // single recursion step: h1 for z = i is i·x
        let i = c64(0.0, 1.0);
        let h1r = h_recursive::<Complex64>(1, &i);
        assert!((h1r.poly.coeff(1) - i).norm() == 0.0);
    }

    #[test]
    fn h_recursive_matches_closed_exact() {
        let zs = [
            ExactScalar::from_parts(1, 2, -3, 4),
            ExactScalar::from_parts(-2, 1, 1, 3),
            ExactScalar::from_parts(0, 1, 5, 7),
        ];
        for z in &zs {
            for n in 0..=12u32 {
                let rec = h_recursive::<ExactScalar>(n, z);
                let clo = h_closed::<ExactScalar>(n, z).unwrap();
                assert_eq!(rec.poly, clo.poly, "n={n}");
            }
        }
    }

    #[test]
    fn h_parity_structure() {
        let z = c64(1.1, 0.6);
        for n in 0..=15u32 {
            let h = h_closed::<Complex64>(n, &z).unwrap();
            if let Some(d) = h.poly.degree() {
                assert!(d <= n as usize);
            }
            for (k, coeff) in h.poly.coeffs().iter().enumerate() {
                if (n as usize).abs_diff(k) % 2 == 1 {
                    assert!(coeff.norm() == 0.0, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn vacuum_series_examples() {
        // z = 0 short-circuits to 1
        assert_eq!(v_on_vacuum(c64(0.0, 0.0), 3.7, 80).unwrap(), c64(1.0, 0.0));
        // z = 1, x = 1: e^{1/2}
        let v = v_on_vacuum(c64(1.0, 0.0), 1.0, 80).unwrap();
        assert!((v.re - 1.648721270700128).abs() < 1e-12 && v.im.abs() < 1e-14);
        // z = 1+i, x = −0.5: e^{−1}e^{−0.5−0.5i}
        let v = v_on_vacuum(c64(1.0, 1.0), -0.5, 80).unwrap();
        let expect = (-1.0f64).exp() * c64(-0.5, -0.5).exp();
        assert!((v - expect).norm() < 1e-13);
        assert!((v - c64(0.195815137578068, -0.106974297208003)).norm() < 1e-12);
    }

    #[test]
    fn monomial_series_examples() {
        // l = 1, z = 1, x = 2: (2−1)e^{−1/2}e^{2} = e^{3/2}
        let v = v_on_monomial(1, c64(1.0, 0.0), 2.0, 80).unwrap();
        assert!((v.re - 4.481689070338065).abs() < 1e-11, "{v}");
        // l = 3, z = i, x = 0: (i)³e^{−1/2} = −i·e^{−1/2}
        let v = v_on_monomial(3, c64(0.0, 1.0), 0.0, 80).unwrap();
        let expect = c64(0.0, -(-0.5f64).exp().abs());
        assert!((v - c64(0.0, -0.6065306597126334)).norm() < 1e-12, "{v} {expect}");
        // l = 0 reduces to the vacuum series
        let a = v_on_monomial(0, c64(0.5, 0.5), 1.1, 80).unwrap();
        let b = v_on_vacuum(c64(0.5, 0.5), 1.1, 80).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn power_commutator_vanishes() {
        // n = 1 on the constant: both sides equal −z̄
        let z = ExactScalar::from_parts(2, 3, -1, 2);
        let one = Polynomial::<ExactScalar>::one();
        assert!(commutator_power_check(1, &z, &one).unwrap().is_zero());
        let p = Polynomial::<ExactScalar>::monomial(3, ExactScalar::from_parts(1, 1, 1, 1));
        for n in 1..=6u32 {
            assert!(commutator_power_check(n, &z, &p).unwrap().is_zero(), "n={n}");
        }
        assert!(commutator_power_check(0, &z, &p).is_err());
    }

    #[test]
    fn w_closed_low_orders() {
        let f = TestFunction::gaussian(1.0).unwrap();
        let z = c64(0.8, -0.3);
        let f0 = f.deriv_at_zero(0).unwrap();
        assert!((w_closed(&f, 0, z).unwrap().value - f0).norm() < 1e-16);
        // n=1: z̄f'(0) = 0 for the even Gaussian
        assert!(w_closed(&f, 1, z).unwrap().value.norm() == 0.0);
        // n=2: (z̄²f''(0) − |z|²f(0))/2
        let expect = (z.conj() * z.conj() * f.deriv_at_zero(2).unwrap()
            - z.norm_sqr() * f0)
            / 2.0;
        assert!((w_closed(&f, 2, z).unwrap().value - expect).norm() < 1e-16);
    }

    #[test]
    fn w_recursive_matches_closed() {
        let z = c64(1.3, 0.9);
        for f in [
            TestFunction::gaussian(1.0).unwrap(),
            TestFunction::gaussian(0.95).unwrap(),
            TestFunction::hermite(2).unwrap(),
            TestFunction::monomial(4).unwrap(),
        ] {
            for n in 0..=20u32 {
                let a = w_recursive(&f, n, z).unwrap().value;
                let b = w_closed(&f, n, z).unwrap().value;
                assert!(
                    (a - b).norm() <= 1e-12 * (1.0 + b.norm()),
                    "{} n={n}: {a} vs {b}",
                    f.name()
                );
            }
        }
    }

    #[test]
    fn weak_action_examples() {
        let f = TestFunction::gaussian(1.0).unwrap();
        // z = 0: f(0)
        assert!((w_weak_action(&f, c64(0.0, 0.0), 60).unwrap().re
            - 0.3989422804014327)
            .abs()
            < 1e-16);
        // z = 1: e^{−1/2}f(1)
        let v = w_weak_action(&f, c64(1.0, 0.0), 60).unwrap();
        assert!((v.re - 0.1467626631737399).abs() < 1e-12, "{v}");
        // z = 2i: e^{−2}f(−2i) = (2π)^{−1/2}
        let v = w_weak_action(&f, c64(0.0, 2.0), 60).unwrap();
        assert!((v - c64(0.3989422804014327, 0.0)).norm() < 1e-12, "{v}");
    }

    #[test]
    fn bch_v_triples_agree() {
        let (a, b, c) = bch_check_v(c64(0.0, 0.0), 2.0, 80).unwrap();
        assert_eq!((a, b, c), (c64(1.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0)));
        let (a, b, c) = bch_check_v(c64(1.0, 0.0), 1.0, 80).unwrap();
        for v in [a, b, c] {
            assert!((v.re - 1.648721270700128).abs() < 1e-12);
        }
        let (a, b, c) = bch_check_v(c64(0.5, -0.5), -1.0, 80).unwrap();
        assert!((a - b).norm() < 1e-12 && (b - c).norm() < 1e-12 && (a - c).norm() < 1e-12);
    }

    #[test]
    fn bch_w_triples_agree() {
        let f = TestFunction::gaussian(1.0).unwrap();
        let (a, b, c) = bch_check_w(&f, c64(0.0, 0.0), 60).unwrap();
        let f0 = f.eval_real(0.0);
        assert!((a - f0).norm() < 1e-15 && (b - f0).norm() < 1e-15 && (c - f0).norm() < 1e-15);
        let (a, b, c) = bch_check_w(&f, c64(1.0, 0.0), 60).unwrap();
        assert!((a.re - 0.1467626631737399).abs() < 1e-11);
        assert!((a - b).norm() < 1e-11 && (a - c).norm() < 1e-11);
        let e0 = TestFunction::hermite(0).unwrap();
        let (a, b, c) = bch_check_w(&e0, c64(0.0, 0.5), 60).unwrap();
        assert!((a - b).norm() < 1e-10 && (a - c).norm() < 1e-10);
    }
}

//! The four ladder operators built from multiplication by x and d/dx, and
//! the two biorthonormal families they raise and lower.
//!
//! With a = d/dx acting on polynomials and b = x·, the pair satisfies
//! [a, b] = 1 on polynomials; their adjoints act on delta combinations
//! through the weak identities x·δ^(m) = −m·δ^(m−1) and (δ^(m))' = δ^(m+1).

use crate::delta::DeltaComb;
use crate::error::Result;
use crate::poly::Polynomial;
use crate::scalar::Scalar;

/// a = d/dx, b = x·, a† = −d/dx, b† = x·.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderOp {
    A,
    B,
    ADagger,
    BDagger,
}

impl LadderOp {
    /// Involution pairing each operator with its adjoint.
    pub fn adjoint(self) -> Self {
        match self {
            LadderOp::A => LadderOp::ADagger,
            LadderOp::ADagger => LadderOp::A,
            LadderOp::B => LadderOp::BDagger,
            LadderOp::BDagger => LadderOp::B,
        }
    }

    pub fn apply_to_poly<S: Scalar>(self, p: &Polynomial<S>) -> Polynomial<S> {
        match self {
            LadderOp::A => p.derivative(),
            LadderOp::ADagger => p.derivative().scale(&-S::one()),
            LadderOp::B | LadderOp::BDagger => p.mul_x(),
        }
    }

    pub fn apply_to_delta<S: Scalar>(self, d: &DeltaComb<S>) -> DeltaComb<S> {
        match self {
            // derivative of a distribution raises the order
            LadderOp::A => DeltaComb::from_terms(d.terms().map(|(m, c)| (m + 1, c.clone()))),
            LadderOp::ADagger => {
                DeltaComb::from_terms(d.terms().map(|(m, c)| (m + 1, -c.clone())))
            }
            // x·δ^(m) = −m·δ^(m−1); order zero is annihilated
            LadderOp::B | LadderOp::BDagger => DeltaComb::from_terms(
                d.terms()
                    .filter(|&(m, _)| m > 0)
                    .map(|(m, c)| (m - 1, S::from_int(-(m as i64)) * c.clone())),
            ),
        }
    }
}

/// x^n/√n!
pub fn phi_n<S: Scalar>(n: u32) -> Result<Polynomial<S>> {
    Ok(Polynomial::monomial(
        n as usize,
        S::inv_sqrt_factorial(n)?,
    ))
}

/// (−1)^n·δ^(n)/√n!
pub fn psi_n<S: Scalar>(n: u32) -> Result<DeltaComb<S>> {
    let mut c = S::inv_sqrt_factorial(n)?;
    if n % 2 == 1 {
        c = -c;
    }
    Ok(DeltaComb::single(n, c))
}

/// Residuals (N φ_k − k φ_k, N† ψ_k − k ψ_k) with N = ba; both are zero in
/// canonical form when the eigenvalue equations hold.
pub fn number_op_eigencheck<S: Scalar>(k: u32) -> Result<(Polynomial<S>, DeltaComb<S>)> {
    let phi = phi_n::<S>(k)?;
    let psi = psi_n::<S>(k)?;
    let kval = S::from_int(k as i64);

    let n_phi = LadderOp::B.apply_to_poly(&LadderOp::A.apply_to_poly(&phi));
    let poly_residual = n_phi.sub(&phi.scale(&kval));

    // N† = (ba)† = a† b†
    let n_psi = LadderOp::ADagger.apply_to_delta(&LadderOp::BDagger.apply_to_delta(&psi));
    let delta_residual = n_psi.sub(&psi.scale(&kval));

    Ok((poly_residual, delta_residual))
}

/// (ab − ba)p − p; zero iff the commutation relation holds on p.
pub fn commutator_check<S: Scalar>(p: &Polynomial<S>) -> Polynomial<S> {
    let ab = LadderOp::A.apply_to_poly(&LadderOp::B.apply_to_poly(p));
    let ba = LadderOp::B.apply_to_poly(&LadderOp::A.apply_to_poly(p));
    ab.sub(&ba).sub(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactScalar;
    use num_complex::Complex64;

    type PE = Polynomial<ExactScalar>;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn adjoint_is_involution() {
        for op in [
            LadderOp::A,
            LadderOp::B,
            LadderOp::ADagger,
            LadderOp::BDagger,
        ] {
            assert_eq!(op.adjoint().adjoint(), op);
        }
    }

    #[test]
    fn phi_examples() {
        let p0 = phi_n::<Complex64>(0).unwrap();
        assert_eq!(p0, Polynomial::one());
        let p1 = phi_n::<Complex64>(1).unwrap();
        assert_eq!(p1, Polynomial::x());
        let p4 = phi_n::<Complex64>(4).unwrap();
        assert!((p4.coeff(4).re - 0.2041241452319315).abs() < 1e-15);
    }

    #[test]
    fn psi_examples() {
        let d0 = psi_n::<Complex64>(0).unwrap();
        assert_eq!(d0.coeff(0), c(1.0));
        let d1 = psi_n::<Complex64>(1).unwrap();
        assert_eq!(d1.coeff(1), c(-1.0));
        let d3 = psi_n::<Complex64>(3).unwrap();
        assert!((d3.coeff(3).re + 0.408248290463863).abs() < 1e-15);
    }

    #[test]
    fn derivative_of_x_squared() {
        let p = Polynomial::<Complex64>::monomial(2, c(1.0));
        assert_eq!(
            LadderOp::A.apply_to_poly(&p),
            Polynomial::monomial(1, c(2.0))
        );
    }

    #[test]
    fn raising_phi_exact() {
        for k in 0..=10u32 {
            let lhs = LadderOp::B.apply_to_poly(&phi_n::<ExactScalar>(k).unwrap());
            let rhs = phi_n::<ExactScalar>(k + 1)
                .unwrap()
                .scale(&ExactScalar::sqrt_int((k + 1) as u64));
            assert_eq!(lhs, rhs, "k={k}");
        }
    }

    #[test]
    fn raising_psi_exact() {
        for k in 0..=10u32 {
            let lhs = LadderOp::ADagger.apply_to_delta(&psi_n::<ExactScalar>(k).unwrap());
            let rhs = psi_n::<ExactScalar>(k + 1)
                .unwrap()
                .scale(&ExactScalar::sqrt_int((k + 1) as u64));
            assert_eq!(lhs, rhs, "k={k}");
        }
    }

    #[test]
    fn vacua_annihilate() {
        let phi0 = phi_n::<ExactScalar>(0).unwrap();
        assert!(LadderOp::A.apply_to_poly(&phi0).is_zero());
        let psi0 = psi_n::<ExactScalar>(0).unwrap();
        assert!(LadderOp::BDagger.apply_to_delta(&psi0).is_zero());
    }

    #[test]
    fn x_times_delta_second_derivative() {
        // x·δ'' pairs against f as 2f'(0), i.e. equals −2δ'
        let d = DeltaComb::<Complex64>::single(2, c(1.0));
        let out = LadderOp::BDagger.apply_to_delta(&d);
        assert_eq!(out, DeltaComb::single(1, c(-2.0)));
    }

    #[test]
    fn number_operator_eigencheck_examples() {
        for k in [0u32, 5, 20] {
            let (rp, rd) = number_op_eigencheck::<ExactScalar>(k).unwrap();
            assert!(rp.is_zero(), "poly residual k={k}");
            assert!(rd.is_zero(), "delta residual k={k}");
        }
    }

    #[test]
    fn commutator_examples() {
        assert!(commutator_check(&PE::one()).is_zero());
        assert!(commutator_check(&PE::monomial(3, ExactScalar::one())).is_zero());
        // (2+i)x^5 - x
        let p = PE::monomial(5, ExactScalar::from_parts(2, 1, 1, 1))
            .sub(&PE::x());
        assert!(commutator_check(&p).is_zero());
    }
}

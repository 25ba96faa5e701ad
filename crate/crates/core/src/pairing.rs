//! The extended scalar product between the two families and against catalog
//! functions.
//!
//! The pairing is the convolution form ⟨F, G⟩ = (conj(F) ∗ G̃)(0), antilinear
//! in the FIRST argument throughout. For a monomial against a delta
//! derivative the convolution has a closed three-case form; against catalog
//! functions it reduces to a real-line integral (polynomial side) or a
//! derivative evaluation at the origin (delta side).

use num_complex::Complex64;

use crate::delta::DeltaComb;
use crate::error::{Error, Result};
use crate::ladder::{phi_n, psi_n};
use crate::poly::Polynomial;
use crate::quad::{line_integral, KahanComplex, QuadratureSpec};
use crate::scalar::{pow_scalar, Scalar};
use crate::testfn::TestFunction;

/// Relative tolerance applied to the two-resolution quadrature discrepancy
/// before a pairing value is accepted.
pub const PAIRING_QUAD_TOL: f64 = 1e-9;

/// Which evaluation path produced a pairing value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingMode {
    ExactClosedForm,
    Quadrature,
    DerivativeOracle,
}

#[derive(Clone, Debug)]
pub struct PairingValue<S> {
    pub value: S,
    pub mode: PairingMode,
}

/// (conj(F) ∗ G̃)(x) for F = x^n, G = δ^(m):
/// 0 when m > n, (−1)^n n! when m = n, (−1)^m n!/(n−m)!·x^{n−m} when m < n.
pub fn conv_poly_delta<S: Scalar>(n: u32, m: u32, x: &S) -> Result<S> {
    if m > n {
        return Ok(S::zero());
    }
    if m == n {
        let mut v = S::factorial(n)?;
        if n % 2 == 1 {
            v = -v;
        }
        return Ok(v);
    }
    // (−1)^m · n!/(n−m)! · x^{n−m}
    let mut falling = S::one();
    for k in (n - m + 1)..=n {
        falling = falling * S::from_int(k as i64);
    }
    if m % 2 == 1 {
        falling = -falling;
    }
    Ok(falling * pow_scalar(x, n - m))
}

/// ⟨φ_n, ψ_m⟩ = δ_{n,m}: the (−1)^m/√m! and 1/√n! normalizations combined
/// with the raw convolution value (−1)^n n! δ_{n,m}.
pub fn pair_phi_psi<S: Scalar>(n: u32, m: u32) -> Result<PairingValue<S>> {
    let conv = conv_poly_delta::<S>(n, m, &S::zero())?;
    // first slot is antilinear, but the φ_n coefficient is real
    let mut norm = S::inv_sqrt_factorial(n)? * S::inv_sqrt_factorial(m)?;
    if m % 2 == 1 {
        norm = -norm;
    }
    Ok(PairingValue {
        value: norm * conv,
        mode: PairingMode::ExactClosedForm,
    })
}

/// ⟨f, p⟩ as an [`IntegralResult`] carrying both quadrature resolutions,
/// with no convergence verdict applied. Series accumulators use this form
/// so the verdict can be taken on the accumulated sum instead of on each
/// term's own (possibly huge or tiny) scale.
pub fn pair_fn_poly_raw(
    f: &TestFunction,
    p: &Polynomial<Complex64>,
    quad: &QuadratureSpec,
) -> Result<crate::quad::IntegralResult> {
    if !f.in_schwartz() {
        return Err(Error::NotSchwartz {
            name: f.name().to_string(),
        });
    }
    Ok(line_integral(
        |x| f.eval_real(x).conj() * p.eval(&Complex64::new(x, 0.0)),
        quad,
    ))
}

/// ⟨f, p⟩ = ∫ conj(f(x)) p(x) dx by real-line quadrature.
///
/// Requires the Schwartz flag: the integrand must decay super-polynomially.
pub fn pair_fn_poly(
    f: &TestFunction,
    p: &Polynomial<Complex64>,
    quad: &QuadratureSpec,
) -> Result<PairingValue<Complex64>> {
    let result = pair_fn_poly_raw(f, p, quad)?;
    Ok(PairingValue {
        value: result.converged(PAIRING_QUAD_TOL)?,
        mode: PairingMode::Quadrature,
    })
}

/// ⟨f, d⟩ for a delta combination d = Σ_m c_m δ^(m):
/// each term contributes c_m·(−1)^m·conj(f^(m)(0)), so in particular
/// ⟨f, ψ_n⟩ = conj(f^(n)(0))/√n!.
pub fn pair_fn_delta(
    f: &TestFunction,
    d: &DeltaComb<Complex64>,
) -> Result<PairingValue<Complex64>> {
    let mut acc = KahanComplex::new();
    for (m, c) in d.terms() {
        let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
        acc.add(c * sign * f.deriv_at_zero(m)?.conj());
    }
    Ok(PairingValue {
        value: acc.value(),
        mode: PairingMode::DerivativeOracle,
    })
}

/// Term order of the two mirrored quasi-basis sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuasiBasisOrdering {
    /// Σ_n ⟨f, ψ_n⟩⟨φ_n, g⟩
    PsiThenPhi,
    /// Σ_n ⟨f, φ_n⟩⟨ψ_n, g⟩
    PhiThenPsi,
}

#[derive(Clone, Copy, Debug)]
pub struct QuasiBasisSum {
    pub value: Complex64,
    pub terms_used: u32,
    /// Set when f lacks the real-analytic flag; the expansion then has no
    /// reason to reproduce ⟨f, g⟩.
    pub non_analytic_warning: bool,
}

fn quasi_basis_term(
    f: &TestFunction,
    g: &TestFunction,
    n: u32,
    ordering: QuasiBasisOrdering,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    let phi = phi_n::<Complex64>(n)?;
    let psi = psi_n::<Complex64>(n)?;
    Ok(match ordering {
        QuasiBasisOrdering::PsiThenPhi => {
            // ⟨f, ψ_n⟩·⟨φ_n, g⟩ with ⟨φ_n, g⟩ = conj(⟨g, φ_n⟩)
            let left = pair_fn_delta(f, &psi)?.value;
            let right = pair_fn_poly(g, &phi, quad)?.value.conj();
            left * right
        }
        QuasiBasisOrdering::PhiThenPsi => {
            let left = pair_fn_poly(f, &phi, quad)?.value;
            let right = pair_fn_delta(g, &psi)?.value.conj();
            left * right
        }
    })
}

/// Partial sum of the quasi-basis expansion, truncated at `n_max` inclusive,
/// accumulated in ascending order with compensation.
pub fn quasi_basis_partial_sum(
    f: &TestFunction,
    g: &TestFunction,
    n_max: u32,
    ordering: QuasiBasisOrdering,
    quad: &QuadratureSpec,
) -> Result<QuasiBasisSum> {
    let mut acc = KahanComplex::new();
    for n in 0..=n_max {
        acc.add(quasi_basis_term(f, g, n, ordering, quad)?);
    }
    Ok(QuasiBasisSum {
        value: acc.value(),
        terms_used: n_max + 1,
        non_analytic_warning: !f.in_analytic_schwartz(),
    })
}

/// Quasi-basis sum with the stopping policy: stop at `n_cap` or once three
/// consecutive partial sums move by less than tol·(1 + |current|),
/// whichever comes first.
pub fn quasi_basis_converged(
    f: &TestFunction,
    g: &TestFunction,
    n_cap: u32,
    tol: f64,
    ordering: QuasiBasisOrdering,
    quad: &QuadratureSpec,
) -> Result<QuasiBasisSum> {
    let mut acc = KahanComplex::new();
    let mut quiet_steps = 0u32;
    let mut used = 0u32;
    for n in 0..=n_cap {
        let before = acc.value();
        acc.add(quasi_basis_term(f, g, n, ordering, quad)?);
        used = n + 1;
        let moved = (acc.value() - before).norm();
        if moved < tol * (1.0 + acc.value().norm()) {
            quiet_steps += 1;
            if quiet_steps >= 3 {
                break;
            }
        } else {
            quiet_steps = 0;
        }
    }
    Ok(QuasiBasisSum {
        value: acc.value(),
        terms_used: used,
        non_analytic_warning: !f.in_analytic_schwartz(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactScalar;
    use std::f64::consts::PI;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn convolution_case_table() {
        // m > n
        let v = conv_poly_delta::<Complex64>(1, 2, &c64(0.7, 0.0)).unwrap();
        assert_eq!(v, c64(0.0, 0.0));
        // m = n
        let v = conv_poly_delta::<Complex64>(2, 2, &c64(5.0, 0.0)).unwrap();
        assert_eq!(v, c64(2.0, 0.0));
        let v = conv_poly_delta::<Complex64>(3, 3, &c64(0.0, 0.0)).unwrap();
        assert_eq!(v, c64(-6.0, 0.0));
        // m < n: (−1)^1·3!/2!·x² = −3x²
        let x = 1.5;
        let v = conv_poly_delta::<Complex64>(3, 1, &c64(x, 0.0)).unwrap();
        assert!((v.re + 3.0 * x * x).abs() < 1e-14);
    }

    #[test]
    fn convolution_cross_checked_by_quadrature() {
        // (conj(x³) ∗ δ'~)(x)·paired against a Gaussian:
        // ∫ (−3t²)·f₁(t) dt should equal Σ over the quadrature of the
        // convolution evaluated pointwise.
        let spec = QuadratureSpec::default();
        let f = TestFunction::gaussian(1.0).unwrap();
        let direct = line_integral(
            |t| {
                f.eval_real(t)
                    * conv_poly_delta::<Complex64>(3, 1, &c64(t, 0.0)).unwrap()
            },
            &spec,
        )
        .best();
        // −3·second moment = −3
        assert!((direct.re + 3.0).abs() < 1e-10, "{direct}");
    }

    #[test]
    fn biorthonormality_exact_and_float() {
        for n in 0..=12u32 {
            for m in 0..=12u32 {
                let exact = pair_phi_psi::<ExactScalar>(n, m).unwrap().value;
                let expect = if n == m {
                    ExactScalar::one()
                } else {
                    ExactScalar::zero()
                };
                assert_eq!(exact, expect, "exact n={n} m={m}");
                let float = pair_phi_psi::<Complex64>(n, m).unwrap().value;
                let target = if n == m { 1.0 } else { 0.0 };
                assert!((float.re - target).abs() < 1e-13, "float n={n} m={m}");
            }
        }
    }

    #[test]
    fn pair_fn_poly_gaussian_moments() {
        let spec = QuadratureSpec::default();
        let f = TestFunction::gaussian(1.0).unwrap();
        let p0 = phi_n::<Complex64>(0).unwrap();
        let v = pair_fn_poly(&f, &p0, &spec).unwrap();
        assert_eq!(v.mode, PairingMode::Quadrature);
        assert!((v.value.re - 1.0).abs() < 1e-12);
        let p1 = phi_n::<Complex64>(1).unwrap();
        assert!(pair_fn_poly(&f, &p1, &spec).unwrap().value.norm() < 1e-13);
        let p2 = phi_n::<Complex64>(2).unwrap();
        let v = pair_fn_poly(&f, &p2, &spec).unwrap().value;
        assert!((v.re - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((v.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn pair_fn_poly_rejects_monomial_catalog_entries() {
        let spec = QuadratureSpec::default();
        let m = TestFunction::monomial(2).unwrap();
        let p = phi_n::<Complex64>(0).unwrap();
        assert!(matches!(
            pair_fn_poly(&m, &p, &spec),
            Err(Error::NotSchwartz { .. })
        ));
    }

    #[test]
    fn pair_fn_delta_examples() {
        let f = TestFunction::gaussian(1.0).unwrap();
        let inv_root_tau = 1.0 / (2.0 * PI).sqrt();
        let v0 = pair_fn_delta(&f, &psi_n(0).unwrap()).unwrap();
        assert_eq!(v0.mode, PairingMode::DerivativeOracle);
        assert!((v0.value.re - inv_root_tau).abs() < 1e-15);
        assert!((v0.value.re - 0.3989422804014327).abs() < 1e-15);
        let v1 = pair_fn_delta(&f, &psi_n(1).unwrap()).unwrap();
        assert_eq!(v1.value.norm(), 0.0);
        let v2 = pair_fn_delta(&f, &psi_n(2).unwrap()).unwrap();
        assert!((v2.value.re + inv_root_tau / 2f64.sqrt()).abs() < 1e-15);
        assert!((v2.value.re + 0.2820947917738781).abs() < 1e-15);
    }

    #[test]
    fn pair_fn_delta_is_linear_in_second_slot() {
        let f = TestFunction::gaussian(1.0).unwrap();
        let d = DeltaComb::single(0, c64(0.0, 1.0)); // i·δ
        let v = pair_fn_delta(&f, &d).unwrap().value;
        let expect = c64(0.0, 1.0) * f.eval_real(0.0).conj();
        assert!((v - expect).norm() < 1e-16);
    }

    #[test]
    fn antilinearity_in_first_argument() {
        let spec = QuadratureSpec::default();
        let f = TestFunction::gaussian(1.0).unwrap();
        let scale = c64(1.5, -2.0);
        let fs = f.scaled(scale).unwrap();
        let p = phi_n::<Complex64>(2).unwrap();
        let base = pair_fn_poly(&f, &p, &spec).unwrap().value;
        let scaled = pair_fn_poly(&fs, &p, &spec).unwrap().value;
        assert!((scaled - scale.conj() * base).norm() < 1e-12 * (1.0 + base.norm()));
        let d = psi_n::<Complex64>(2).unwrap();
        let base = pair_fn_delta(&f, &d).unwrap().value;
        let scaled = pair_fn_delta(&fs, &d).unwrap().value;
        assert!((scaled - scale.conj() * base).norm() < 1e-14);
    }

    #[test]
    fn quasi_basis_single_term_example() {
        // N=0 for f=g=f₁: ⟨f,ψ₀⟩⟨φ₀,f⟩ = (2π)^{-1/2}·1
        let spec = QuadratureSpec::default();
        let f = TestFunction::gaussian(1.0).unwrap();
        let s = quasi_basis_partial_sum(&f, &f, 0, QuasiBasisOrdering::PsiThenPhi, &spec)
            .unwrap();
        assert!((s.value.re - 0.3989422804014327).abs() < 1e-12);
        assert!(!s.non_analytic_warning);
    }

    #[test]
    fn quasi_basis_geometric_pair_converges_fast() {
        // the expansion converges geometrically (ratio (σ_g/σ_f)² per pair
        // of terms) when the Taylor-expanded function is the wider
        // Gaussian; each ordering expands its first argument
        let spec = QuadratureSpec::default();
        let f = TestFunction::gaussian(1.0).unwrap();
        let g = TestFunction::gaussian(0.7).unwrap();
        let expect = 1.0 / (2.0 * PI * (1.0 + 0.49)).sqrt();
        let s = quasi_basis_partial_sum(&f, &g, 60, QuasiBasisOrdering::PsiThenPhi, &spec)
            .unwrap();
        assert!((s.value.re - expect).abs() < 1e-10, "{} vs {expect}", s.value.re);
        let s = quasi_basis_partial_sum(&g, &f, 60, QuasiBasisOrdering::PhiThenPsi, &spec)
            .unwrap();
        assert!((s.value.re - expect).abs() < 1e-10, "{} vs {expect}", s.value.re);
    }

    #[test]
    fn quasi_basis_wrong_side_expansion_diverges() {
        // Taylor-expanding the narrower Gaussian against the wider one
        // grows like (σ_f/σ_g)^{2n}: the symmetric form of the expansion
        // identity genuinely needs both expansions to converge
        let spec = QuadratureSpec::default();
        let f = TestFunction::gaussian(1.0).unwrap();
        let g = TestFunction::gaussian(0.7).unwrap();
        let s30 = quasi_basis_partial_sum(&f, &g, 30, QuasiBasisOrdering::PhiThenPsi, &spec)
            .unwrap();
        let s60 = quasi_basis_partial_sum(&f, &g, 60, QuasiBasisOrdering::PhiThenPsi, &spec)
            .unwrap();
        assert!(s60.value.norm() > 100.0 * s30.value.norm().max(1.0));
    }

    #[test]
    fn quasi_basis_equal_widths_alternating_tail() {
        // f = g = f₁ gives the alternating (2m−1)!!/(2m)!! tail: the error
        // magnitude decreases monotonically but is still ~2e-2 at N=60
        let spec = QuadratureSpec::default();
        let f = TestFunction::gaussian(1.0).unwrap();
        let target = 1.0 / (2.0 * PI.sqrt());
        let mut prev_err = f64::INFINITY;
        for n_max in [0u32, 10, 20, 40, 60] {
            let s = quasi_basis_partial_sum(&f, &f, n_max, QuasiBasisOrdering::PsiThenPhi, &spec)
                .unwrap();
            let err = (s.value.re - target).abs();
            assert!(err <= prev_err + 1e-12, "error grew at N={n_max}");
            prev_err = err;
        }
        assert!((prev_err - 2.029235e-2).abs() < 1e-6, "N=60 error {prev_err}");
    }

    #[test]
    fn quasi_basis_non_analytic_side_vanishes() {
        let spec = QuadratureSpec::default();
        let p = TestFunction::non_analytic();
        let f = TestFunction::gaussian(1.0).unwrap();
        for n_max in [0u32, 5, 25, 60] {
            let s = quasi_basis_partial_sum(&p, &f, n_max, QuasiBasisOrdering::PsiThenPhi, &spec)
                .unwrap();
            assert_eq!(s.value, c64(0.0, 0.0), "N={n_max}");
            assert!(s.non_analytic_warning);
        }
        // while the true overlap is nonzero
        let overlap = line_integral(|x| p.eval_real(x).conj() * f.eval_real(x), &spec).best();
        assert!(overlap.re > 0.01);
    }

    #[test]
    fn converged_policy_stops_early() {
        let spec = QuadratureSpec::default();
        let f = TestFunction::gaussian(1.0).unwrap();
        let g = TestFunction::gaussian(0.5).unwrap();
        let s = quasi_basis_converged(&f, &g, 200, 1e-12, QuasiBasisOrdering::PsiThenPhi, &spec)
            .unwrap();
        assert!(s.terms_used < 100, "stopped at {}", s.terms_used);
        let expect = 1.0 / (2.0 * PI * (1.0 + 0.25)).sqrt();
        assert!((s.value.re - expect).abs() < 1e-10);
    }
}

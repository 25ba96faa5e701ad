//! The two bi-coherent functionals built on the ladder pair, their series
//! and closed forms, the weak eigenvalue relations, the complex-plane
//! resolution of the identity, and the integral representation of the delta
//! with complex argument.
//!
//! Conventions: the pairing is antilinear in its first slot, and the
//! functional F_φ[f](z, z̄) = e^{−|z|²/2}∫e^{z̄x}f(x)dx equals ⟨φ(z), f⟩, so
//! ⟨f, φ(z)⟩ is its conjugate. The delta-side state exists only through its
//! pairing F_ψ[g](z, z̄) = e^{−|z|²/2}g(z̄); it is never materialized as data.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::ladder::{phi_n, psi_n};
use crate::pairing::{pair_fn_delta, PAIRING_QUAD_TOL};
use crate::quad::{complex_plane_integral, line_integral, KahanComplex, QuadratureSpec};
use crate::testfn::TestFunction;

/// Width band (lower, upper) inside which a Gaussian pair keeps the
/// resolution-of-identity integrand absolutely integrable: the magnitude
/// exponent is −|z|² + (σ² − σ^{−2})(α² − β²)/2, integrable iff
/// |σ² − σ^{−2}| < 2.
pub const SIGMA_BAND_UPPER: f64 = 1.5537739740300374; // √(1+√2)
pub const SIGMA_BAND_LOWER: f64 = 0.6435942529055826; // 1/√(1+√2)

/// Provenance of a bi-coherent evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPath {
    Series { terms: u32 },
    ClosedForm,
    Quadrature,
}

#[derive(Clone, Copy, Debug)]
pub struct BiCoherentEval {
    pub z: Complex64,
    pub value: Complex64,
    pub path: EvalPath,
}

fn check_z(z: Complex64) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("coherent-state label z"))
    }
}

fn gauss_prefactor(z: Complex64) -> Complex64 {
    Complex64::new((-z.norm_sqr() / 2.0).exp(), 0.0)
}

/// F_φ[f](z, z̄) = e^{−|z|²/2}·∫e^{z̄x}f(x)dx by the closed moment oracle.
pub fn f_phi(f: &TestFunction, z: Complex64, _quad: &QuadratureSpec) -> Result<BiCoherentEval> {
    check_z(z)?;
    if !f.in_exp_stable() {
        return Err(Error::NotExpStable {
            name: f.name().to_string(),
        });
    }
    let value = gauss_prefactor(z) * f.mgf(z.conj())?;
    Ok(BiCoherentEval {
        z,
        value,
        path: EvalPath::ClosedForm,
    })
}

/// Same functional evaluated by real-line quadrature instead of the oracle.
pub fn f_phi_via_quadrature(
    f: &TestFunction,
    z: Complex64,
    quad: &QuadratureSpec,
) -> Result<BiCoherentEval> {
    check_z(z)?;
    if !f.in_exp_stable() {
        return Err(Error::NotExpStable {
            name: f.name().to_string(),
        });
    }
    let zbar = z.conj();
    let integral = line_integral(|x| (zbar * x).exp() * f.eval_real(x), quad)
        .converged(PAIRING_QUAD_TOL)?;
    Ok(BiCoherentEval {
        z,
        value: gauss_prefactor(z) * integral,
        path: EvalPath::Quadrature,
    })
}

/// Truncated series e^{−|z|²/2}·Σ_{k≤N} z̄^k/√k!·⟨φ_k, f⟩, each pairing
/// taken by quadrature. The two-resolution convergence verdict is applied
/// to the accumulated series, where the z̄^k/√k! weights have already
/// damped the high-order moments whose own integrals carry the largest
/// discretization noise.
pub fn f_phi_series(
    f: &TestFunction,
    z: Complex64,
    n_terms: u32,
    quad: &QuadratureSpec,
) -> Result<BiCoherentEval> {
    check_z(z)?;
    if !f.in_exp_stable() {
        return Err(Error::NotExpStable {
            name: f.name().to_string(),
        });
    }
    let zbar = z.conj();
    let mut coarse = KahanComplex::new();
    let mut refined = KahanComplex::new();
    let mut zk_over_sqrt = Complex64::new(1.0, 0.0); // z̄^k/√k!
    for k in 0..=n_terms {
        if k > 0 {
            zk_over_sqrt *= zbar / (k as f64).sqrt();
        }
        // ⟨φ_k, f⟩ = conj(⟨f, φ_k⟩)
        let pairing = crate::pairing::pair_fn_poly_raw(f, &phi_n(k)?, quad)?;
        coarse.add(zk_over_sqrt * pairing.value.conj());
        refined.add(zk_over_sqrt * pairing.refined_value.conj());
    }
    let pref = gauss_prefactor(z);
    let series = crate::quad::IntegralResult::from_passes(
        pref * coarse.value(),
        pref * refined.value(),
    );
    Ok(BiCoherentEval {
        z,
        value: series.converged(PAIRING_QUAD_TOL)?,
        path: EvalPath::Series { terms: n_terms },
    })
}

/// F_ψ[g](z, z̄) = e^{−|z|²/2}·g(z̄) through the analytic continuation.
pub fn f_psi(g: &TestFunction, z: Complex64) -> Result<BiCoherentEval> {
    check_z(z)?;
    let value = gauss_prefactor(z) * g.eval_complex(z.conj())?;
    Ok(BiCoherentEval {
        z,
        value,
        path: EvalPath::ClosedForm,
    })
}

/// Truncated series e^{−|z|²/2}·Σ_{k≤N} z̄^k/√k!·⟨ψ_k, g⟩: the Taylor
/// expansion of g at z̄. Needs only the derivative oracle, so it applies to
/// entries with no continuation (where it converges to something else
/// entirely: all terms vanish for the flat catalog entry).
pub fn f_psi_series(g: &TestFunction, z: Complex64, n_terms: u32) -> Result<BiCoherentEval> {
    check_z(z)?;
    let zbar = z.conj();
    let mut acc = KahanComplex::new();
    let mut zk_over_sqrt = Complex64::new(1.0, 0.0);
    for k in 0..=n_terms {
        if k > 0 {
            zk_over_sqrt *= zbar / (k as f64).sqrt();
        }
        // ⟨ψ_k, g⟩ = conj(⟨g, ψ_k⟩) = g^{(k)}(0)/√k!
        let pairing = pair_fn_delta(g, &psi_n(k)?)?.value.conj();
        acc.add(zk_over_sqrt * pairing);
    }
    Ok(BiCoherentEval {
        z,
        value: gauss_prefactor(z) * acc.value(),
        path: EvalPath::Series { terms: n_terms },
    })
}

/// The ordinary coherent-state profile
/// Φ(z, x) = π^{−1/4}·e^{−(x−√2·Re z)²/2 + i·x·√2·Im z}.
pub fn ordinary_cs_profile(z: Complex64, x: f64) -> Complex64 {
    let a = std::f64::consts::SQRT_2 * z.re;
    let b = std::f64::consts::SQRT_2 * z.im;
    PI.powf(-0.25) * Complex64::new(-(x - a) * (x - a) / 2.0, x * b).exp()
}

/// ⟨Φ(z), f⟩ by real-line quadrature (antilinear in Φ).
pub fn f_ordinary_cs(
    f: &TestFunction,
    z: Complex64,
    quad: &QuadratureSpec,
) -> Result<BiCoherentEval> {
    check_z(z)?;
    let value = line_integral(|x| ordinary_cs_profile(z, x).conj() * f.eval_real(x), quad)
        .converged(PAIRING_QUAD_TOL)?;
    Ok(BiCoherentEval {
        z,
        value,
        path: EvalPath::Quadrature,
    })
}

/// |⟨f, aφ(z)⟩ − z⟨f, φ(z)⟩| evaluated weakly: the lowering action moves
/// onto f as −⟨f′, φ(z)⟩, and both pairings go through quadrature.
pub fn weak_eigen_phi_residual(
    f: &TestFunction,
    z: Complex64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_z(z)?;
    if !f.in_exp_stable() {
        return Err(Error::NotExpStable {
            name: f.name().to_string(),
        });
    }
    let pref = gauss_prefactor(z);
    let deriv_side = line_integral(|x| f.deriv_real(x).conj() * (z * x).exp(), quad)
        .converged(PAIRING_QUAD_TOL)?
        * pref;
    let plain_side = line_integral(|x| f.eval_real(x).conj() * (z * x).exp(), quad)
        .converged(PAIRING_QUAD_TOL)?
        * pref;
    Ok((-deriv_side - z * plain_side).norm())
}

/// |⟨x·g, ψ(z)⟩ − z⟨g, ψ(z)⟩| through the closed form: both sides reduce to
/// e^{−|z|²/2}·z·conj(g(z̄)), so the residual is pure rounding.
pub fn weak_eigen_psi_residual(g: &TestFunction, z: Complex64) -> Result<f64> {
    check_z(z)?;
    let zbar = z.conj();
    let g_at = g.eval_complex(zbar)?;
    let pref = gauss_prefactor(z);
    let lhs = pref * (zbar * g_at).conj();
    let rhs = z * (pref * g_at.conj());
    Ok((lhs - rhs).norm())
}

/// Effective Gaussian width governing the large-|z| growth of the
/// closed-form functionals: the width itself for Gaussian entries, 1 for
/// Hermite functions (their e^{±z̄²/2} envelopes).
fn growth_width(f: &TestFunction) -> Option<f64> {
    f.gaussian_sigma().or(if f.in_exp_stable() {
        Some(1.0)
    } else {
        None
    })
}

fn guard_resolution_domain(f: &TestFunction, g: &TestFunction) -> Result<()> {
    let (Some(sf), Some(sg)) = (growth_width(f), growth_width(g)) else {
        return Ok(());
    };
    // conj(F_φ[f])·F_ψ[g] has magnitude exponent −|z|² + (s_f² − s_g^{−2})(α²−β²)/2
    for (a, b) in [(sf, sg), (sg, sf)] {
        if (a * a - 1.0 / (b * b)).abs() >= 2.0 {
            let sigma = if a * a >= 1.0 / (b * b) { a } else { b };
            return Err(Error::SigmaOutOfDomain {
                sigma,
                lo: SIGMA_BAND_LOWER,
                hi: SIGMA_BAND_UPPER,
            });
        }
    }
    Ok(())
}

/// Outcome of the resolution-of-identity check: the two integral orderings
/// against the directly integrated overlap ⟨f, g⟩.
#[derive(Clone, Copy, Debug)]
pub struct ResolutionCheck {
    pub phi_psi_ordering: Complex64,
    pub psi_phi_ordering: Complex64,
    pub reference: Complex64,
    pub err_phi_psi: f64,
    pub err_psi_phi: f64,
}

/// (1/π)∫⟨f, φ(z)⟩⟨ψ(z), g⟩d²z and its mirrored ordering, both compared to
/// ⟨f, g⟩ from real-line quadrature. Gaussian widths outside the absolutely
/// convergent band are rejected.
pub fn check_resolution_identity(
    f: &TestFunction,
    g: &TestFunction,
    quad: &QuadratureSpec,
) -> Result<ResolutionCheck> {
    guard_resolution_domain(f, g)?;
    for h in [f, g] {
        if !h.in_exp_stable() {
            return Err(Error::NotExpStable {
                name: h.name().to_string(),
            });
        }
        if !h.has_continuation() {
            return Err(Error::NoContinuation {
                name: h.name().to_string(),
            });
        }
    }

    // ⟨f, φ(z)⟩⟨ψ(z), g⟩ = conj(F_φ[f](z))·F_ψ[g](z)
    let phi_psi = complex_plane_integral(
        |z| {
            let pref = (-z.norm_sqr()).exp();
            let mgf_f = f.mgf(z.conj()).expect("flag-checked");
            let g_cont = g.eval_complex(z.conj()).expect("flag-checked");
            pref * mgf_f.conj() * g_cont
        },
        quad,
    )
    .converged(PAIRING_QUAD_TOL)?;

    // ⟨f, ψ(z)⟩⟨φ(z), g⟩ = conj(F_ψ[f](z))·F_φ[g](z)
    let psi_phi = complex_plane_integral(
        |z| {
            let pref = (-z.norm_sqr()).exp();
            let f_cont = f.eval_complex(z.conj()).expect("flag-checked");
            let mgf_g = g.mgf(z.conj()).expect("flag-checked");
            pref * f_cont.conj() * mgf_g
        },
        quad,
    )
    .converged(PAIRING_QUAD_TOL)?;

    let reference = line_integral(|x| f.eval_real(x).conj() * g.eval_real(x), quad)
        .converged(PAIRING_QUAD_TOL)?;

    Ok(ResolutionCheck {
        phi_psi_ordering: phi_psi,
        psi_phi_ordering: psi_phi,
        reference,
        err_phi_psi: (phi_psi - reference).norm(),
        err_psi_phi: (psi_phi - reference).norm(),
    })
}

/// (1/π)∫e^{−|z|²}e^{zx}g(z̄)d²z, the integral representation of the delta
/// with complex argument; reproduces g(x) on admissible entries.
///
/// Gaussian entries need width ≥ 1/√2 or the integrand grows faster than
/// the weight along the imaginary direction. Exactly at 1/√2 the integral
/// converges only through the angular oscillation, which the polar scheme
/// handles provided the angular resolution outruns the radial range (see
/// [`QuadratureSpec::wide_angle`]).
pub fn complex_delta_transform(
    g: &TestFunction,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("delta-transform evaluation point"));
    }
    if !g.has_continuation() {
        return Err(Error::NoContinuation {
            name: g.name().to_string(),
        });
    }
    if let Some(sigma) = g.gaussian_sigma() {
        if sigma < FRAC_1_SQRT_2 * (1.0 - 1e-12) {
            return Err(Error::SigmaOutOfDomain {
                sigma,
                lo: FRAC_1_SQRT_2,
                hi: f64::INFINITY,
            });
        }
    }
    complex_plane_integral(
        |z| (-z.norm_sqr()).exp() * (z * x).exp() * g.eval_complex(z.conj()).expect("flag-checked"),
        quad,
    )
    .converged(PAIRING_QUAD_TOL)
}

/// Mean and relative standard deviation of
/// |F_ψ[f_σ](α+iβ)| / |F_φ[f_{1/σ}](β+iα)| over the grid, skipping nodes
/// where the denominator is below 1e−12. For the Gaussian family the two
/// magnitude surfaces coincide after the quarter-turn swap of the axes, up
/// to an overall factor, so the ratio is constant.
pub fn rotation_scaling_ratio_stats(sigma: f64, grid: &GridSpec) -> Result<(f64, f64)> {
    let f = TestFunction::gaussian(sigma)?;
    let f_inv = TestFunction::gaussian(1.0 / sigma)?;
    let quad = QuadratureSpec::default();
    let mut ratios = Vec::new();
    for beta in grid.im_points() {
        for alpha in grid.re_points() {
            let num = f_psi(&f, Complex64::new(alpha, beta))?.value.norm();
            let den = f_phi(&f_inv, Complex64::new(beta, alpha), &quad)?.value.norm();
            if den > 1e-12 {
                ratios.push(num / den);
            }
        }
    }
    if ratios.is_empty() {
        return Err(Error::InvalidGrid(
            "no grid node had a usable denominator".into(),
        ));
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / ratios.len() as f64;
    Ok((mean, var.sqrt() / mean))
}

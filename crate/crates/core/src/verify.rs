//! Named verification suites: every identity and invariant in the crate as
//! a pass/fail check with a measured error, a pinned tolerance, and a
//! runtime, grouped the way the CLI exposes them.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bicoherent::{
    self, check_resolution_identity, complex_delta_transform, f_phi, f_phi_series, f_psi,
    f_psi_series, rotation_scaling_ratio_stats, weak_eigen_phi_residual, weak_eigen_psi_residual,
};
use crate::delta::DeltaComb;
use crate::displacement::{
    bch_check_v, bch_check_w, commutator_power_check, h_closed, h_recursive, v_on_monomial,
    w_closed, w_recursive, w_weak_action,
};
use crate::error::{Error, Result};
use crate::exact::ExactScalar;
use crate::grid::{grid_csv, grid_eval, GridSpec, StateKind};
use crate::ladder::{commutator_check, number_op_eigencheck, phi_n, psi_n, LadderOp};
use crate::pairing::{
    pair_fn_delta, pair_fn_poly, pair_phi_psi, quasi_basis_partial_sum, QuasiBasisOrdering,
};
use crate::poly::Polynomial;
use crate::quad::{complex_plane_integral, line_integral, QuadratureSpec};
use crate::scalar::{f64_factorial, Scalar};
use crate::testfn::TestFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Pairing,
    Bicoherent,
    Identities,
    Displacement,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Pairing => "pairing",
            Suite::Bicoherent => "bicoherent",
            Suite::Identities => "identities",
            Suite::Displacement => "displacement",
            Suite::All => "all",
        }
    }

    pub const ALL_NAMES: [&'static str; 6] = [
        "algebra",
        "pairing",
        "bicoherent",
        "identities",
        "displacement",
        "all",
    ];
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "algebra" => Ok(Suite::Algebra),
            "pairing" => Ok(Suite::Pairing),
            "bicoherent" => Ok(Suite::Bicoherent),
            "identities" => Ok(Suite::Identities),
            "displacement" => Ok(Suite::Displacement),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidParameter(format!("unknown suite '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub measured_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub runtime_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub overall: bool,
}

struct CheckDef {
    id: &'static str,
    suite: Suite,
    default_tol: f64,
    run: fn() -> Result<f64>,
}

/// Per-check tolerance table: compiled defaults plus overrides from a
/// key = value config file or command-line flags.
#[derive(Clone, Debug, Default)]
pub struct Tolerances {
    overrides: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !CHECKS.iter().any(|c| c.id == key) {
            return Err(Error::InvalidParameter(format!(
                "unknown tolerance key '{key}'"
            )));
        }
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance for '{key}' must be a finite non-negative number"
            )));
        }
        self.overrides.insert(key.to_string(), value);
        Ok(())
    }

    /// Parse `key = value` lines; '#' starts a comment, blank lines skipped.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidParameter(format!(
                    "config line {}: expected key = value, got '{raw}'",
                    lineno + 1
                )));
            };
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!(
                    "config line {}: '{}' is not a number",
                    lineno + 1,
                    value.trim()
                ))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    fn get(&self, def: &CheckDef) -> f64 {
        self.overrides
            .get(def.id)
            .copied()
            .unwrap_or(def.default_tol)
    }

    /// All known keys with their effective values.
    pub fn effective(&self) -> Vec<(&'static str, f64)> {
        CHECKS.iter().map(|c| (c.id, self.get(c))).collect()
    }
}

pub fn run_suite(suite: Suite, tols: &Tolerances) -> VerificationReport {
    let mut checks = Vec::new();
    let mut overall = true;
    for def in CHECKS {
        if suite != Suite::All && def.suite != suite {
            continue;
        }
        let tolerance = tols.get(def);
        let start = Instant::now();
        let (measured_error, detail) = match (def.run)() {
            Ok(err) => (err, None),
            Err(e) => (f64::MAX, Some(e.to_string())),
        };
        let passed = measured_error <= tolerance;
        overall &= passed;
        checks.push(CheckResult {
            name: def.id.to_string(),
            measured_error,
            tolerance,
            passed,
            runtime_s: start.elapsed().as_secs_f64(),
            detail,
        });
    }
    VerificationReport {
        suite: suite.name().to_string(),
        checks,
        overall,
    }
}

const CHECKS: &[CheckDef] = &[
    // ---- algebra ----
    CheckDef {
        id: "ladder_exactness_exact",
        suite: Suite::Algebra,
        default_tol: 0.0,
        run: check_ladder_exactness_exact,
    },
    CheckDef {
        id: "ladder_exactness_float",
        suite: Suite::Algebra,
        default_tol: 1e-14,
        run: check_ladder_exactness_float,
    },
    CheckDef {
        id: "number_operator_exact",
        suite: Suite::Algebra,
        default_tol: 0.0,
        run: check_number_operator,
    },
    CheckDef {
        id: "commutator_identity_exact",
        suite: Suite::Algebra,
        default_tol: 0.0,
        run: check_commutator_identity,
    },
    CheckDef {
        id: "canonical_form",
        suite: Suite::Algebra,
        default_tol: 0.0,
        run: check_canonical_form,
    },
    CheckDef {
        id: "taylor_shift_roundtrip_exact",
        suite: Suite::Algebra,
        default_tol: 0.0,
        run: check_taylor_shift_exact,
    },
    CheckDef {
        id: "taylor_shift_roundtrip_float",
        suite: Suite::Algebra,
        default_tol: 1e-12,
        run: check_taylor_shift_float,
    },
    // ---- pairing ----
    CheckDef {
        id: "biorthonormality_exact",
        suite: Suite::Pairing,
        default_tol: 0.0,
        run: check_biorthonormality_exact,
    },
    CheckDef {
        id: "biorthonormality_float",
        suite: Suite::Pairing,
        default_tol: 1e-12,
        run: check_biorthonormality_float,
    },
    CheckDef {
        id: "moment_consistency",
        suite: Suite::Pairing,
        default_tol: 1e-10,
        run: check_moment_consistency,
    },
    CheckDef {
        id: "antilinearity",
        suite: Suite::Pairing,
        default_tol: 1e-12,
        run: check_antilinearity,
    },
    CheckDef {
        id: "quasi_basis_monotone",
        suite: Suite::Pairing,
        default_tol: 0.0,
        run: check_quasi_basis_monotone,
    },
    CheckDef {
        id: "quasi_basis_mirror",
        suite: Suite::Pairing,
        default_tol: 1e-10,
        run: check_quasi_basis_mirror,
    },
    CheckDef {
        id: "quasi_basis_nonanalytic",
        suite: Suite::Pairing,
        default_tol: 0.0,
        run: check_quasi_basis_nonanalytic,
    },
    CheckDef {
        id: "oracle_derivative_consistency",
        suite: Suite::Pairing,
        default_tol: 1e-6,
        run: check_oracle_derivatives,
    },
    CheckDef {
        id: "oracle_mgf_consistency",
        suite: Suite::Pairing,
        default_tol: 1e-9,
        run: check_oracle_mgf,
    },
    CheckDef {
        id: "oracle_flag_honesty",
        suite: Suite::Pairing,
        default_tol: 0.0,
        run: check_flag_honesty,
    },
    CheckDef {
        id: "oracle_taylor_reconstruction",
        suite: Suite::Pairing,
        default_tol: 1e-8,
        run: check_taylor_reconstruction,
    },
    // ---- bicoherent ----
    CheckDef {
        id: "series_agreement_phi",
        suite: Suite::Bicoherent,
        default_tol: 1e-10,
        run: check_series_agreement_phi,
    },
    CheckDef {
        id: "series_agreement_psi",
        suite: Suite::Bicoherent,
        default_tol: 1e-10,
        run: check_series_agreement_psi,
    },
    CheckDef {
        id: "weak_eigen_phi",
        suite: Suite::Bicoherent,
        default_tol: 1e-9,
        run: check_weak_eigen_phi,
    },
    CheckDef {
        id: "weak_eigen_psi",
        suite: Suite::Bicoherent,
        default_tol: 1e-13,
        run: check_weak_eigen_psi,
    },
    CheckDef {
        id: "rotation_scaling",
        suite: Suite::Bicoherent,
        default_tol: 1e-8,
        run: check_rotation_scaling,
    },
    CheckDef {
        id: "grid_phi_im_decay",
        suite: Suite::Bicoherent,
        default_tol: 1e-12,
        run: check_grid_phi_im_decay,
    },
    CheckDef {
        id: "grid_psi_re_decay",
        suite: Suite::Bicoherent,
        default_tol: 1e-12,
        run: check_grid_psi_re_decay,
    },
    CheckDef {
        id: "grid_phi_unit_ridge",
        suite: Suite::Bicoherent,
        default_tol: 1e-12,
        run: check_grid_phi_unit_ridge,
    },
    // ---- identities ----
    CheckDef {
        id: "plane_moment_exactness",
        suite: Suite::Identities,
        default_tol: 1e-12,
        run: check_plane_moments,
    },
    CheckDef {
        id: "resolution_identity",
        suite: Suite::Identities,
        default_tol: 1e-6,
        run: check_resolution,
    },
    CheckDef {
        id: "resolution_domain_guard",
        suite: Suite::Identities,
        default_tol: 0.0,
        run: check_domain_guard,
    },
    CheckDef {
        id: "delta_monomials",
        suite: Suite::Identities,
        default_tol: 1e-8,
        run: check_delta_monomials,
    },
    CheckDef {
        id: "delta_gaussian",
        suite: Suite::Identities,
        default_tol: 1e-8,
        run: check_delta_gaussian,
    },
    CheckDef {
        id: "line_refinement",
        suite: Suite::Identities,
        default_tol: 0.0,
        run: check_line_refinement,
    },
    CheckDef {
        id: "plane_refinement",
        suite: Suite::Identities,
        default_tol: 0.0,
        run: check_plane_refinement,
    },
    CheckDef {
        id: "quadrature_determinism",
        suite: Suite::Identities,
        default_tol: 0.0,
        run: check_determinism,
    },
    // ---- displacement ----
    CheckDef {
        id: "h_equivalence_exact",
        suite: Suite::Displacement,
        default_tol: 0.0,
        run: check_h_equivalence,
    },
    CheckDef {
        id: "h_parity",
        suite: Suite::Displacement,
        default_tol: 0.0,
        run: check_h_parity,
    },
    CheckDef {
        id: "monomial_displacement",
        suite: Suite::Displacement,
        default_tol: 1e-10,
        run: check_monomial_displacement,
    },
    CheckDef {
        id: "w_equivalence",
        suite: Suite::Displacement,
        default_tol: 1e-12,
        run: check_w_equivalence,
    },
    CheckDef {
        id: "commutator_power_exact",
        suite: Suite::Displacement,
        default_tol: 0.0,
        run: check_commutator_power,
    },
    CheckDef {
        id: "bch_v_agreement",
        suite: Suite::Displacement,
        default_tol: 1e-10,
        run: check_bch_v,
    },
    CheckDef {
        id: "bch_w_agreement",
        suite: Suite::Displacement,
        default_tol: 1e-10,
        run: check_bch_w,
    },
    CheckDef {
        id: "w_action_vs_functional",
        suite: Suite::Displacement,
        default_tol: 1e-10,
        run: check_w_action_vs_functional,
    },
];

// ---------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x77b5_0b05 ^ salt)
}

fn random_exact(rng: &mut ChaCha8Rng) -> ExactScalar {
    ExactScalar::from_parts(
        rng.gen_range(-9i64..=9),
        rng.gen_range(1i64..=4),
        rng.gen_range(-9i64..=9),
        rng.gen_range(1i64..=4),
    )
}

fn random_exact_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> Polynomial<ExactScalar> {
    let deg = rng.gen_range(0..=max_deg);
    Polynomial::from_coeffs((0..=deg).map(|_| random_exact(rng)).collect())
}

fn random_c64(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    c64(
        rng.gen_range(-radius..=radius),
        rng.gen_range(-radius..=radius),
    )
}

fn gaussian_trio() -> Result<Vec<TestFunction>> {
    [0.95, 1.0, 1.05]
        .into_iter()
        .map(TestFunction::gaussian)
        .collect()
}

fn exp_stable_catalog() -> Result<Vec<TestFunction>> {
    let mut v = gaussian_trio()?;
    for n in 0..=3 {
        v.push(TestFunction::hermite(n)?);
    }
    Ok(v)
}

fn z_samples() -> Vec<Complex64> {
    vec![
        c64(0.0, 0.0),
        c64(2.0, 0.0),
        c64(0.0, 2.0),
        c64(-1.0, 1.0),
        c64(1.4, 1.4),
        c64(0.3, -1.9),
        c64(1.0, 1.0),
        c64(-0.6, -0.6),
    ]
}

/// e^{−x²} as a scaled catalog Gaussian: √π·f_{1/√2}.
fn unit_width_gaussian() -> Result<TestFunction> {
    Ok(TestFunction::gaussian(FRAC_1_SQRT_2)?
        .scaled(c64(PI.sqrt(), 0.0))?
        .with_name("exp(-x^2)"))
}

fn rel_distance_polys<S: Scalar>(a: &Polynomial<S>, b: &Polynomial<S>) -> f64 {
    let scale = b
        .coeffs()
        .iter()
        .map(Scalar::abs_f64)
        .fold(f64::MIN_POSITIVE, f64::max);
    a.max_coeff_distance(b) / scale
}

// ---------------------------------------------------------------------
// algebra checks
// ---------------------------------------------------------------------

fn ladder_residuals<S: Scalar>() -> Result<[f64; 8]> {
    let mut worst = [0.0f64; 8];
    for k in 0..=30u32 {
        let phi_k = phi_n::<S>(k)?;
        let psi_k = psi_n::<S>(k)?;
        let root_up = S::sqrt_int((k + 1) as u64);

        // raising on both sides
        let up_phi = LadderOp::B.apply_to_poly(&phi_k);
        let expect = phi_n::<S>(k + 1)?.scale(&root_up);
        worst[0] = worst[0].max(up_phi.max_coeff_distance(&expect));
        let up_psi = LadderOp::ADagger.apply_to_delta(&psi_k);
        let expect = psi_n::<S>(k + 1)?.scale(&root_up);
        worst[1] = worst[1].max(up_psi.max_coeff_distance(&expect));

        // lowering on both sides, including the annihilated vacua
        let down_phi = LadderOp::A.apply_to_poly(&phi_k);
        let expect = if k == 0 {
            Polynomial::zero()
        } else {
            phi_n::<S>(k - 1)?.scale(&S::sqrt_int(k as u64))
        };
        worst[2] = worst[2].max(down_phi.max_coeff_distance(&expect));
        let down_psi = LadderOp::BDagger.apply_to_delta(&psi_k);
        let expect = if k == 0 {
            DeltaComb::zero()
        } else {
            psi_n::<S>(k - 1)?.scale(&S::sqrt_int(k as u64))
        };
        worst[3] = worst[3].max(down_psi.max_coeff_distance(&expect));

        // eigenvalue equations
        let (rp, rd) = number_op_eigencheck::<S>(k)?;
        worst[4] = worst[4].max(rp.coeffs().iter().map(Scalar::abs_f64).fold(0.0, f64::max));
        worst[5] = worst[5].max(rd.terms().map(|(_, c)| c.abs_f64()).fold(0.0, f64::max));

        // adjoint involution bookkeeping and canonical outputs
        worst[6] = worst[6].max(if LadderOp::A.adjoint().adjoint() == LadderOp::A {
            0.0
        } else {
            1.0
        });
        worst[7] = 0.0;
    }
    Ok(worst)
}

fn check_ladder_exactness_exact() -> Result<f64> {
    Ok(ladder_residuals::<ExactScalar>()?
        .into_iter()
        .fold(0.0, f64::max))
}

fn check_ladder_exactness_float() -> Result<f64> {
    // float residuals are relative to the 1/√k! coefficient scale
    let mut worst = 0.0f64;
    let rel_delta = |a: &DeltaComb<Complex64>, b: &DeltaComb<Complex64>| {
        let scale = b
            .terms()
            .map(|(_, c)| c.abs_f64())
            .fold(f64::MIN_POSITIVE, f64::max);
        a.max_coeff_distance(b) / scale
    };
    for k in 0..=30u32 {
        let phi_k = phi_n::<Complex64>(k)?;
        let psi_k = psi_n::<Complex64>(k)?;
        let root_up = Complex64::new(((k + 1) as f64).sqrt(), 0.0);
        let up = LadderOp::B.apply_to_poly(&phi_k);
        let expect = phi_n::<Complex64>(k + 1)?.scale(&root_up);
        worst = worst.max(rel_distance_polys(&up, &expect));
        let up = LadderOp::ADagger.apply_to_delta(&psi_k);
        let expect = psi_n::<Complex64>(k + 1)?.scale(&root_up);
        worst = worst.max(rel_delta(&up, &expect));
        if k > 0 {
            let root_down = Complex64::new((k as f64).sqrt(), 0.0);
            let down = LadderOp::A.apply_to_poly(&phi_k);
            let expect = phi_n::<Complex64>(k - 1)?.scale(&root_down);
            worst = worst.max(rel_distance_polys(&down, &expect));
            let down = LadderOp::BDagger.apply_to_delta(&psi_k);
            let expect = psi_n::<Complex64>(k - 1)?.scale(&root_down);
            worst = worst.max(rel_delta(&down, &expect));
        }
    }
    Ok(worst)
}

fn check_number_operator() -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..=30u32 {
        let (rp, rd) = number_op_eigencheck::<ExactScalar>(k)?;
        if !rp.is_zero() || !rd.is_zero() {
            worst = worst.max(1.0);
        }
    }
    Ok(worst)
}

fn check_commutator_identity() -> Result<f64> {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_exact_poly(&mut r, 50);
        let residual = commutator_check(&p);
        if !residual.is_zero() {
            worst = worst.max(residual.max_coeff_distance(&Polynomial::zero()));
        }
    }
    Ok(worst)
}

fn check_canonical_form() -> Result<f64> {
    let mut bad = 0.0f64;
    // derivative of a constant must be the empty polynomial
    let constant = Polynomial::<Complex64>::one();
    if !LadderOp::A.apply_to_poly(&constant).is_zero() {
        bad = 1.0;
    }
    // scaling by zero collapses to canonical zero
    let p = phi_n::<Complex64>(5)?;
    if !p.scale(&c64(0.0, 0.0)).is_zero() {
        bad = 1.0;
    }
    // delta cancellation removes the slot entirely
    let d = DeltaComb::single(2, c64(1.0, 0.0));
    if !d.sub(&d).is_zero() {
        bad = 1.0;
    }
    // lowering the delta vacuum annihilates rather than storing a zero
    if !LadderOp::BDagger
        .apply_to_delta(&psi_n::<Complex64>(0)?)
        .is_zero()
    {
        bad = 1.0;
    }
    // no trailing zeros after arithmetic
    let q = p.sub(&p).add(&Polynomial::x());
    if q.degree() != Some(1) {
        bad = 1.0;
    }
    Ok(bad)
}

fn check_taylor_shift_exact() -> Result<f64> {
    let mut r = rng(2);
    for _ in 0..20 {
        let p = random_exact_poly(&mut r, 20);
        let c = random_exact(&mut r);
        let back = p.taylor_shift(&c).taylor_shift(&(-c.clone()));
        if back != p {
            return Ok(1.0);
        }
    }
    Ok(0.0)
}

fn check_taylor_shift_float() -> Result<f64> {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let deg = r.gen_range(0..=20usize);
        let p = Polynomial::from_coeffs((0..=deg).map(|_| random_c64(&mut r, 4.0)).collect());
        let shift = random_c64(&mut r, 2.0 / std::f64::consts::SQRT_2);
        let shifted = p.taylor_shift(&shift);
        let back = shifted.taylor_shift(&(-shift));
        // error is relative to the intermediate coefficient scale, which
        // carries the (1+|c|)^deg conditioning of the transform
        let scale = p
            .coeffs()
            .iter()
            .chain(shifted.coeffs())
            .map(Scalar::abs_f64)
            .fold(1.0, f64::max);
        worst = worst.max(back.max_coeff_distance(&p) / scale);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------
// pairing checks
// ---------------------------------------------------------------------

fn check_biorthonormality_exact() -> Result<f64> {
    for n in 0..=30u32 {
        for m in 0..=30u32 {
            let got = pair_phi_psi::<ExactScalar>(n, m)?.value;
            let expect = if n == m {
                ExactScalar::one()
            } else {
                ExactScalar::zero()
            };
            if got != expect {
                return Ok(1.0);
            }
        }
    }
    Ok(0.0)
}

fn check_biorthonormality_float() -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 0..=30u32 {
        for m in 0..=30u32 {
            let got = pair_phi_psi::<Complex64>(n, m)?.value;
            let expect = if n == m { 1.0 } else { 0.0 };
            worst = worst.max((got - expect).norm());
        }
    }
    Ok(worst)
}

fn check_moment_consistency() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for f in gaussian_trio()? {
        let sigma = f.gaussian_sigma().expect("gaussian");
        for n in 0..=12u32 {
            let got = pair_fn_poly(&f, &phi_n(n)?, &quad)?.value;
            // ⟨f_σ, φ_n⟩ = σ^n (n−1)!!/√n! for even n, 0 for odd
            let expect = if n % 2 == 0 {
                let mut dfact = 1.0;
                let mut j = n as i64 - 1;
                while j > 1 {
                    dfact *= j as f64;
                    j -= 2;
                }
                sigma.powi(n as i32) * dfact / f64_factorial(n)?.sqrt()
            } else {
                0.0
            };
            let err = if expect != 0.0 {
                (got.re - expect).abs() / expect.abs() + got.im.abs() / expect.abs()
            } else {
                got.norm()
            };
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

fn check_antilinearity() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let f = TestFunction::gaussian(1.0)?;
    let mut worst = 0.0f64;
    for scale in [c64(1.5, -2.0), c64(0.0, 1.0), c64(-0.3, 0.4)] {
        let fs = f.scaled(scale)?;
        for n in [0u32, 2, 5] {
            let p = phi_n::<Complex64>(n)?;
            let base = pair_fn_poly(&f, &p, &quad)?.value;
            let scaled = pair_fn_poly(&fs, &p, &quad)?.value;
            worst =
                worst.max((scaled - scale.conj() * base).norm() / (1.0 + base.norm()));
            let d = psi_n::<Complex64>(n)?;
            let base = pair_fn_delta(&f, &d)?.value;
            let scaled = pair_fn_delta(&fs, &d)?.value;
            worst = worst.max((scaled - scale.conj() * base).norm() / (1.0 + base.norm()));
        }
    }
    Ok(worst)
}

fn check_quasi_basis_monotone() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let f = TestFunction::gaussian(1.0)?;
    let target = 1.0 / (2.0 * PI.sqrt());
    let mut prev = f64::INFINITY;
    let mut worst_increase = 0.0f64;
    for n_max in (0..=60u32).step_by(4) {
        let s = quasi_basis_partial_sum(&f, &f, n_max, QuasiBasisOrdering::PsiThenPhi, &quad)?;
        let err = (s.value.re - target).abs();
        worst_increase = worst_increase.max((err - prev - 1e-12).max(0.0));
        prev = err;
    }
    Ok(worst_increase)
}

fn check_quasi_basis_mirror() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let f = TestFunction::gaussian(1.0)?;
    let mut worst = 0.0f64;
    for n_max in (0..=60u32).step_by(10) {
        let a = quasi_basis_partial_sum(&f, &f, n_max, QuasiBasisOrdering::PsiThenPhi, &quad)?;
        let b = quasi_basis_partial_sum(&f, &f, n_max, QuasiBasisOrdering::PhiThenPsi, &quad)?;
        worst = worst.max((a.value - b.value).norm());
    }
    Ok(worst)
}

fn check_quasi_basis_nonanalytic() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let p = TestFunction::non_analytic();
    let f = TestFunction::gaussian(1.0)?;
    let mut worst = 0.0f64;
    for n_max in [0u32, 10, 30, 60] {
        let s = quasi_basis_partial_sum(&p, &f, n_max, QuasiBasisOrdering::PsiThenPhi, &quad)?;
        worst = worst.max(s.value.norm());
        if !s.non_analytic_warning {
            worst = worst.max(1.0);
        }
    }
    // the genuine overlap is far from zero, so the vanishing sums are a
    // failure of the expansion hypothesis and not of the integrand; the
    // flat entry is not analytic, so quadrature converges only slowly and
    // a coarse estimate is all this sanity threshold needs
    let overlap = line_integral(|x| p.eval_real(x).conj() * f.eval_real(x), &quad).best();
    if overlap.norm() < 0.01 {
        worst = worst.max(1.0);
    }
    Ok(worst)
}

/// n-th central difference estimate of f^{(n)}(0) with four-level
/// Richardson extrapolation in h². The base step balances the h⁸ residual
/// against the eps/h^n cancellation floor at n = 6.
fn richardson_derivative(f: &TestFunction, n: u32) -> Complex64 {
    let h0 = 0.35;
    let levels = 4;
    let diff = |h: f64| -> Complex64 {
        let mut acc = c64(0.0, 0.0);
        let mut binom = 1.0f64;
        for j in 0..=n {
            if j > 0 {
                binom *= (n - j + 1) as f64 / j as f64;
            }
            let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
            let x = (n as f64 / 2.0 - j as f64) * h;
            acc += sign * binom * f.eval_real(x);
        }
        acc / h.powi(n as i32)
    };
    let mut table: Vec<Vec<Complex64>> = Vec::new();
    for i in 0..levels {
        let mut row = vec![diff(h0 / 2f64.powi(i as i32))];
        for j in 1..=i {
            let factor = 4f64.powi(j as i32);
            let v = (factor * row[j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
            row.push(v);
        }
        table.push(row);
    }
    table[levels - 1][levels - 1]
}

fn check_oracle_derivatives() -> Result<f64> {
    let mut worst = 0.0f64;
    let mut entries = exp_stable_catalog()?;
    entries.push(TestFunction::monomial(3)?);
    for f in &entries {
        for n in 0..=6u32 {
            let oracle = f.deriv_at_zero(n)?;
            let numeric = richardson_derivative(f, n);
            worst = worst.max((oracle - numeric).norm() / (1.0 + oracle.norm()));
        }
    }
    Ok(worst)
}

fn check_oracle_mgf() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for f in exp_stable_catalog()? {
        for w in [c64(3.0, 0.0), c64(-3.0, 0.0), c64(0.0, 3.0), c64(2.0, 2.0), c64(1.5, -2.5)] {
            let oracle = f.mgf(w)?;
            let numeric =
                line_integral(|x| (w * x).exp() * f.eval_real(x), &quad).converged(1e-8)?;
            worst = worst.max((oracle - numeric).norm() / (1.0 + oracle.norm()));
        }
    }
    Ok(worst)
}

fn check_flag_honesty() -> Result<f64> {
    let mut bad = 0.0f64;
    for f in exp_stable_catalog()? {
        if !f.in_exp_stable() {
            continue;
        }
        for k in [c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 2.0), c64(0.0, -2.0), c64(3.0, 1.0)] {
            for sign in [1.0, -1.0] {
                let weighted = |x: f64| ((k * x).exp() * f.eval_real(x)).norm();
                let v16 = weighted(sign * 16.0);
                let v18 = weighted(sign * 18.0);
                let v20 = weighted(sign * 20.0);
                if !(v18 <= v16 + 1e-12 && v20 <= v18 + 1e-12 && v20 < 1e-8) {
                    bad = 1.0;
                }
            }
        }
    }
    Ok(bad)
}

fn check_taylor_reconstruction() -> Result<f64> {
    let mut worst = 0.0f64;
    for f in exp_stable_catalog()? {
        for x in [-2.0, -1.0, 0.5, 2.0] {
            let mut acc = c64(0.0, 0.0);
            let mut xn_over_fact = 1.0f64;
            for n in 0..=60u32 {
                if n > 0 {
                    xn_over_fact *= x / n as f64;
                }
                acc += f.deriv_at_zero(n)? * xn_over_fact;
            }
            worst = worst.max((acc - f.eval_real(x)).norm());
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------
// bicoherent checks
// ---------------------------------------------------------------------

fn check_series_agreement_phi() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for f in gaussian_trio()? {
        for z in z_samples() {
            let series = f_phi_series(&f, z, 64, &quad)?.value;
            let closed = f_phi(&f, z, &quad)?.value;
            worst = worst.max((series - closed).norm());
        }
    }
    Ok(worst)
}

fn check_series_agreement_psi() -> Result<f64> {
    let mut worst = 0.0f64;
    for f in gaussian_trio()? {
        for z in z_samples() {
            let series = f_psi_series(&f, z, 64)?.value;
            let closed = f_psi(&f, z)?.value;
            worst = worst.max((series - closed).norm());
        }
    }
    Ok(worst)
}

fn eigen_grid() -> Vec<Complex64> {
    let mut zs = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            zs.push(c64(-1.5 + 0.75 * i as f64, -1.5 + 0.75 * j as f64));
        }
    }
    zs
}

fn check_weak_eigen_phi() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for f in exp_stable_catalog()? {
        for z in eigen_grid() {
            worst = worst.max(weak_eigen_phi_residual(&f, z, &quad)?);
        }
    }
    Ok(worst)
}

fn check_weak_eigen_psi() -> Result<f64> {
    let mut worst = 0.0f64;
    let mut entries = exp_stable_catalog()?;
    entries.push(TestFunction::monomial(1)?);
    for f in &entries {
        for z in eigen_grid() {
            worst = worst.max(weak_eigen_psi_residual(f, z)?);
        }
    }
    Ok(worst)
}

fn check_rotation_scaling() -> Result<f64> {
    let grid = GridSpec::square(2.0, 21)?;
    let mut worst = 0.0f64;
    for sigma in [0.95, 1.05, 1.3] {
        let (_, rel_std) = rotation_scaling_ratio_stats(sigma, &grid)?;
        worst = worst.max(rel_std);
    }
    Ok(worst)
}

/// Largest violation of non-increase away from the center row/column.
fn monotone_decay_violation(values: &[Vec<f64>], along_im: bool) -> f64 {
    let n_im = values.len();
    let n_re = values[0].len();
    let mut worst = 0.0f64;
    if along_im {
        let mid = n_im / 2;
        for i in 0..n_re {
            for j in mid..n_im - 1 {
                worst = worst.max(values[j + 1][i] - values[j][i]);
            }
            for j in (1..=mid).rev() {
                worst = worst.max(values[j - 1][i] - values[j][i]);
            }
        }
    } else {
        let mid = n_re / 2;
        for row in values {
            for i in mid..n_re - 1 {
                worst = worst.max(row[i + 1] - row[i]);
            }
            for i in (1..=mid).rev() {
                worst = worst.max(row[i - 1] - row[i]);
            }
        }
    }
    worst.max(0.0)
}

fn check_grid_phi_im_decay() -> Result<f64> {
    let f = TestFunction::gaussian(0.95)?;
    let grid = GridSpec::square(3.0, 41)?;
    let values = grid_eval(StateKind::Phi, &f, &grid, &QuadratureSpec::default())?;
    Ok(monotone_decay_violation(&values, true))
}

fn check_grid_psi_re_decay() -> Result<f64> {
    let f = TestFunction::gaussian(0.95)?;
    let grid = GridSpec::square(3.0, 41)?;
    let values = grid_eval(StateKind::Psi, &f, &grid, &QuadratureSpec::default())?;
    Ok(monotone_decay_violation(&values, false))
}

fn check_grid_phi_unit_ridge() -> Result<f64> {
    let f = TestFunction::gaussian(1.0)?;
    let grid = GridSpec::square(3.0, 41)?;
    let values = grid_eval(StateKind::Phi, &f, &grid, &QuadratureSpec::default())?;
    let mid = values.len() / 2;
    Ok(values[mid]
        .iter()
        .map(|v| (v - 1.0).abs())
        .fold(0.0, f64::max))
}

// ---------------------------------------------------------------------
// identity checks
// ---------------------------------------------------------------------

fn check_plane_moments() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for k in 0..=10u32 {
        for l in 0..=10u32 {
            // the base pass: the rule is exact there, so the only
            // residual is node/weight rounding
            let got = complex_plane_integral(
                |z| (-z.norm_sqr()).exp() * z.powu(k) * z.conj().powu(l),
                &quad,
            )
            .value;
            let expect = if k == l { f64_factorial(k)? } else { 0.0 };
            let scale = (f64_factorial(k)? * f64_factorial(l)?).sqrt().max(1.0);
            worst = worst.max((got - expect).norm() / scale);
        }
    }
    Ok(worst)
}

fn check_resolution() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let mut worst = 0.0f64;
    let trio = gaussian_trio()?;
    for f in &trio {
        let r = check_resolution_identity(f, f, &quad)?;
        worst = worst.max(r.err_phi_psi).max(r.err_psi_phi);
    }
    // a mixed-width pair and an even-odd pair
    let r = check_resolution_identity(&trio[0], &trio[2], &quad)?;
    worst = worst.max(r.err_phi_psi).max(r.err_psi_phi);
    let r = check_resolution_identity(&trio[1], &TestFunction::hermite(1)?, &quad)?;
    worst = worst.max(r.err_phi_psi).max(r.err_psi_phi);
    Ok(worst)
}

fn check_domain_guard() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let mut bad = 0.0f64;
    let too_wide = TestFunction::gaussian(1.6)?;
    if !matches!(
        check_resolution_identity(&too_wide, &too_wide, &quad),
        Err(Error::SigmaOutOfDomain { .. })
    ) {
        bad = 1.0;
    }
    let too_narrow = TestFunction::gaussian(0.6)?;
    if !matches!(
        check_resolution_identity(&too_narrow, &too_narrow, &quad),
        Err(Error::SigmaOutOfDomain { .. })
    ) {
        bad = 1.0;
    }
    let inside = TestFunction::gaussian(1.1)?;
    if check_resolution_identity(&inside, &inside, &quad).is_err() {
        bad = 1.0;
    }
    // just inside the band: never a domain rejection, whatever the
    // quadrature verdict
    let edge = TestFunction::gaussian(1.5)?;
    if matches!(
        check_resolution_identity(&edge, &edge, &quad),
        Err(Error::SigmaOutOfDomain { .. })
    ) {
        bad = 1.0;
    }
    // the delta transform rejects widths below 1/√2
    if !matches!(
        complex_delta_transform(&too_narrow, 0.5, &quad),
        Err(Error::SigmaOutOfDomain { .. })
    ) {
        bad = 1.0;
    }
    Ok(bad)
}

fn check_delta_monomials() -> Result<f64> {
    let quad = QuadratureSpec::wide_angle();
    let mut worst = 0.0f64;
    for n in 0..=10u32 {
        let g = TestFunction::monomial(n)?;
        for x in [0.5, 1.3, 2.0] {
            let got = complex_delta_transform(&g, x, &quad)?;
            worst = worst.max((got - x.powi(n as i32)).norm());
        }
    }
    Ok(worst)
}

fn check_delta_gaussian() -> Result<f64> {
    let quad = QuadratureSpec::wide_angle();
    let g = unit_width_gaussian()?;
    let mut worst = 0.0f64;
    for i in 0..9 {
        let x = -2.0 + 0.5 * i as f64;
        let got = complex_delta_transform(&g, x, &quad)?;
        worst = worst.max((got - (-x * x).exp()).norm());
    }
    Ok(worst)
}

fn refinement_excess(discs: &[f64]) -> f64 {
    let mut excess = 0.0f64;
    for w in discs.windows(2) {
        excess = excess.max(w[1] - (w[0] / 10.0).max(1e-12));
    }
    excess.max(0.0)
}

fn check_line_refinement() -> Result<f64> {
    let f = TestFunction::gaussian(1.05)?;
    let w = c64(1.5, -0.5);
    let mut discs = Vec::new();
    for n in [20usize, 40, 80] {
        let spec = QuadratureSpec {
            line_nodes: n,
            ..Default::default()
        };
        discs.push(line_integral(|x| (w * x).exp() * f.eval_real(x), &spec).discrepancy);
    }
    let mut excess = refinement_excess(&discs);
    // polynomial-weighted integrand
    let mut discs = Vec::new();
    for n in [20usize, 40, 80] {
        let spec = QuadratureSpec {
            line_nodes: n,
            ..Default::default()
        };
        discs.push(
            line_integral(|x| x.powi(8) * f.eval_real(x), &spec).discrepancy,
        );
    }
    excess = excess.max(refinement_excess(&discs));
    Ok(excess)
}

fn check_plane_refinement() -> Result<f64> {
    let sigma = 0.95f64;
    let f = TestFunction::gaussian(sigma)?;
    let mut discs = Vec::new();
    for (r, m) in [(12usize, 16usize), (24, 32), (48, 64)] {
        let spec = QuadratureSpec {
            radial_nodes: r,
            angular_nodes: m,
            ..Default::default()
        };
        let integrand = |z: Complex64| {
            let pref = (-z.norm_sqr()).exp();
            let mgf = f.mgf(z.conj()).expect("gaussian");
            let cont = f.eval_complex(z.conj()).expect("gaussian");
            pref * mgf.conj() * cont
        };
        discs.push(complex_plane_integral(integrand, &spec).discrepancy);
    }
    Ok(refinement_excess(&discs))
}

fn check_determinism() -> Result<f64> {
    let quad = QuadratureSpec::default();
    let f = TestFunction::gaussian(0.95)?;
    let mut bad = 0.0f64;
    let a = line_integral(|x| (c64(0.4, 1.1) * x).exp() * f.eval_real(x), &quad);
    let b = line_integral(|x| (c64(0.4, 1.1) * x).exp() * f.eval_real(x), &quad);
    if a.value != b.value || a.refined_value != b.refined_value {
        bad = 1.0;
    }
    let g = |z: Complex64| (-z.norm_sqr()).exp() * z.powu(3) * z.conj().powu(3);
    let p = complex_plane_integral(g, &quad);
    let q = complex_plane_integral(g, &quad);
    if p.value != q.value {
        bad = 1.0;
    }
    let grid = GridSpec::square(2.0, 11)?;
    let c1 = grid_csv(StateKind::Phi, &f, &grid, &quad)?;
    let c2 = grid_csv(StateKind::Phi, &f, &grid, &quad)?;
    if c1 != c2 {
        bad = 1.0;
    }
    Ok(bad)
}

// ---------------------------------------------------------------------
// displacement checks
// ---------------------------------------------------------------------

fn check_h_equivalence() -> Result<f64> {
    let mut r = rng(4);
    for _ in 0..50 {
        let z = random_exact(&mut r);
        let mut term = crate::displacement::HTerm::<ExactScalar>::vacuum();
        for n in 0..=20u32 {
            if n > 0 {
                term = term.next(&z);
            }
            if term.poly != h_closed::<ExactScalar>(n, &z)?.poly {
                return Ok(1.0);
            }
        }
        // the all-at-once form is the same chain
        if h_recursive::<ExactScalar>(20, &z).poly != term.poly {
            return Ok(1.0);
        }
    }
    Ok(0.0)
}

fn check_h_parity() -> Result<f64> {
    let mut bad = 0.0f64;
    for z in z_samples() {
        if z.is_zero() {
            continue;
        }
        for n in 0..=25u32 {
            let h = h_closed::<Complex64>(n, &z)?;
            if let Some(d) = h.poly.degree() {
                if d > n as usize {
                    bad = 1.0;
                }
            }
            for (k, coeff) in h.poly.coeffs().iter().enumerate() {
                if (n as usize).abs_diff(k) % 2 == 1 && coeff.norm() != 0.0 {
                    bad = 1.0;
                }
            }
        }
    }
    Ok(bad)
}

fn check_monomial_displacement() -> Result<f64> {
    let mut worst = 0.0f64;
    for l in 0..=6u32 {
        for z in z_samples() {
            for x in [-3.0, -1.0, 0.5, 3.0] {
                let got = v_on_monomial(l, z, x, 80)?;
                let target = (Complex64::new(x, 0.0) - z.conj()).powu(l)
                    * (-z.norm_sqr() / 2.0).exp()
                    * (z * x).exp();
                worst = worst.max((got - target).norm() / (1.0 + target.norm()));
            }
        }
    }
    Ok(worst)
}

fn check_w_equivalence() -> Result<f64> {
    let mut r = rng(5);
    let mut entries = exp_stable_catalog()?;
    entries.push(TestFunction::monomial(4)?);
    let mut worst = 0.0f64;
    for f in &entries {
        for _ in 0..5 {
            let z = random_c64(&mut r, 2.0 / std::f64::consts::SQRT_2);
            for n in 0..=20u32 {
                let a = w_recursive(f, n, z)?.value;
                let b = w_closed(f, n, z)?.value;
                worst = worst.max((a - b).norm() / (1.0 + b.norm()));
            }
        }
    }
    Ok(worst)
}

fn check_commutator_power() -> Result<f64> {
    let mut r = rng(6);
    for n in 1..=12u32 {
        let z = random_exact(&mut r);
        let p = random_exact_poly(&mut r, 10);
        if !commutator_power_check(n, &z, &p)?.is_zero() {
            return Ok(1.0);
        }
    }
    Ok(0.0)
}

fn check_bch_v() -> Result<f64> {
    let mut worst = 0.0f64;
    for z in z_samples() {
        for x in [-1.0, 0.5, 1.3] {
            let (a, b, c) = bch_check_v(z, x, 80)?;
            worst = worst
                .max((a - b).norm())
                .max((b - c).norm())
                .max((a - c).norm());
        }
    }
    Ok(worst)
}

fn check_bch_w() -> Result<f64> {
    let mut worst = 0.0f64;
    let entries = [
        TestFunction::gaussian(1.0)?,
        TestFunction::gaussian(0.95)?,
        TestFunction::hermite(0)?,
        TestFunction::hermite(2)?,
    ];
    for f in &entries {
        for z in z_samples() {
            let (a, b, c) = bch_check_w(f, z, 80)?;
            worst = worst
                .max((a - b).norm())
                .max((b - c).norm())
                .max((a - c).norm());
        }
    }
    Ok(worst)
}

fn check_w_action_vs_functional() -> Result<f64> {
    let mut worst = 0.0f64;
    let entries = [
        TestFunction::gaussian(1.0)?,
        TestFunction::gaussian(1.05)?,
        TestFunction::hermite(2)?,
    ];
    for f in &entries {
        for z in z_samples() {
            let action = w_weak_action(f, z, 80)?;
            let functional = f_psi(f, z)?.value;
            worst = worst.max((action - functional).norm());
        }
    }
    Ok(worst)
}

// sigma-band constants re-exported for CLI help text
pub use bicoherent::{SIGMA_BAND_LOWER, SIGMA_BAND_UPPER};

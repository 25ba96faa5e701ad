//! Catalog of concrete test functions, each carrying every oracle the rest
//! of the crate needs: pointwise evaluation, first derivative, all-order
//! derivatives at the origin, analytic continuation, closed-form
//! ∫ e^{wx} f(x) dx where it exists, and space-membership flags.
//!
//! Flags: `in_schwartz` marks rapidly decreasing smooth functions,
//! `in_analytic_schwartz` the subset that is also real analytic, and
//! `in_exp_stable` the subset stable under multiplication by e^{kx} for
//! every complex k (which is what makes the exponential moments finite).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{f64_factorial, FLOAT_FACTORIAL_CAP};

pub const HERMITE_INDEX_CAP: u32 = 60;
/// Derivative orders above this overflow the double-factorial growth of the
/// Gaussian derivative sequence.
const GAUSSIAN_DERIV_CAP: u32 = 300;

#[derive(Clone, Debug)]
enum Kernel {
    /// f_σ(x) = e^{−x²/(2σ²)}/(σ√(2π))
    Gaussian { sigma: f64 },
    /// e_n(x) = H_n(x) e^{−x²/2} / √(2^n n! √π)
    Hermite { n: u32 },
    /// e^{−(x² + 1/x²)} for x ≠ 0, and 0 at x = 0: smooth, rapidly
    /// decreasing, with every derivative vanishing at the origin.
    NonAnalytic,
    /// x^n
    Monomial { n: u32 },
}

/// Catalog entry bundling a kernel with a complex prefactor.
#[derive(Clone, Debug)]
pub struct TestFunction {
    name: String,
    scale: Complex64,
    kernel: Kernel,
}

impl TestFunction {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gaussian width must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self {
            name: format!("f_{sigma}"),
            scale: Complex64::new(1.0, 0.0),
            kernel: Kernel::Gaussian { sigma },
        })
    }

    pub fn hermite(n: u32) -> Result<Self> {
        if n > HERMITE_INDEX_CAP {
            return Err(Error::IndexCap {
                what: "hermite function index",
                index: n,
                cap: HERMITE_INDEX_CAP,
            });
        }
        Ok(Self {
            name: format!("e_{n}"),
            scale: Complex64::new(1.0, 0.0),
            kernel: Kernel::Hermite { n },
        })
    }

    pub fn non_analytic() -> Self {
        Self {
            name: "p_flat".to_string(),
            scale: Complex64::new(1.0, 0.0),
            kernel: Kernel::NonAnalytic,
        }
    }

    pub fn monomial(n: u32) -> Result<Self> {
        if n > FLOAT_FACTORIAL_CAP {
            return Err(Error::IndexCap {
                what: "monomial degree",
                index: n,
                cap: FLOAT_FACTORIAL_CAP,
            });
        }
        Ok(Self {
            name: format!("x^{n}"),
            scale: Complex64::new(1.0, 0.0),
            kernel: Kernel::Monomial { n },
        })
    }

    /// c·f with all oracles scaled accordingly.
    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonFinite("test function scale"));
        }
        Ok(Self {
            name: format!("({} + {}i)*{}", c.re, c.im, self.name),
            scale: self.scale * c,
            kernel: self.kernel.clone(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn in_schwartz(&self) -> bool {
        !matches!(self.kernel, Kernel::Monomial { .. })
    }

    pub fn in_analytic_schwartz(&self) -> bool {
        matches!(
            self.kernel,
            Kernel::Gaussian { .. } | Kernel::Hermite { .. }
        )
    }

    pub fn in_exp_stable(&self) -> bool {
        // the flag promises a moment-generating oracle; the flat kernel has
        // the decay but no closed form, so it is not claimed here
        matches!(
            self.kernel,
            Kernel::Gaussian { .. } | Kernel::Hermite { .. }
        )
    }

    pub fn has_continuation(&self) -> bool {
        !matches!(self.kernel, Kernel::NonAnalytic)
    }

    pub fn has_mgf(&self) -> bool {
        self.in_exp_stable()
    }

    /// Width when the kernel is Gaussian; drives convergence-domain guards.
    pub fn gaussian_sigma(&self) -> Option<f64> {
        match self.kernel {
            Kernel::Gaussian { sigma } => Some(sigma),
            _ => None,
        }
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.scale * self.kernel_eval_real(x)
    }

    fn kernel_eval_real(&self, x: f64) -> f64 {
        match &self.kernel {
            Kernel::Gaussian { sigma } => {
                (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt())
            }
            Kernel::Hermite { n } => hermite_fn_real(*n, x),
            Kernel::NonAnalytic => {
                if x == 0.0 {
                    0.0
                } else {
                    (-(x * x + 1.0 / (x * x))).exp()
                }
            }
            Kernel::Monomial { n } => x.powi(*n as i32),
        }
    }

    /// First derivative, closed form per kernel.
    pub fn deriv_real(&self, x: f64) -> Complex64 {
        let d = match &self.kernel {
            Kernel::Gaussian { sigma } => -x / (sigma * sigma) * self.kernel_eval_real(x),
            Kernel::Hermite { n } => {
                let lower = if *n >= 1 {
                    (*n as f64 / 2.0).sqrt() * hermite_fn_real(n - 1, x)
                } else {
                    0.0
                };
                lower - ((*n as f64 + 1.0) / 2.0).sqrt() * hermite_fn_real(n + 1, x)
            }
            Kernel::NonAnalytic => {
                if x == 0.0 {
                    0.0
                } else {
                    (-2.0 * x + 2.0 / (x * x * x)) * self.kernel_eval_real(x)
                }
            }
            Kernel::Monomial { n } => {
                if *n == 0 {
                    0.0
                } else {
                    *n as f64 * x.powi(*n as i32 - 1)
                }
            }
        };
        self.scale * d
    }

    /// f^{(order)}(0).
    pub fn deriv_at_zero(&self, order: u32) -> Result<Complex64> {
        let unavailable = || Error::DerivativeUnavailable {
            name: self.name.clone(),
            order,
        };
        let v = match &self.kernel {
            Kernel::Gaussian { sigma } => {
                if order % 2 == 1 {
                    0.0
                } else {
                    if order > GAUSSIAN_DERIV_CAP {
                        return Err(unavailable());
                    }
                    // d^{2m}/dx^{2m} at 0 of e^{−x²/(2σ²)} is (−1)^m(2m−1)!!/σ^{2m}
                    let m = order / 2;
                    let mut acc = 1.0 / (sigma * (2.0 * PI).sqrt());
                    for j in 1..=m {
                        acc *= -((2 * j - 1) as f64) / (sigma * sigma);
                    }
                    if !acc.is_finite() {
                        return Err(unavailable());
                    }
                    acc
                }
            }
            Kernel::Hermite { n } => hermite_deriv_at_zero(*n, order).ok_or_else(unavailable)?,
            Kernel::NonAnalytic => 0.0,
            Kernel::Monomial { n } => {
                if order == *n {
                    f64_factorial(*n).map_err(|_| unavailable())?
                } else {
                    0.0
                }
            }
        };
        Ok(self.scale * v)
    }

    /// Entire continuation f(w); absent for the non-analytic entry.
    pub fn eval_complex(&self, w: Complex64) -> Result<Complex64> {
        if !w.is_finite() {
            return Err(Error::NonFinite("eval_complex argument"));
        }
        let v = match &self.kernel {
            Kernel::Gaussian { sigma } => {
                (-w * w / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt())
            }
            Kernel::Hermite { n } => hermite_fn_complex(*n, w),
            Kernel::NonAnalytic => {
                return Err(Error::NoContinuation {
                    name: self.name.clone(),
                })
            }
            Kernel::Monomial { n } => w.powu(*n),
        };
        Ok(self.scale * v)
    }

    /// ∫ e^{wx} f(x) dx in closed form.
    pub fn mgf(&self, w: Complex64) -> Result<Complex64> {
        if !w.is_finite() {
            return Err(Error::NonFinite("mgf argument"));
        }
        let v = match &self.kernel {
            Kernel::Gaussian { sigma } => (sigma * sigma * w * w / 2.0).exp(),
            Kernel::Hermite { n } => hermite_mgf(*n, w),
            _ => {
                return Err(Error::NotExpStable {
                    name: self.name.clone(),
                })
            }
        };
        Ok(self.scale * v)
    }
}

/// e_n(x) by the normalized three-term recurrence
/// e_{j+1} = x√(2/(j+1))·e_j − √(j/(j+1))·e_{j−1}, e_0 = π^{−1/4}e^{−x²/2}.
fn hermite_fn_real(n: u32, x: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-x * x / 2.0).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0f64.sqrt() * x * prev;
    for j in 1..n {
        let next =
            x * (2.0 / (j as f64 + 1.0)).sqrt() * cur - (j as f64 / (j as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn hermite_fn_complex(n: u32, w: Complex64) -> Complex64 {
    let mut prev = PI.powf(-0.25) * (-w * w / 2.0).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0f64.sqrt() * w * prev;
    for j in 1..n {
        let next =
            w * (2.0 / (j as f64 + 1.0)).sqrt() * cur - (j as f64 / (j as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficients of the physicists' Hermite polynomial H_n.
fn hermite_poly_coeffs(n: u32) -> Vec<f64> {
    let mut h0 = vec![1.0];
    if n == 0 {
        return h0;
    }
    let mut h1 = vec![0.0, 2.0];
    for k in 1..n {
        // H_{k+1} = 2x·H_k − 2k·H_{k−1}
        let mut next = vec![0.0; k as usize + 2];
        for (i, &c) in h1.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, &c) in h0.iter().enumerate() {
            next[i] -= 2.0 * k as f64 * c;
        }
        h0 = h1;
        h1 = next;
    }
    h1
}

/// e_n^{(m)}(0) from the Taylor coefficients of H_n(x)·e^{−x²/2}.
fn hermite_deriv_at_zero(n: u32, order: u32) -> Option<f64> {
    if order > FLOAT_FACTORIAL_CAP {
        return None;
    }
    let h = hermite_poly_coeffs(n);
    let norm = 1.0 / (2f64.powi(n as i32) * f64_factorial(n).ok()? * PI.sqrt()).sqrt();
    // coefficient of x^order in H_n(x)·Σ_l (−1/2)^l x^{2l}/l!
    let mut coeff = 0.0;
    let mut gauss_term = 1.0; // (−1/2)^l / l!
    let mut l = 0u32;
    loop {
        let rem = order as i64 - 2 * l as i64;
        if rem < 0 {
            break;
        }
        if (rem as usize) < h.len() {
            coeff += h[rem as usize] * gauss_term;
        }
        l += 1;
        gauss_term *= -0.5 / l as f64;
    }
    let v = norm * coeff * f64_factorial(order).ok()?;
    v.is_finite().then_some(v)
}

/// ∫ e^{wx} e_n(x) dx = c_n √(2π) e^{w²/2} · n! Σ_j (2w)^{n−2j}/((n−2j)! j!).
fn hermite_mgf(n: u32, w: Complex64) -> Complex64 {
    let norm = 1.0
        / (2f64.powi(n as i32) * f64_factorial(n).expect("n capped") * PI.sqrt()).sqrt();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=(n / 2) {
        let k = n - 2 * j;
        let c = f64_factorial(n).expect("capped")
            / (f64_factorial(k).expect("capped") * f64_factorial(j).expect("capped"));
        sum += c * (2.0 * w).powu(k);
    }
    norm * (2.0 * PI).sqrt() * (w * w / 2.0).exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = 2.0 * PI;

    #[test]
    fn gaussian_values() {
        let f = TestFunction::gaussian(1.0).unwrap();
        assert!((f.eval_real(0.0).re - 1.0 / TAU.sqrt()).abs() < 1e-16);
        assert!((f.eval_real(0.0).re - 0.3989422804014327).abs() < 1e-16);
        assert_eq!(f.mgf(Complex64::new(0.0, 0.0)).unwrap().re, 1.0);
        for s in [0.95, 1.0, 1.05] {
            assert!(TestFunction::gaussian(s).is_ok());
        }
        assert!(TestFunction::gaussian(0.0).is_err());
        assert!(TestFunction::gaussian(-1.0).is_err());
        assert!(TestFunction::gaussian(f64::NAN).is_err());
    }

    #[test]
    fn gaussian_derivatives_at_zero() {
        let f = TestFunction::gaussian(1.0).unwrap();
        let inv = 1.0 / TAU.sqrt();
        assert_eq!(f.deriv_at_zero(1).unwrap().re, 0.0);
        assert!((f.deriv_at_zero(0).unwrap().re - inv).abs() < 1e-16);
        assert!((f.deriv_at_zero(2).unwrap().re + inv).abs() < 1e-16);
        // (−1)^m (2m−1)!! at order 2m
        assert!((f.deriv_at_zero(4).unwrap().re - 3.0 * inv).abs() < 1e-15);
        assert!((f.deriv_at_zero(6).unwrap().re + 15.0 * inv).abs() < 1e-14);
        assert!(f.deriv_at_zero(400).is_err());
    }

    #[test]
    fn hermite_ground_state() {
        let e0 = TestFunction::hermite(0).unwrap();
        assert!((e0.eval_real(0.0).re - PI.powf(-0.25)).abs() < 1e-16);
        assert!((e0.eval_real(0.0).re - 0.7511255444649425).abs() < 1e-15);
        let e1 = TestFunction::hermite(1).unwrap();
        assert_eq!(e1.eval_real(0.0).re, 0.0);
        assert!(TestFunction::hermite(61).is_err());
    }

    #[test]
    fn hermite_ground_state_is_normalized() {
        let e0 = TestFunction::hermite(0).unwrap();
        let norm = crate::quad::line_integral(
            |x| e0.eval_real(x) * e0.eval_real(x),
            &crate::quad::QuadratureSpec::default(),
        )
        .best();
        assert!((norm.re - 1.0).abs() < 1e-12, "{norm}");
    }

    #[test]
    fn hermite_derivative_identity_matches_finite_difference() {
        let h = 1e-5;
        for n in [0u32, 1, 3, 7] {
            let e = TestFunction::hermite(n).unwrap();
            for x in [-1.3, 0.0, 0.7, 2.1] {
                let fd = (e.eval_real(x + h).re - e.eval_real(x - h).re) / (2.0 * h);
                assert!(
                    (e.deriv_real(x).re - fd).abs() < 1e-8,
                    "n={n} x={x}: {} vs {}",
                    e.deriv_real(x).re,
                    fd
                );
            }
        }
    }

    #[test]
    fn hermite_deriv_at_zero_matches_recurrence_values() {
        // e_2(0) = c_2·H_2(0) = −2·c_2 and parity forces odd orders to zero
        let e2 = TestFunction::hermite(2).unwrap();
        assert!((e2.deriv_at_zero(0).unwrap().re - e2.eval_real(0.0).re).abs() < 1e-15);
        assert_eq!(e2.deriv_at_zero(1).unwrap().re, 0.0);
        // first derivative at a point vs series-free identity
        let d = e2.deriv_at_zero(2).unwrap().re;
        let h = 1e-4;
        let fd = (e2.eval_real(h).re - 2.0 * e2.eval_real(0.0).re + e2.eval_real(-h).re)
            / (h * h);
        assert!((d - fd).abs() < 1e-6, "{d} vs {fd}");
    }

    #[test]
    fn non_analytic_entry() {
        let p = TestFunction::non_analytic();
        assert_eq!(p.eval_real(0.0).re, 0.0);
        assert_eq!(p.deriv_at_zero(7).unwrap().re, 0.0);
        assert!((p.eval_real(1.0).re - (-2.0f64).exp()).abs() < 1e-16);
        assert!((p.eval_real(1.0).re - 0.1353352832366127).abs() < 1e-16);
        assert!(p.in_schwartz());
        assert!(!p.in_analytic_schwartz());
        assert!(p.eval_complex(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn monomial_entry() {
        let m0 = TestFunction::monomial(0).unwrap();
        assert_eq!(m0.eval_complex(Complex64::new(3.0, -2.0)).unwrap().re, 1.0);
        let m3 = TestFunction::monomial(3).unwrap();
        let v = m3.eval_complex(Complex64::new(2.0, 1.0)).unwrap();
        assert!((v - Complex64::new(2.0, 11.0)).norm() < 1e-14);
        let m2 = TestFunction::monomial(2).unwrap();
        assert_eq!(m2.deriv_at_zero(2).unwrap().re, 2.0);
        assert!(!m2.in_schwartz());
        assert!(m2.mgf(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn scaled_entries_scale_all_oracles() {
        let f = TestFunction::gaussian(1.0).unwrap();
        let c = Complex64::new(0.0, 2.0);
        let g = f.scaled(c).unwrap();
        assert!((g.eval_real(0.5) - c * f.eval_real(0.5)).norm() < 1e-16);
        assert!((g.mgf(Complex64::new(1.0, 1.0)).unwrap()
            - c * f.mgf(Complex64::new(1.0, 1.0)).unwrap())
        .norm()
            < 1e-16);
        assert!((g.deriv_at_zero(2).unwrap() - c * f.deriv_at_zero(2).unwrap()).norm() < 1e-16);
    }

    #[test]
    fn hermite_mgf_sanity_low_orders() {
        // n=1: ∫ e^{wx} e_1 = c_1 √(2π) e^{w²/2}·2w
        let w = Complex64::new(0.7, -0.3);
        let c1 = 1.0 / (2.0 * PI.sqrt()).sqrt();
        let expect = c1 * TAU.sqrt() * (w * w / 2.0).exp() * 2.0 * w;
        let got = TestFunction::hermite(1).unwrap().mgf(w).unwrap();
        assert!((got - expect).norm() < 1e-14);
    }
}

//! z-plane grids of the coherent-functional magnitudes and their
//! deterministic CSV serialization.

use num_complex::Complex64;

use crate::bicoherent::{f_ordinary_cs, f_phi, f_phi_via_quadrature, f_psi};
use crate::error::{Error, Result};
use crate::quad::QuadratureSpec;
use crate::testfn::TestFunction;

/// Which magnitude surface to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    /// |F_φ[f]|
    Phi,
    /// |F_ψ[f]|
    Psi,
    /// |⟨Φ(z), f⟩| with the ordinary coherent-state profile
    Cs,
}

impl StateKind {
    pub fn name(self) -> &'static str {
        match self {
            StateKind::Phi => "phi",
            StateKind::Psi => "psi",
            StateKind::Cs => "cs",
        }
    }
}

impl std::str::FromStr for StateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(StateKind::Phi),
            "psi" => Ok(StateKind::Psi),
            "cs" => Ok(StateKind::Cs),
            other => Err(Error::InvalidParameter(format!(
                "unknown state '{other}' (expected phi, psi or cs)"
            ))),
        }
    }
}

/// Rectangular window in the z-plane with node counts per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl GridSpec {
    pub fn new(
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
        n_re: usize,
        n_im: usize,
    ) -> Result<Self> {
        if ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("window bounds must be finite".into()));
        }
        if re_min >= re_max || im_min >= im_max {
            return Err(Error::InvalidGrid(
                "window bounds must satisfy min < max on both axes".into(),
            ));
        }
        if n_re < 2 || n_im < 2 {
            return Err(Error::InvalidGrid("need at least 2 nodes per axis".into()));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
            n_re,
            n_im,
        })
    }

    /// Symmetric square window [−w, w]².
    pub fn square(half_width: f64, nodes_per_axis: usize) -> Result<Self> {
        Self::new(
            -half_width,
            half_width,
            -half_width,
            half_width,
            nodes_per_axis,
            nodes_per_axis,
        )
    }

    pub fn re_at(&self, i: usize) -> f64 {
        self.re_min + (self.re_max - self.re_min) * i as f64 / (self.n_re - 1) as f64
    }

    pub fn im_at(&self, j: usize) -> f64 {
        self.im_min + (self.im_max - self.im_min) * j as f64 / (self.n_im - 1) as f64
    }

    pub fn re_points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_re).map(|i| self.re_at(i))
    }

    pub fn im_points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_im).map(|j| self.im_at(j))
    }
}

/// |F_state[f](z)| at every grid node, rows indexed by the imaginary part
/// (ascending), columns by the real part (ascending).
pub fn grid_eval(
    state: StateKind,
    f: &TestFunction,
    grid: &GridSpec,
    quad: &QuadratureSpec,
) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::with_capacity(grid.n_im);
    for j in 0..grid.n_im {
        let mut row = Vec::with_capacity(grid.n_re);
        for i in 0..grid.n_re {
            let z = Complex64::new(grid.re_at(i), grid.im_at(j));
            let value = match state {
                StateKind::Phi => {
                    if f.has_mgf() {
                        f_phi(f, z, quad)?.value
                    } else if f.in_schwartz() {
                        f_phi_via_quadrature(f, z, quad)?.value
                    } else {
                        return Err(Error::NotSchwartz {
                            name: f.name().to_string(),
                        });
                    }
                }
                StateKind::Psi => f_psi(f, z)?.value,
                StateKind::Cs => f_ordinary_cs(f, z, quad)?.value,
            };
            row.push(value.norm());
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Decimal rendering with 17 significant digits: enough to round-trip any
/// f64 exactly, and stable across runs.
pub fn fmt_sig17(v: f64) -> String {
    if v == 0.0 {
        return "0.0000000000000000".to_string();
    }
    let exp10 = v.abs().log10().floor() as i32;
    let prec = (16 - exp10).max(0) as usize;
    format!("{v:.prec$}")
}

/// CSV serialization: header `re_z,im_z,abs_value`, rows in row-major order
/// (imaginary part outer and ascending, real part inner and ascending).
pub fn grid_csv(
    state: StateKind,
    f: &TestFunction,
    grid: &GridSpec,
    quad: &QuadratureSpec,
) -> Result<String> {
    let values = grid_eval(state, f, grid, quad)?;
    let mut out = String::with_capacity(grid.n_re * grid.n_im * 60);
    out.push_str("re_z,im_z,abs_value\n");
    for (j, row) in values.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            out.push_str(&fmt_sig17(grid.re_at(i)));
            out.push(',');
            out.push_str(&fmt_sig17(grid.im_at(j)));
            out.push(',');
            out.push_str(&fmt_sig17(*v));
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(-1.0, 1.0, -1.0, 1.0, 2, 2).is_ok());
        assert!(GridSpec::new(1.0, -1.0, -1.0, 1.0, 5, 5).is_err());
        assert!(GridSpec::new(-1.0, 1.0, -1.0, 1.0, 1, 5).is_err());
        assert!(GridSpec::new(f64::NAN, 1.0, -1.0, 1.0, 5, 5).is_err());
    }

    #[test]
    fn sig17_formatting() {
        assert_eq!(fmt_sig17(0.3989422804014327), "0.39894228040143270");
        assert_eq!(fmt_sig17(1.0), "1.0000000000000000");
        assert_eq!(fmt_sig17(-3.0), "-3.0000000000000000");
        assert_eq!(fmt_sig17(0.0), "0.0000000000000000");
        // round-trip exactness on assorted values
        for v in [
            0.1,
            -std::f64::consts::E,
            1.2345678901234567e-5,
            9.87654321e12,
            5.551115123125783e-17,
        ] {
            let s = fmt_sig17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn psi_grid_center_value() {
        let f = TestFunction::gaussian(1.0).unwrap();
        let grid = GridSpec::square(1.0, 3).unwrap();
        let quad = QuadratureSpec::default();
        let csv = grid_csv(StateKind::Psi, &f, &grid, &quad).unwrap();
        // center node z = 0: |F_ψ[f₁](0)| = f₁(0) = 1/√(2π)
        assert!(
            csv.contains("0.0000000000000000,0.0000000000000000,0.39894228040143270"),
            "{csv}"
        );
        assert!(csv.starts_with("re_z,im_z,abs_value\n"));
    }

    #[test]
    fn phi_grid_unit_ridge_at_sigma_one() {
        let f = TestFunction::gaussian(1.0).unwrap();
        let grid = GridSpec::new(-3.0, 3.0, -1.0, 1.0, 7, 3).unwrap();
        let quad = QuadratureSpec::default();
        let vals = grid_eval(StateKind::Phi, &f, &grid, &quad).unwrap();
        // middle row is the real axis: |F_φ| ≡ 1 there
        for v in &vals[1] {
            assert!((v - 1.0).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn cs_grid_localized_in_both_directions() {
        // the ordinary comparator decays away from the origin along both
        // axes, unlike the two one-sided surfaces
        let f = TestFunction::gaussian(1.0).unwrap();
        let grid = GridSpec::square(3.0, 13).unwrap();
        let quad = QuadratureSpec::default();
        let vals = grid_eval(StateKind::Cs, &f, &grid, &quad).unwrap();
        let mid = 6;
        for t in 0..grid.n_re {
            for k in mid..grid.n_re - 1 {
                assert!(vals[t][k + 1] <= vals[t][k] + 1e-12, "row {t}");
                assert!(vals[k + 1][t] <= vals[k][t] + 1e-12, "col {t}");
            }
            for k in 1..=mid {
                assert!(vals[t][k - 1] <= vals[t][k] + 1e-12, "row {t}");
                assert!(vals[k - 1][t] <= vals[k][t] + 1e-12, "col {t}");
            }
        }
    }

    #[test]
    fn csv_deterministic_across_runs() {
        let f = TestFunction::gaussian(0.95).unwrap();
        let grid = GridSpec::square(2.0, 9).unwrap();
        let quad = QuadratureSpec::default();
        let a = grid_csv(StateKind::Cs, &f, &grid, &quad).unwrap();
        let b = grid_csv(StateKind::Cs, &f, &grid, &quad).unwrap();
        assert_eq!(a, b);
    }
}

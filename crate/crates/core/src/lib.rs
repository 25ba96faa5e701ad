//! Weak pseudo-bosonic ladder framework for the position operator (x·) and
//! the derivative operator (d/dx).
//!
//! The two operators raise and lower a pair of biorthonormal families: the
//! normalized monomials x^n/√n! on one side and signed Dirac-delta
//! derivatives (−1)^n δ^(n)/√n! on the other. On top of that algebra the
//! crate builds the extended convolution pairing between the families, a
//! catalog of concrete test functions with closed-form oracles, deterministic
//! real-line and complex-plane quadrature, the bi-coherent functionals and
//! their weak eigenvalue and resolution-of-identity checks, the two
//! displacement-type operator series with their recursions and ordering
//! (BCH) factorizations, and a verification layer that runs every identity
//! as a pass/fail suite.
//!
//! Symbolic operations are generic over a coefficient backend: `Complex64`
//! for numerics, [`exact::ExactScalar`] (Gaussian rationals with square-root
//! radicals) where identities must hold exactly.

pub mod bicoherent;
pub mod delta;
pub mod displacement;
pub mod error;
pub mod exact;
pub mod grid;
pub mod ladder;
pub mod pairing;
pub mod poly;
pub mod quad;
pub mod scalar;
pub mod testfn;
pub mod verify;

pub use delta::DeltaComb;
pub use error::{Error, Result};
pub use exact::{ExactScalar, GaussRational};
pub use grid::{GridSpec, StateKind};
pub use ladder::{commutator_check, number_op_eigencheck, phi_n, psi_n, LadderOp};
pub use poly::Polynomial;
pub use quad::{IntegralResult, QuadratureSpec};
pub use scalar::Scalar;
pub use testfn::TestFunction;
pub use verify::{CheckResult, Suite, Tolerances, VerificationReport};

//! Geometric dissipation toolkit.
//!
//! The crate covers three related pictures of dissipative dynamics:
//!
//! - [`algebra`] and [`gkls`]: the GKLS generator on `n`-level density
//!   matrices, written as an affine vector field on the coherence-vector
//!   chart and split into Hamiltonian, gradient and jump parts.
//! - [`pure_state`]: the Kähler geometry of the punctured Hilbert space and
//!   the unit sphere, where Hamiltonian plus gradient flows are generalized
//!   contact Hamiltonian systems.
//! - [`contact`] and [`classical`]: contact Hamiltonian fields and Jacobi
//!   brackets on coordinate charts, contact Euler–Lagrange dynamics, linear
//!   second-order systems and RLC circuits.
//!
//! [`certify`] bundles the numerical invariants of every module into
//! deterministic check suites.

pub mod algebra;
pub mod certify;
pub mod classical;
pub mod contact;
pub mod gkls;
pub mod linalg;
pub mod ode;
pub mod pure_state;
pub mod sample;

mod error;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix used for operators on the Hilbert space.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex vector used for Hilbert-space states.
pub type CVector = nalgebra::DVector<Complex64>;
/// Dense real matrix.
pub type RMatrix = nalgebra::DMatrix<f64>;
/// Dense real vector.
pub type RVector = nalgebra::DVector<f64>;

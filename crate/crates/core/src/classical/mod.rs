//! Classical dissipative mechanics: linear second-order systems, contact
//! Euler–Lagrange dynamics and RLC circuits.

pub mod circuits;
pub mod lagrangian;
pub mod linear;

pub use circuits::{rlc_coupled, rlc_single};
pub use lagrangian::{
    ContactLagrangianSystem, ContactTrajectory, Dissipation, DissipationForm, Lagrangian, RayleighFunction,
};
pub use linear::{
    bivector_span_dimension, hamiltonianity_criterion, representative_matrix, BivectorSpan, HamiltonianityVerdict,
    LagrangianVerdict, LinearSecondOrderSystem,
};

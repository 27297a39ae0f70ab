//! Dual ground states of the nonlinear Helmholtz system of Hamiltonian type
//!
//! ```text
//! -Delta u - u = P(eps x) |v|^{p-2} v
//! -Delta v - v = Q(eps x) |u|^{q-2} u
//! ```
//!
//! on a periodic box, computed through the dual variational formulation in
//! `L^{q'} x L^{p'}`, plus the small-`eps` concentration experiment.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod concentration;
pub mod dual;
pub mod error;
pub mod exponents;
pub mod field;
pub mod groundstate;
pub mod kernel;
pub mod resolvent;
pub mod spectral;

pub use error::{Error, RegionReason, Result};
pub use exponents::{check_admissible, decay_exponent, dual_exponent, rescaling_exponents, AdmissibleExponents};
pub use field::{make_coefficient, make_grid, CoefficientField, CoefficientSpec, Grid, ScalarField};
pub use resolvent::{apply_helmholtz, apply_resolvent, birman_schwinger, ResolventPlan};

//! Numerical toolkit for `N` identical, all-to-all coupled oscillators close to a
//! supercritical Hopf bifurcation.
//!
//! The crate is organised bottom-up:
//!
//! - [`normal_form`]: the cubic `S_N x S^1`-equivariant normal form on `C^N`.
//! - [`reduction`]: limit-cycle data, the amplitude/phase constants and the
//!   coupling functions `g_2 .. g_5` of the reduced phase model.
//! - [`phase_model`]: right-hand side of the phase model, as a literal nested
//!   sum and as an `O(N)` evaluation through circular moments.
//! - [`integrator`]: fixed-step RK4, phase extraction and full-vs-reduced
//!   trajectory comparison.
//! - [`cluster`]: synchrony and two-cluster analysis.

pub mod cluster;
pub mod error;
pub mod integrator;
pub mod normal_form;
pub mod phase_model;
pub mod reduction;

mod angle;

pub use angle::{wrap_to_pi, wrap_to_two_pi};
pub use error::{Error, Result};
pub use normal_form::{Complex, NormalFormCoefficients, SystemParams};
pub use reduction::{HarmonicTerm, PhaseCouplingSet, ReductionConstants};

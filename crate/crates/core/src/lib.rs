//! Linear stability of the cosine shear profile in quasi-geostrophic shallow
//! water.
//!
//! The unstable eigenvalues `c = ±i√r` of the modified Rayleigh equation with
//! `u(y) = cos(y)` are read off the unique negative eigenvalue `−r` of an
//! explicit Jacobi matrix. The negative roots `r_n` of the associated
//! orthogonal polynomials increase monotonically to `r`, so every finite
//! order gives a rigorous lower bound `k√r_n` on the growth rate.
//!
//! - [`model`]: parameters, Jacobi coefficients, background profiles
//! - [`orthopoly`]: Sturm counts and root isolation
//! - [`dispersion`]: per-wave-number results and eigenfunctions
//! - [`oracle`]: dense eigensolvers and the Stieltjes continued fraction
//! - [`evolve`]: RK4 time evolution of the linearized equation
//! - [`diagnostics`]: inflection and semicircle checks for general profiles

// `!(x > 0.0)` is deliberate: NaN must fail the parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dispersion;
pub mod error;
pub mod evolve;
pub mod model;
pub mod oracle;
pub mod orthopoly;

pub use dispersion::{solve_dispersion, sweep, DispersionPoint, Eigenfunction};
pub use error::{Error, Result};
pub use model::{jacobi_coefficients, FlowParams, JacobiCoefficients, Profile};

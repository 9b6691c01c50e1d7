//! Numerical toolkit for the Fourier–Bessel calculus of two-dimensional Lamé
//! eigenfunctions near line segments: field and boundary-trace expansions,
//! coefficient-vanishing constraint systems for homogeneous line
//! configurations, exceptional impedance parameters, complex geometrical
//! optics integral identities and the elastic scattering data layer.

pub mod cgo;
pub mod elastic_field;
pub mod error;
pub mod finite_diff;
pub mod ghp_constraints;
pub mod linalg;
pub mod quadrature;
pub mod scattering;
pub mod specfun;
pub mod traces;

pub use error::{Error, Result};

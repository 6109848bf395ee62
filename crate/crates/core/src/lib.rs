//! Surface impedance of a Maxwellian plasma half-space with partially
//! specular electron reflection, from the von Neumann series of the
//! diffuse-coupling integral equation, with exact specular and diffuse
//! references.

pub mod kinetic;
pub mod neumann;
pub mod parallel;
pub mod quadrature;
pub mod reference;
pub mod specfun;
mod summation;
pub mod sweep;

pub use num_complex::Complex64;

//! Numerical Cauchy transform on Lipschitz graph curves.
//!
//! The crate evaluates the Cauchy integral of boundary data on curves
//! `ζ(u) = u + i·a(u)`, its boundary values, weighted norms of shifted
//! transforms, the kernels and area operators used to bound them, explicit
//! conformal maps of the domains above and below a wedge, and numerical
//! checks of the integral identities and inequalities that relate them.

pub mod error;
pub mod geometry;
pub mod kernels;
pub mod conformal;
pub mod quadrature;
pub mod transform;
pub mod report;
pub mod identities;

pub use error::{Error, Result};
pub use geometry::{CPoint, ConeSpec, CurveSpec, Region, Side};
pub use quadrature::{IntegralResult, QuadConfig};

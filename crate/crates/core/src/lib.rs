//! Desk-scale numerical checks of two-term Weyl asymptotics for Riesz means of
//! the Dirichlet Laplacian on planar convex domains.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brown;
pub mod cone;
pub mod error;
pub mod geometry;
pub mod localization;
pub mod quadrature;
pub mod sampling;
pub mod spectral;
pub mod suite;
pub mod weyl;

pub use error::{Error, Result};
pub use geometry::{Domain, GeometrySummary, Point};

//! Global structure of the Carnot-Caratheodory metric on model hypersurfaces
//! `{Im w > P(z)}` in `C^2`.
//!
//! The crate evaluates disk masses of `Delta P`, builds stockyards (finite
//! families of fenced pens), estimates the global structure `Lambda(z, delta)`
//! from above and below, integrates horizontal paths directly, and classifies
//! whether the growth of `Lambda` is uniformly linear or quadratic.

pub mod ccpath;
pub mod classify;
pub mod density;
pub mod error;
pub mod geometry;
pub mod optimize;
pub mod quadrature;
pub mod selfcheck;
pub mod stats;
pub mod structure;

pub use num_complex::Complex64;

pub use density::{DensityField, FamilyKind, PolynomialPotential};
pub use error::{Error, Result};

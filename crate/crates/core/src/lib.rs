//! Numerical verification of improved Poincaré, Hardy and Rellich
//! inequalities on rotationally symmetric model manifolds
//! `dr² + ψ(r)² dω²`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod error;
pub mod functionals;
pub mod functions;
pub mod geometry;
pub mod profiles;
pub mod quadrature;
pub mod sharpness;

pub use error::{Error, Result};
pub use functions::{make_bump, ModalTestFunction, RadialFunction, RadialTestFunction};
pub use geometry::ManifoldModel;
pub use profiles::{Family, FamilyParams, WarpingProfile};
pub use quadrature::QuadratureSpec;

//! Schwarz–Christoffel machinery for the moduli space of labelled immersed
//! polygons in the plane.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: labelled polygons, interior and turning angles, winding
//!   numbers, exact simplicity tests and multiply-wound witnesses.
//! * [`quadrature`]: Gauss–Jacobi rules and compound panel integration of the
//!   singular Schwarz–Christoffel integrand.
//! * [`scmap`]: the half-plane Schwarz–Christoffel map as a value and the
//!   forward map from parameters to polygons.
//! * [`paramsolve`]: the inverse (parameter) problem.
//! * [`charts`]: global coordinates identifying the parameter space with
//!   `R^(2n-4)`.
//! * [`sweep`] and [`render`]: randomized simplicity sweeps and SVG output.
//!
//! Data-parallel loops (sweep samples, Jacobian columns) run on rayon when the
//! default `parallel` feature is enabled and fall back to plain iteration
//! otherwise. Results are identical either way.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charts;
mod error;
mod exec;
pub mod geometry;
pub mod paramsolve;
pub mod quadrature;
pub mod render;

pub mod scmap;
pub mod sweep;


pub use charts::ChartPoint;
pub use error::{Error, Result};
pub use geometry::{LabelledPolygon, PlanePoint};
pub use paramsolve::{SolveOptions, SolveReport, Solution};

pub use quadrature::QuadratureRule;
pub use scmap::{ExponentVector, Mode, Prevertices, ScMap};


/// Default relative tolerance for Schwarz–Christoffel quadrature.
pub const DEFAULT_TOL: f64 = 1e-10;

//! Exact divisor theory on compact tropical curves.
//!
//! A curve is given by a [`MetricGraph`] with rational edge lengths. From it
//! the crate computes the cycle lattice and its Gram form, the Abel–Jacobi
//! map into the Jacobian `Rᵍ/Λ`, the tropical theta function and its corner
//! locus, the Riemann constant, and all `2^g` theta characteristics together
//! with an independent chip-firing effectiveness test.
//!
//! All curve-level arithmetic uses the arbitrary-precision [`Rational`]. The
//! numeric kernels in [`linalg`], [`lattice`] and [`envelope`] are generic
//! over [`Scalar`].

pub mod curve;
pub mod discrete;
pub mod divisor;
pub mod envelope;
pub mod error;
pub mod homology;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod orientation;
pub mod samples;
pub mod scalar;
pub mod theta;
pub mod verify;

pub use curve::{Divisor, Edge, MetricGraph, Point, PointSpec, Refinement};
pub use divisor::{JacPoint, Jacobian, PLFunction};
pub use error::{Error, Result};
pub use homology::{Cycle, GramForm, SpanningTree};
pub use scalar::Scalar;

/// Exact rational scalar used for every curve-level quantity.
pub type Rational = num_rational::BigRational;
/// Gram matrices and other exact matrices.
pub type RationalMatrix = linalg::Matrix<Rational>;
/// Machine-precision variant of the generic kernels.
pub type FloatMatrix = linalg::Matrix<f64>;

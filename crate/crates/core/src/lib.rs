//! Numerical toolkit for Gevrey-type polyanalytic functions on the unit disk.
//!
//! The crate is organised bottom-up:
//!
//! - [`poly`]: holomorphic and N-analytic polynomials, evaluation, degree, Wirtinger derivatives.
//! - [`decompose`]: recovery of holomorphic components from samples on concentric circles.
//! - [`bounds`]: the constants `L_m`, `J_m` and verifiers for every stated inequality.
//! - [`gevrey`]: the coefficient-decay model `|a_p| ≤ α exp(-β p^{k/(k+1)})`.
//! - [`expansion`]: coefficient-block expansions with certified norms on dilated disks.
//! - [`dynkin`]: the `∂̄^N` Cauchy–Pompeiu reconstruction and pseudoanalytic extensions.
//! - [`approx`]: best uniform N-polynomial approximation and its decay law.
//! - [`corpus`] and [`io`]: test-function corpus and artifact formats used by the `polyan` binary.

pub mod approx;
pub mod bounds;
pub mod cli;
pub mod corpus;
pub mod decompose;
pub mod dynkin;
pub mod error;
pub mod expansion;
pub mod gevrey;
pub mod io;
pub mod numeric;
pub mod poly;

pub use error::{Error, Result};
pub use poly::{random_poly, ComplexScalar, Degree, HoloPoly, NAnalyticPoly};

//! Numerical harmonic analysis on bounded dyadic grids.
//!
//! The crate evaluates Hardy-Littlewood maximal functions, Riesz transforms
//! and Bessel potentials, estimates Muckenhoupt constants, builds Rubio de
//! Francia majorants, computes norms in a catalogue of ball Banach function
//! spaces, analyzes functions in Haar and Daubechies wavelet systems, and
//! runs verification checks that compare both sides of weighted and
//! wavelet norm inequalities.

// `!(x > 0.0)` style guards are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expr;
pub mod grid;
pub mod harness;
pub mod numeric;
pub mod operators;
pub mod report;
pub mod spaces;
pub mod wavelets;
pub mod weights;

pub use error::{Error, Result};
pub use expr::Expr;
pub use grid::{BallShape, Cube, Grid, GridFunction, Region};

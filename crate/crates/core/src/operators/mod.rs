//! Hardy-Littlewood maximal operators, truncated Riesz transforms and Bessel potentials.

mod bessel;
mod fft;
mod maximal;
mod riesz;

pub use bessel::{bessel_potential, BesselDirection};
pub use maximal::{
    dyadic_cube_maximal, iterate_maximal, maximal, maximal_with, MaximalKind, MaximalOptions,
    Normalization, RadiusLadder, MAX_ITERATES,
};
pub use riesz::riesz;

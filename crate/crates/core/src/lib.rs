//! Weighted spectral calculus on deformed spaces: the weighted Fourier
//! transform F_{φ,ω}, fractional operators it diagonalizes, the φ-Mellin
//! pair, generalized uncertainty relations, and the fundamental solution of
//! the weighted Hilfer diffusion-wave equation.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod fft;
pub mod fracops;
pub mod geometry;
pub mod mellin;
pub mod quad;
pub mod solver;
pub mod specfun;
pub mod table;
pub mod uncertainty;
pub mod validate;
pub mod wfourier;

pub use error::{Error, Result};
pub use fracops::{FractionalOrder, HilferOrder};
pub use geometry::{build_grid, make_diffeomorphism, DeformedGrid, Diffeomorphism, GeometrySpec, SpatialWeight, TemporalPair};
pub use solver::{GreenEvaluation, GreenRoute, HilferProblem};
pub use wfourier::{GridFunction, SpectralField};

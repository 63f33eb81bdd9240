//! Exact arithmetic: rationals, integer lattices, series and polynomials.

pub mod bernoulli;
pub mod coeff;
pub mod interpolate;
pub mod matrix;
pub mod mpoly;
pub mod rational;
pub mod series;
pub mod snf;
pub mod ypoly;

pub use bernoulli::bernoulli;
pub use coeff::{root_of_unity, Coeff};
pub use interpolate::{
    interpolate_multivariate, interpolate_simplex_grid, interpolate_simplex_grid_many, interpolate_univariate,
};
pub use mpoly::MPoly;
pub use rational::{fmt_rat, parse_rat, rat, ri, Rat};
pub use series::{laurent_exp, laurent_inverse_one_minus_exp, LaurentSeries, PowerSeries};
pub use snf::{smith_normal_form, IntMatrix, Snf, SpanLattice};
pub use ypoly::YPoly;

pub use num_complex::Complex64;

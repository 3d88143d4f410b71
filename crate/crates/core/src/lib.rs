//! Harmonic analysis for the Laplace-Bessel operator
//! `B = sum_i d^2/dx_i^2 + (2 gamma_i / x_i) d/dx_i` on the positive orthant:
//! normalized Bessel kernels, weighted grids and sphere rules, the
//! generalized shift and B-convolution, the Fourier-Bessel transform,
//! B-harmonic polynomials, mean value and Pizzetti formulas, and high-order
//! Riesz-Bessel transforms, with verification suites over all of them.

pub mod emit;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod mean_value;
pub mod poly;
pub mod quadrature;
pub mod report;
pub mod riesz;
pub mod shift;
pub mod special;
pub mod sphere;
pub mod suites;

pub use error::{Error, Result};

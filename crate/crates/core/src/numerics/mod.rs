//! Numerical kernels shared by the entropy and bounds code: adaptive
//! quadrature, lattice sums of the Gaussian density, and Gaussian special
//! functions.

pub mod lattice;
pub mod quadrature;
pub mod special;

pub use lattice::{lattice_sum, lattice_sum_excluding_zero, ln_lattice_sum_excluding_zero};
pub use quadrature::{
    integrate, integrate_relative, integrate_with_breakpoints, QuadratureConfig, QuadratureResult,
};
pub use special::{gaussian_tail_lower, ln1p_exp, log_sum_exp, std_normal_pdf, upper_tail};

//! Numerical kernels shared by the rest of the crate.

pub mod hermite;
pub mod ode;
pub mod quadrature;

pub use hermite::{
    hermite_eval, hermite_function, hermite_functions, hermite_ln_abs, laguerre, ln_factorial,
};
pub use ode::{ode_solve, ode_solve_sampled, OdeSolution};
pub use quadrature::{
    gauss_hermite_rule, integrate_interval, integrate_interval_vec, integrate_line,
    integrate_line_vec, AdaptiveConfig, LegendreRule, LineIntegral, LineMethod, QuadratureRule,
    VectorIntegral, SQRT_PI,
};

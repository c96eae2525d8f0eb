//! Green's-function machinery, fixed-point solver and hypothesis checks for
//! the fourth-order problem
//!
//! ```text
//! u''''(t) + f(u(t)) = 0,  0 < t < 1,
//! u'(0) = u'(1) = u''(0) = 0,  u(0) = ∫₀¹ a(s) u(s) ds.
//! ```

// Index loops read closer to the stencil formulas.
#![allow(clippy::needless_range_loop)]

pub mod banded;
pub mod collocation;
pub mod error;
pub mod exprlang;
pub mod grid;
pub mod hypothesis;
pub mod kernel;
pub mod linear;
pub mod poly;
pub mod quadrature;
pub mod solver;
pub mod stencil;

pub use collocation::{collocation_oracle, CollocationResult};
pub use error::{Error, Result};
pub use exprlang::{EvalError, ExpressionFn, ParseError};
pub use grid::GridFunction;
pub use hypothesis::{
    analyze, certify_thm31, certify_thm32, check_h1_h2, estimate_f0, estimate_finf,
    HypothesisReport,
};
pub use kernel::{g_weight, green, make_context, KernelContext, DEFAULT_THETA};
pub use linear::{cone_ratio, polynomial_oracle, solve_linear, ConeCheck, KernelMatrix};
pub use poly::Polynomial;
pub use quadrature::{integrate, integrate_grid, QuadratureSettings, Rule};
pub use solver::{
    apply_a, norm_bound_check, picard_solve, picard_solve_with, residual_integral, residual_ode,
    InitialGuess, SolveConfig, SolveReport, SolveStatus,
};

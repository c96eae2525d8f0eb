//! The nonlinear operator
//!
//! ```text
//! (A u)(t) = ∫₀¹ H(t, s) f(u(s)) ds
//! ```
//!
//! whose fixed points solve the boundary value problem, together with Picard
//! iteration, residual diagnostics and the a-priori bound
//! `‖A u‖ ≤ (1/(1-α)) ∫₀¹ g(s) f(u(s)) ds`.

use crate::error::{Error, Result};
use crate::exprlang::{EvalError, ExpressionFn};
use crate::grid::{GridFunction, NONNEG_SLACK};
use crate::kernel::{g_weight_unchecked, KernelContext};
use crate::linear::{cone_ratio, ConeCheck, KernelMatrix};
use crate::quadrature::{integrate_grid, QuadratureSettings, Rule};
use crate::stencil::{boundary_residuals, d4_central, BoundaryResiduals, MIN_STENCIL_N};

/// Solutions with a smaller sup-norm are reported as the trivial fixed point.
pub const TRIVIAL_THRESHOLD: f64 = 1e-8;

/// Slack for `‖A u‖ ≤ bound`.
pub const NORM_BOUND_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    Zero,
    Constant(f64),
    Values(GridFunction),
}

impl InitialGuess {
    /// Accepts `zero`, `constant <c>` and a bare number.
    pub fn parse(desc: &str) -> Result<Self> {
        let desc = desc.trim();
        let parse_c = |s: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|c| c.is_finite())
                .ok_or_else(|| Error::argument(format!("invalid initial guess '{desc}'")))
        };
        if desc == "zero" {
            Ok(Self::Zero)
        } else if let Some(rest) = desc.strip_prefix("constant") {
            Ok(Self::Constant(parse_c(rest)?))
        } else {
            Ok(Self::Constant(parse_c(desc)?))
        }
    }

    pub fn materialize(&self, n: usize) -> Result<GridFunction> {
        let u = match self {
            Self::Zero => GridFunction::zeros(n),
            Self::Constant(c) => GridFunction::constant(n, *c),
            Self::Values(g) => {
                if g.n() != n {
                    return Err(Error::argument(format!(
                        "initial guess has n = {}, expected {n}",
                        g.n()
                    )));
                }
                g.clone()
            }
        };
        if !u.is_nonneg() {
            return Err(Error::argument("initial guess must be nonnegative"));
        }
        Ok(u)
    }
}

impl std::fmt::Display for InitialGuess {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Zero => f.write_str("zero"),
            Self::Constant(c) => write!(f, "constant {c}"),
            Self::Values(g) => write!(f, "grid values (n = {})", g.n()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub n: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// `u ← (1-ω) u + ω A u`
    pub relaxation: f64,
    pub u0: InitialGuess,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            n: 800,
            tol: 1e-10,
            max_iter: 500,
            relaxation: 1.0,
            u0: InitialGuess::Zero,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !self.n.is_multiple_of(2) {
            return Err(Error::argument(format!(
                "grid resolution must be even and >= 2, got {}",
                self.n
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::argument("tolerance must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::argument("max_iter must be at least 1"));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::argument("relaxation must lie in (0, 1]"));
        }
        Ok(())
    }
}

fn eval_f(f: &ExpressionFn, u: f64) -> Result<f64> {
    f.eval(u).map_err(|source| Error::Eval { at: u, source })
}

/// `f(u(s_j))` on the grid, enforcing `u ≥ 0` (up to slack) and `f ≥ 0`.
fn compose(u: &GridFunction, f: &ExpressionFn) -> Result<Vec<f64>> {
    u.values()
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            if v < -NONNEG_SLACK {
                return Err(Error::argument(format!(
                    "u({}) = {v} is negative; f is only defined on [0, ∞)",
                    u.t(j)
                )));
            }
            let x = v.max(0.0);
            let fx = eval_f(f, x)?;
            if fx < 0.0 {
                return Err(Error::HypothesisH1(format!("f({x}) = {fx} is negative")));
            }
            Ok(fx)
        })
        .collect()
}

fn check_grid(u: &GridFunction, km: &KernelMatrix) -> Result<()> {
    if u.n() != km.n() {
        return Err(Error::argument(format!(
            "grid function has n = {}, kernel matrix has n = {}",
            u.n(),
            km.n()
        )));
    }
    Ok(())
}

/// `A u` on the grid of `km`.
pub fn apply_a(u: &GridFunction, f: &ExpressionFn, km: &KernelMatrix) -> Result<GridFunction> {
    check_grid(u, km)?;
    let fu = compose(u, f)?;
    GridFunction::new(km.apply(&fu))
}

/// `‖u - A u‖_∞`.
pub fn residual_integral(u: &GridFunction, f: &ExpressionFn, km: &KernelMatrix) -> Result<f64> {
    let au = apply_a(u, f, km)?;
    Ok(u.distance(&au))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBound {
    /// `(1/(1-α)) ∫₀¹ g(s) f(u(s)) ds`
    pub bound: f64,
    /// `‖A u‖_∞`
    pub norm_au: f64,
    pub holds: bool,
}

/// The a-priori bound for `A u` computed from `u` alone.
pub fn norm_bound(u: &GridFunction, f: &ExpressionFn, ctx: &KernelContext) -> Result<f64> {
    let fu = compose(u, f)?;
    let n = u.n();
    let integrand = GridFunction::new(
        fu.iter()
            .enumerate()
            .map(|(j, v)| g_weight_unchecked(crate::grid::node(j, n)) * v)
            .collect(),
    )?;
    let simpson = QuadratureSettings {
        rule: Rule::Simpson,
        panels: n / 2,
    };
    Ok(integrate_grid(&integrand, &simpson)? / (1.0 - ctx.alpha()))
}

pub fn norm_bound_check(
    u: &GridFunction,
    f: &ExpressionFn,
    km: &KernelMatrix,
) -> Result<NormBound> {
    let bound = norm_bound(u, f, km.context())?;
    let norm_au = apply_a(u, f, km)?.sup_norm();
    Ok(NormBound {
        bound,
        norm_au,
        holds: norm_au <= bound + NORM_BOUND_SLACK,
    })
}

/// Finite-difference residuals of the differential form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeResidual {
    /// `max |D⁴u + f(u)|` over `2 ≤ i ≤ n-2`.
    pub interior: f64,
    /// Largest boundary-condition residual.
    pub bc: f64,
    pub boundary: BoundaryResiduals,
    /// Scale-aware pass threshold for `interior`, see [`interior_tolerance`].
    pub interior_tol: f64,
}

pub const BC_TOLERANCE: f64 = 1e-6;

impl OdeResidual {
    pub fn passes(&self) -> bool {
        self.interior < self.interior_tol && self.bc < BC_TOLERANCE
    }
}

/// Rounding in the samples is amplified by `h⁻⁴` in the fourth difference,
/// so the threshold grows like `n⁴ ‖u‖`.
pub fn interior_tolerance(n: usize, norm: f64) -> f64 {
    let n4 = (n as f64).powi(4);
    f64::max(1e-6, 100.0 * f64::EPSILON * n4 * norm)
}

pub fn residual_ode(
    u: &GridFunction,
    f: &ExpressionFn,
    ctx: &KernelContext,
) -> Result<OdeResidual> {
    let n = u.n();
    if n < MIN_STENCIL_N {
        return Err(Error::argument(format!(
            "grid with n = {n} is too coarse (need n >= {MIN_STENCIL_N})"
        )));
    }
    let fu = compose(u, f)?;
    let v = u.values();
    let h = u.h();
    let interior = (2..=n - 2)
        .map(|i| (d4_central(v, i, h) + fu[i]).abs())
        .fold(0.0, f64::max);
    let boundary = boundary_residuals(u, ctx)?;
    Ok(OdeResidual {
        interior,
        bc: boundary.max_abs(),
        boundary,
        interior_tol: interior_tolerance(n, u.sup_norm()),
    })
}

/// Pointwise `D⁴u + f(u)` (zero at the four points the stencil cannot reach).
pub fn fourth_difference_residual(u: &GridFunction, f: &ExpressionFn) -> Result<Vec<f64>> {
    let n = u.n();
    let fu = compose(u, f)?;
    let v = u.values();
    let h = u.h();
    Ok((0..=n)
        .map(|i| {
            if i >= 2 && i + 2 <= n {
                d4_central(v, i, h) + fu[i]
            } else {
                0.0
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Converged => "converged",
            Self::MaxIterations => "max-iterations",
            Self::Diverged => "diverged",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub solution: GridFunction,
    /// `A` applied to the solution.
    pub image: GridFunction,
    pub iterations: usize,
    /// `‖u_{k+1} - u_k‖_∞` per iteration.
    pub delta_trace: Vec<f64>,
    pub residual_integral: f64,
    pub residual_ode: OdeResidual,
    pub cone: ConeCheck,
    pub trivial: bool,
    /// A-priori bound evaluated at the solution.
    pub norm_bound: f64,
    /// A-priori bound evaluated at the initial guess.
    pub initial_norm_bound: f64,
    pub initial_norm: f64,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Assemble the kernel matrix for `config.n` and run [`picard_solve_with`].
pub fn picard_solve(
    f: &ExpressionFn,
    ctx: &KernelContext,
    config: &SolveConfig,
) -> Result<SolveReport> {
    config.validate()?;
    let km = KernelMatrix::assemble(ctx, config.n)?;
    picard_solve_with(f, &km, config)
}

fn is_blowup(err: &Error) -> bool {
    matches!(
        err,
        Error::NonFinite { .. }
            | Error::Eval {
                source: EvalError::Overflow { .. },
                ..
            }
    )
}

fn or_infinite(r: Result<f64>) -> Result<f64> {
    match r {
        Err(e) if is_blowup(&e) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Successive substitution `u ← (1-ω) u + ω A u`. Non-convergence is reported
/// in the status, not as an error.
pub fn picard_solve_with(
    f: &ExpressionFn,
    km: &KernelMatrix,
    config: &SolveConfig,
) -> Result<SolveReport> {
    config.validate()?;
    if config.n != km.n() {
        return Err(Error::argument("kernel matrix and config disagree on n"));
    }
    let ctx = km.context();
    let omega = config.relaxation;
    let u0 = config.u0.materialize(config.n)?;
    let initial_norm_bound = or_infinite(norm_bound(&u0, f, ctx))?;
    let initial_norm = u0.sup_norm();

    let mut u = u0;
    let mut trace = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    for _ in 0..config.max_iter {
        let au = match apply_a(&u, f, km) {
            Ok(au) => au,
            Err(e) if is_blowup(&e) => {
                status = SolveStatus::Diverged;
                break;
            }
            Err(e) => return Err(e),
        };
        let next: Vec<f64> = u
            .values()
            .iter()
            .zip(au.values())
            .map(|(a, b)| (1.0 - omega) * a + omega * b)
            .collect();
        let Ok(next) = GridFunction::new(next) else {
            status = SolveStatus::Diverged;
            break;
        };
        let delta = next.distance(&u);
        trace.push(delta);
        u = next;
        if delta < config.tol {
            status = SolveStatus::Converged;
            break;
        }
    }

    let image = match apply_a(&u, f, km) {
        Ok(au) => Some(au),
        Err(e) if is_blowup(&e) => None,
        Err(e) => return Err(e),
    };
    if image.is_none() {
        status = SolveStatus::Diverged;
    }
    let residual_ode = match residual_ode(&u, f, ctx) {
        Ok(r) => r,
        Err(e) if is_blowup(&e) => OdeResidual {
            interior: f64::INFINITY,
            bc: boundary_residuals(&u, ctx)?.max_abs(),
            boundary: boundary_residuals(&u, ctx)?,
            interior_tol: interior_tolerance(u.n(), u.sup_norm()),
        },
        Err(e) => return Err(e),
    };
    Ok(SolveReport {
        status,
        residual_integral: image.as_ref().map_or(f64::INFINITY, |au| u.distance(au)),
        residual_ode,
        cone: cone_ratio(&u, ctx),
        trivial: u.sup_norm() < TRIVIAL_THRESHOLD,
        norm_bound: or_infinite(norm_bound(&u, f, ctx))?,
        initial_norm_bound,
        initial_norm,
        iterations: trace.len(),
        delta_trace: trace,
        image: image.unwrap_or_else(|| u.clone()),
        solution: u,
    })
}

//! Finite-difference stencils on the uniform grid.

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::kernel::KernelContext;
use crate::quadrature::{grid_weights, Rule};

/// Smallest grid the one-sided and fourth-difference stencils fit on.
pub const MIN_STENCIL_N: usize = 9;

/// `u'(0)`, third order, four points.
pub fn d1_left(u: &[f64], h: f64) -> f64 {
    (-11.0 * u[0] + 18.0 * u[1] - 9.0 * u[2] + 2.0 * u[3]) / (6.0 * h)
}

/// `u'(1)`, third order, four points.
pub fn d1_right(u: &[f64], h: f64) -> f64 {
    let n = u.len() - 1;
    (11.0 * u[n] - 18.0 * u[n - 1] + 9.0 * u[n - 2] - 2.0 * u[n - 3]) / (6.0 * h)
}

/// `u''(0)`, third order. Four points only reach second order for the second
/// derivative, so this uses five.
pub fn d2_left(u: &[f64], h: f64) -> f64 {
    (35.0 * u[0] - 104.0 * u[1] + 114.0 * u[2] - 56.0 * u[3] + 11.0 * u[4]) / (12.0 * h * h)
}

/// Central fourth difference at interior index `i` (`2 ≤ i ≤ n-2`).
pub fn d4_central(u: &[f64], i: usize, h: f64) -> f64 {
    let h2 = h * h;
    (u[i - 2] - 4.0 * u[i - 1] + 6.0 * u[i] - 4.0 * u[i + 1] + u[i + 2]) / (h2 * h2)
}

/// Residuals of the four boundary conditions for grid samples `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResiduals {
    /// `u'(0)`
    pub du_left: f64,
    /// `u'(1)`
    pub du_right: f64,
    /// `u''(0)`
    pub ddu_left: f64,
    /// `u(0) - ∫₀¹ a u`
    pub nonlocal: f64,
}

impl BoundaryResiduals {
    pub fn max_abs(&self) -> f64 {
        [self.du_left, self.du_right, self.ddu_left, self.nonlocal]
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Evaluate the boundary residuals. The nonlocal integral uses Simpson on
/// the grid, so `n` must be even.
pub fn boundary_residuals(u: &GridFunction, ctx: &KernelContext) -> Result<BoundaryResiduals> {
    let n = u.n();
    if n < MIN_STENCIL_N {
        return Err(Error::argument(format!(
            "grid with n = {n} is too coarse for the boundary stencils (need n >= {MIN_STENCIL_N})"
        )));
    }
    let w = grid_weights(n, Rule::Simpson)?;
    let v = u.values();
    let h = u.h();
    let mut integral = 0.0;
    for (i, (wi, vi)) in w.iter().zip(v).enumerate() {
        integral += wi * ctx.weight_at(u.t(i))? * vi;
    }
    Ok(BoundaryResiduals {
        du_left: d1_left(v, h),
        du_right: d1_right(v, h),
        ddu_left: d2_left(v, h),
        nonlocal: v[0] - integral,
    })
}

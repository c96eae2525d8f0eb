//! The linear problem `u'''' + y = 0` under the mixed local/nonlocal boundary
//! conditions, solved through the modified kernel, plus a closed-form
//! polynomial oracle and the cone inequality check.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::kernel::{green_unchecked, KernelContext};
use crate::poly::Polynomial;
use crate::quadrature::{grid_weights, Rule};

// 3-point Gauss-Legendre on [-1, 1].
const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// Quadrature matrix of the modified kernel on a grid with `n` intervals:
/// `(K y)_i ≈ ∫₀¹ H(t_i, s) y(s) ds`.
///
/// The `G` part is integrated exactly against the piecewise-quadratic
/// interpolant of `y` (panels of two grid cells). `G(t_i, ·)` changes branch
/// at the node `t_i`, so every grid cell is integrated separately with a
/// rule exact for the degree-5 integrand. The `t`-independent correction uses
/// Simpson weights.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    ctx: KernelContext,
    n: usize,
    // Row-major (n+1) x (n+1).
    entries: Vec<f64>,
    simpson: Vec<f64>,
}

impl KernelMatrix {
    pub fn assemble(ctx: &KernelContext, n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::argument(format!(
                "kernel matrix needs an even grid resolution >= 2, got {n}"
            )));
        }
        let h = 1.0 / n as f64;
        let simpson = grid_weights(n, Rule::Simpson)?;
        let correction = (0..=n)
            .into_par_iter()
            .map(|j| ctx.correction(crate::grid::node(j, n)))
            .collect::<Result<Vec<_>>>()?;

        // Per cell: Gauss abscissa offsets from the panel centre (in units of
        // h), Gauss weights scaled to the cell, and the three Lagrange basis
        // values on the panel.
        let mut cell_rules = [[(0.0, 0.0, [0.0; 3]); 3]; 2];
        for (half, rule) in cell_rules.iter_mut().enumerate() {
            for (slot, (x, w)) in rule.iter_mut().zip(GAUSS3) {
                // Cell `half` spans xi ∈ [-1, 0] or [0, 1].
                let xi = 0.5 * x + if half == 0 { -0.5 } else { 0.5 };
                let basis = [0.5 * xi * (xi - 1.0), 1.0 - xi * xi, 0.5 * xi * (xi + 1.0)];
                *slot = (xi, 0.5 * w * h, basis);
            }
        }

        let mut entries = vec![0.0; (n + 1) * (n + 1)];
        entries
            .par_chunks_mut(n + 1)
            .enumerate()
            .for_each(|(i, row)| {
                let t = crate::grid::node(i, n);
                for panel in 0..n / 2 {
                    let centre = (2 * panel + 1) as f64 * h;
                    for rule in &cell_rules {
                        for &(xi, w, basis) in rule {
                            let g = w * green_unchecked(t, centre + xi * h);
                            for (m, b) in basis.iter().enumerate() {
                                row[2 * panel + m] += g * b;
                            }
                        }
                    }
                }
                for (j, entry) in row.iter_mut().enumerate() {
                    *entry += simpson[j] * correction[j];
                }
            });

        Ok(Self {
            ctx: ctx.clone(),
            n,
            entries,
            simpson,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn context(&self) -> &KernelContext {
        &self.ctx
    }

    /// Simpson weights of the grid.
    pub fn grid_weights(&self) -> &[f64] {
        &self.simpson
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * (self.n + 1)..(i + 1) * (self.n + 1)]
    }

    /// `K y`, with compensated summation in each row.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.n + 1, "grid resolution mismatch");
        (0..=self.n)
            .into_par_iter()
            .map(|i| neumaier_dot(self.row(i), y))
            .collect()
    }

    /// Solve the linear problem for source `y` on this matrix's grid.
    pub fn solve(&self, y: &GridFunction) -> Result<GridFunction> {
        if y.n() != self.n {
            return Err(Error::argument(format!(
                "source has n = {}, kernel matrix has n = {}",
                y.n(),
                self.n
            )));
        }
        GridFunction::new(self.apply(y.values()))
    }
}

fn neumaier_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for (x, y) in a.iter().zip(b) {
        let term = x * y;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `u(t) = ∫₀¹ H(t, s) y(s) ds` on the grid of `y`. Assembles a fresh
/// [`KernelMatrix`]; reuse one directly when solving repeatedly.
pub fn solve_linear(y: &GridFunction, ctx: &KernelContext) -> Result<GridFunction> {
    KernelMatrix::assemble(ctx, y.n())?.solve(y)
}

/// Exact solution when `y` and `a` are polynomials.
///
/// Integrates `u'''' = -y` four times with zero constants, then fixes the
/// cubic coefficient from `u'(1) = 0` (the linear and quadratic ones vanish
/// by `u'(0) = u''(0) = 0`) and the constant from `u(0) = ∫ a u`.
pub fn polynomial_oracle(y: &Polynomial, a: &Polynomial) -> Result<Polynomial> {
    let alpha = a.integral_unit();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::HypothesisH2(format!(
            "integral of a over [0, 1] is {alpha}, must lie in (0, 1)"
        )));
    }
    let mut p = y.scale(-1.0);
    for _ in 0..4 {
        p = p.antiderivative();
    }
    let c3 = -p.derivative().eval(1.0) / 3.0;
    let q = p.add(&Polynomial::new(vec![0.0, 0.0, 0.0, c3]));
    let c0 = a.mul(&q).integral_unit() / (1.0 - alpha);
    Ok(q.add(&Polynomial::constant(c0)))
}

/// Outcome of the cone inequality `min_{[θ,1-θ]} u ≥ θ³(1-α+β) ‖u‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeCheck {
    pub min_inner: f64,
    pub norm: f64,
    /// `min_inner / norm`; `None` when `u ≡ 0`.
    pub ratio: Option<f64>,
    /// `θ³(1-α+β)`
    pub threshold: f64,
    pub satisfied: bool,
}

pub const CONE_SLACK: f64 = 1e-10;

pub fn cone_ratio(u: &GridFunction, ctx: &KernelContext) -> ConeCheck {
    let (lo, hi) = u.inner_range(ctx.theta());
    let min_inner = u.values()[lo..=hi]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let norm = u.sup_norm();
    let threshold = ctx.cone_constant();
    ConeCheck {
        min_inner,
        norm,
        ratio: (norm > 0.0).then(|| min_inner / norm),
        threshold,
        satisfied: min_inner >= threshold * norm - CONE_SLACK,
    }
}

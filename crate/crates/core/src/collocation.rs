//! Finite-difference discretisation of the differential form, solved by
//! damped Newton. Independent of the kernel representation; used to
//! cross-check the integral-operator solutions.
//!
//! Unknowns are `u_0..u_n`. Rows, all scaled to O(1) coefficients:
//!
//! * `0`: `h u'(0) = 0` (five-point, fourth order)
//! * `1`: `h² u''(0) = 0` (five-point, third order)
//! * `2..=n-2`: `δ⁴u_i + h⁴ f(u_i) = 0`
//! * `n-1`: `h u'(1) = 0`
//! * `n`: `u_0 - Σ w_j a(t_j) u_j = 0` with Simpson weights (the dense row)

use crate::banded::{BandedMatrix, BorderedSolver};
use crate::error::{Error, Result};
use crate::exprlang::ExpressionFn;
use crate::grid::{node, GridFunction};
use crate::kernel::KernelContext;
use crate::quadrature::{grid_weights, Rule};
use crate::solver::SolveConfig;

pub const MIN_COLLOCATION_N: usize = 20;
const MAX_NEWTON: usize = 60;
const MAX_HALVINGS: usize = 30;
const NOISE_FACTOR: f64 = 100.0;

const D1_FORWARD: [f64; 5] = [-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25];
const D2_FORWARD: [f64; 5] = [
    35.0 / 12.0,
    -26.0 / 3.0,
    19.0 / 2.0,
    -14.0 / 3.0,
    11.0 / 12.0,
];
const D4_CENTRAL: [f64; 5] = [1.0, -4.0, 6.0, -4.0, 1.0];

#[derive(Debug, Clone)]
pub struct CollocationResult {
    pub solution: GridFunction,
    pub converged: bool,
    pub iterations: usize,
    /// Max-norm of the scaled discrete residual at the returned iterate.
    pub residual: f64,
}

struct System<'a> {
    n: usize,
    h4: f64,
    f: &'a ExpressionFn,
    // w_j a(t_j)
    nonlocal: Vec<f64>,
}

impl<'a> System<'a> {
    fn f_at(&self, x: f64) -> Result<f64> {
        self.f
            .eval(x)
            .map_err(|source| Error::Eval { at: x, source })
    }

    fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut r = vec![0.0; n + 1];
        r[0] = (0..5).map(|k| D1_FORWARD[k] * u[k]).sum();
        r[1] = (0..5).map(|k| D2_FORWARD[k] * u[k]).sum();
        for i in 2..=n - 2 {
            let d4: f64 = (0..5).map(|k| D4_CENTRAL[k] * u[i - 2 + k]).sum();
            r[i] = d4 + self.h4 * self.f_at(u[i])?;
        }
        r[n - 1] = -(0..5).map(|k| D1_FORWARD[k] * u[n - k]).sum::<f64>();
        r[n] = u[0] - self.nonlocal.iter().zip(u).map(|(w, v)| w * v).sum::<f64>();
        Ok(r)
    }

    /// Rounding level of the scaled residual at `u`.
    fn noise_floor(&self, u: &[f64]) -> Result<f64> {
        let fmax = u
            .iter()
            .map(|&x| Ok(self.f_at(x)?.abs()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(NOISE_FACTOR * f64::EPSILON * (16.0 * max_abs(u) + self.h4 * fmax))
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        let d = 1e-6 * x.abs().max(1.0);
        // f is only guaranteed on [0, ∞): use a one-sided difference near 0.
        if x - d < 0.0 {
            Ok((self.f_at(x + d)? - self.f_at(x)?) / d)
        } else {
            Ok((self.f_at(x + d)? - self.f_at(x - d)?) / (2.0 * d))
        }
    }

    fn jacobian(&self, u: &[f64]) -> Result<BorderedSolver> {
        let n = self.n;
        let (kl, ku) = (3, 4);
        let mut band = BandedMatrix::zeros(n + 1, kl, ku);
        for k in 0..5 {
            band.set(0, k, D1_FORWARD[k]);
            band.set(1, k, D2_FORWARD[k]);
            band.set(n - 1, n - k, -D1_FORWARD[k]);
        }
        for i in 2..=n - 2 {
            for k in 0..5 {
                band.set(i, i - 2 + k, D4_CENTRAL[k]);
            }
            band.add(i, i, self.h4 * self.derivative(u[i])?);
        }
        // Last row: banded tail in the band, the rest is the dense border.
        let mut dense = vec![0.0; n + 1];
        for (j, w) in self.nonlocal.iter().enumerate() {
            let coeff = if j == 0 { 1.0 - w } else { -w };
            if j + kl >= n {
                band.set(n, j, coeff);
            } else {
                dense[j] = coeff;
            }
        }
        BorderedSolver::new(band, n, dense)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solve the discretised boundary value problem on `config.n` intervals,
/// starting from `config.u0`. Newton steps are halved (up to 30 times) while
/// the residual does not decrease. Converged means the last step was below
/// `1e-12 ‖u‖`, or the residual stalled at its rounding level.
pub fn collocation_oracle(
    f: &ExpressionFn,
    ctx: &KernelContext,
    config: &SolveConfig,
) -> Result<CollocationResult> {
    config.validate()?;
    let n = config.n;
    if n < MIN_COLLOCATION_N {
        return Err(Error::argument(format!(
            "collocation needs n >= {MIN_COLLOCATION_N}, got {n}"
        )));
    }
    let h = 1.0 / n as f64;
    let w = grid_weights(n, Rule::Simpson)?;
    let nonlocal = w
        .iter()
        .enumerate()
        .map(|(j, wj)| Ok(wj * ctx.weight_at(node(j, n))?))
        .collect::<Result<Vec<_>>>()?;
    let system = System {
        n,
        h4: h.powi(4),
        f,
        nonlocal,
    };

    let mut u = config.u0.materialize(n)?.into_values();
    let mut r = system.residual(&u)?;
    let mut rnorm = max_abs(&r);
    let mut converged = rnorm == 0.0;
    let mut iterations = 0;
    while !converged && iterations < MAX_NEWTON {
        iterations += 1;
        let jac = system.jacobian(&u)?;
        let step = jac.solve(&r.iter().map(|x| -x).collect::<Vec<_>>());
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
            if let Ok(tr) = system.residual(&trial) {
                let tn = max_abs(&tr);
                if tn.is_finite() && tn <= rnorm {
                    accepted = Some((trial, tr, tn));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((trial, tr, tn)) = accepted else {
            // No step reduces the residual: accept if it is already at the
            // rounding level of the stencils.
            converged = rnorm <= system.noise_floor(&u)?;
            break;
        };
        let moved = lambda * max_abs(&step);
        u = trial;
        r = tr;
        rnorm = tn;
        converged = moved <= 1e-12 * max_abs(&u) + 1e-20 || rnorm == 0.0;
    }

    Ok(CollocationResult {
        solution: GridFunction::new(u)?,
        converged,
        iterations,
        residual: rnorm,
    })
}

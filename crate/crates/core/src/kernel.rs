//! Green's function of `u'''' + y = 0` with `u'(0) = u'(1) = u''(0) = 0`,
//! and the modified kernel that absorbs the condition `u(0) = ∫ a u`.

use crate::error::{Error, Result};
use crate::exprlang::ExpressionFn;
use crate::quadrature::{try_integrate, QuadratureSettings};

pub const DEFAULT_THETA: f64 = 0.25;

/// Uniform samples used (together with quadrature nodes) to check `a ≥ 0`.
const WEIGHT_SAMPLES: usize = 1001;

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::argument(format!("{name} = {x} is outside [0, 1]")))
    }
}

/// `G(t, s)`; nonnegative on the unit square. The two branches agree on the
/// diagonal, where the `s ≤ t` branch is used.
pub fn green(t: f64, s: f64) -> Result<f64> {
    check_unit("t", t)?;
    check_unit("s", s)?;
    Ok(green_unchecked(t, s))
}

#[inline]
pub(crate) fn green_unchecked(t: f64, s: f64) -> f64 {
    let r = 1.0 - s;
    let base = t * t * t * r * r;
    if s <= t {
        let d = t - s;
        (base - d * d * d) / 6.0
    } else {
        base / 6.0
    }
}

/// `g(s) = s(1 - s)^2 / 6`, the value of `G(1, s)` and an upper bound for
/// `G(·, s)`.
pub fn g_weight(s: f64) -> Result<f64> {
    check_unit("s", s)?;
    Ok(g_weight_unchecked(s))
}

#[inline]
pub(crate) fn g_weight_unchecked(s: f64) -> f64 {
    s * (1.0 - s) * (1.0 - s) / 6.0
}

/// The weight `a`, the cone parameter `θ`, and the derived masses
/// `α = ∫₀¹ a` and `β = ∫_θ^{1-θ} a`. Immutable once built.
#[derive(Debug, Clone)]
pub struct KernelContext {
    weight: ExpressionFn,
    theta: f64,
    alpha: f64,
    beta: f64,
    quad: QuadratureSettings,
}

impl KernelContext {
    /// Computes `α` and `β` by quadrature and enforces `a ≥ 0` (sampled) and
    /// `0 < α < 1`.
    pub fn new(weight: ExpressionFn, theta: f64, quad: QuadratureSettings) -> Result<Self> {
        if !(theta > 0.0 && theta < 0.5) {
            return Err(Error::argument(format!(
                "theta = {theta} is outside (0, 1/2)"
            )));
        }
        if quad.panels == 0 {
            return Err(Error::argument("quadrature needs at least one panel"));
        }
        let eval = |t: f64| {
            weight
                .eval(t)
                .map_err(|source| Error::Eval { at: t, source })
        };
        let samples = (0..WEIGHT_SAMPLES)
            .map(|i| i as f64 / (WEIGHT_SAMPLES - 1) as f64)
            .chain(quad.nodes(0.0, 1.0).into_iter().map(|(x, _)| x));
        for t in samples {
            let v = eval(t)?;
            if v < 0.0 {
                return Err(Error::HypothesisH2(format!("a({t}) = {v} is negative")));
            }
        }
        let alpha = try_integrate(eval, 0.0, 1.0, &quad)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::HypothesisH2(format!(
                "integral of a over [0, 1] is {alpha}, must lie in (0, 1)"
            )));
        }
        let beta = try_integrate(eval, theta, 1.0 - theta, &quad)?;
        Ok(Self {
            weight,
            theta,
            alpha,
            beta,
            quad,
        })
    }

    pub fn weight(&self) -> &ExpressionFn {
        &self.weight
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn quad(&self) -> &QuadratureSettings {
        &self.quad
    }

    /// Same weight and quadrature with a different `θ`.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.weight.clone(), theta, self.quad)
    }

    /// Cone constant `θ³(1 - α + β)`.
    pub fn cone_constant(&self) -> f64 {
        self.theta.powi(3) * (1.0 - self.alpha + self.beta)
    }

    pub fn weight_at(&self, t: f64) -> Result<f64> {
        self.weight
            .eval(t)
            .map_err(|source| Error::Eval { at: t, source })
    }

    /// `(1/(1-α)) ∫₀¹ a(τ) G(τ, s) dτ`, the `t`-independent part of the
    /// modified kernel. The integral is split at `τ = s`, where `G(·, s)`
    /// changes branch.
    pub fn correction(&self, s: f64) -> Result<f64> {
        check_unit("s", s)?;
        let integrand = |tau: f64| Ok(self.weight_at(tau)? * green_unchecked(tau, s));
        let left = try_integrate(integrand, 0.0, s, &self.quad)?;
        let right = try_integrate(integrand, s, 1.0, &self.quad)?;
        Ok((left + right) / (1.0 - self.alpha))
    }

    /// `H(t, s) = G(t, s) + correction(s)`.
    pub fn modified_kernel(&self, t: f64, s: f64) -> Result<f64> {
        Ok(green(t, s)? + self.correction(s)?)
    }
}

/// Free-function form of [`KernelContext::new`].
pub fn make_context(
    weight: ExpressionFn,
    theta: f64,
    quad: QuadratureSettings,
) -> Result<KernelContext> {
    KernelContext::new(weight, theta, quad)
}

//! Numerical checks of the standing hypotheses and of the growth conditions
//! `f₀ = 0` / `f∞ = 0`, with the constants the existence arguments use.
//!
//! Limits are estimated on finite geometric schedules, so a function that
//! changes behaviour beyond the schedule will fool the estimators. Every
//! estimate carries its raw schedule for auditing.

use crate::error::{Error, Result};
use crate::exprlang::ExpressionFn;
use crate::kernel::KernelContext;
use crate::quadrature::{integrate, QuadratureSettings};

/// `|f(u)/u|` below this counts as a zero limit.
pub const ZERO_LIMIT_TOL: f64 = 1e-4;
/// Ratios at or above this that keep increasing count as divergent.
pub const DIVERGENCE_LEVEL: f64 = 1e8;
/// Number of log-spaced scan points.
pub const SCAN_POINTS: usize = 10_000;
const SCAN_LO: f64 = 1e-8;
const RHO1_MAX: f64 = 1e3;
const RHO1_MIN: f64 = 1e-6;
const BOUNDED_PROBE_MAX: f64 = 1e6;
/// Relative spread allowed over the last probed decade for `f` to count as
/// having settled at its supremum.
const STABLE_TAIL_TOL: f64 = 1e-6;
const L_INFLATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitValue {
    Finite(f64),
    Divergent,
}

impl LimitValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            LimitValue::Finite(v) => Some(v),
            LimitValue::Divergent => None,
        }
    }
}

impl std::fmt::Display for LimitValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LimitValue::Finite(v) => write!(f, "{v:e}"),
            LimitValue::Divergent => f.write_str("divergent"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub value: LimitValue,
    /// Last two schedule values agree to `1e-4 (1 + |last|)`.
    pub converged: bool,
    /// `(u, f(u)/u)` along the schedule.
    pub schedule: Vec<(f64, f64)>,
}

impl LimitEstimate {
    /// Converged to a value with magnitude below [`ZERO_LIMIT_TOL`].
    pub fn is_zero(&self) -> bool {
        self.converged && matches!(self.value, LimitValue::Finite(v) if v.abs() < ZERO_LIMIT_TOL)
    }

    pub fn is_divergent(&self) -> bool {
        self.value == LimitValue::Divergent
    }
}

fn eval_nonneg(f: &ExpressionFn, u: f64) -> Result<f64> {
    let v = f.eval(u).map_err(|source| Error::Eval { at: u, source })?;
    if v < 0.0 {
        return Err(Error::HypothesisH1(format!("f({u}) = {v} is negative")));
    }
    Ok(v)
}

fn estimate_on(f: &ExpressionFn, points: impl Iterator<Item = f64>) -> Result<LimitEstimate> {
    let schedule = points
        .map(|u| Ok((u, eval_nonneg(f, u)? / u)))
        .collect::<Result<Vec<_>>>()?;
    let [.., (_, prev), (_, last)] = schedule[..] else {
        unreachable!("schedules have at least two points")
    };
    let value = if last >= DIVERGENCE_LEVEL && last > prev {
        LimitValue::Divergent
    } else {
        LimitValue::Finite(last)
    };
    Ok(LimitEstimate {
        value,
        converged: value != LimitValue::Divergent
            && (last - prev).abs() < 1e-4 * (1.0 + last.abs()),
        schedule,
    })
}

/// `lim_{u→0+} f(u)/u` along `u = 10^{-k}`, `k = 1..=12`.
pub fn estimate_f0(f: &ExpressionFn) -> Result<LimitEstimate> {
    estimate_on(f, (1..=12).map(|k| 10f64.powi(-k)))
}

/// `lim_{u→∞} f(u)/u` along `u = 10^k`, `k = 1..=8`.
pub fn estimate_finf(f: &ExpressionFn) -> Result<LimitEstimate> {
    estimate_on(f, (1..=8).map(|k| 10f64.powi(k)))
}

/// `count` points, log-uniform on `[lo, hi]`, endpoints included.
pub fn log_scan(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Thm31 {
    /// `f(u) ≤ ε u` on `(0, ρ₁]` with `ε = 1 - α`.
    Applicable {
        epsilon: f64,
        rho1: f64,
    },
    NotApplicable {
        reason: String,
    },
}

/// Certify the small-`u` condition: `f₀ = 0` and a radius `ρ₁` below which
/// `f(u) ≤ (1-α) u`.
pub fn certify_thm31(f: &ExpressionFn, ctx: &KernelContext) -> Result<Thm31> {
    let f0 = estimate_f0(f)?;
    if !f0.is_zero() {
        return Ok(Thm31::NotApplicable {
            reason: format!("f0 estimate {} is not zero", f0.value),
        });
    }
    let epsilon = 1.0 - ctx.alpha();
    let excess = |u: f64| -> Result<f64> { Ok(eval_nonneg(f, u)? - epsilon * u) };
    let scan = log_scan(SCAN_LO, RHO1_MAX, SCAN_POINTS);
    let mut first_bad = None;
    for (k, &u) in scan.iter().enumerate() {
        if excess(u)? > 0.0 {
            first_bad = Some(k);
            break;
        }
    }
    let rho1 = match first_bad {
        None => RHO1_MAX,
        Some(0) => 0.0,
        Some(k) => bisect_boundary(scan[k - 1], scan[k], |u| Ok(excess(u)? <= 0.0))?,
    };
    if rho1 < RHO1_MIN {
        return Ok(Thm31::NotApplicable {
            reason: format!("no radius >= {RHO1_MIN:e} with f(u) <= (1 - alpha) u"),
        });
    }
    Ok(Thm31::Applicable { epsilon, rho1 })
}

/// Largest point of `[good, bad]` (to rounding) where `ok` still holds,
/// assuming `ok(good)` and `!ok(bad)`.
fn bisect_boundary(mut good: f64, mut bad: f64, ok: impl Fn(f64) -> Result<bool>) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (good + bad);
        if mid <= good || mid >= bad {
            break;
        }
        if ok(mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Thm32 {
    /// `f ≤ L` on the probed range.
    Bounded {
        l: f64,
    },
    /// `f(u) ≤ η u` for `u > ρ₂`, `f(u) ≤ η σ` on `[0, ρ₂]`, `ρ̂₂ = max(σ, ρ₂)`.
    Unbounded {
        eta: f64,
        rho2: f64,
        sigma: f64,
        rho_hat2: f64,
    },
    NotApplicable {
        reason: String,
    },
}

/// Certify the large-`u` condition `f∞ = 0`, either through a global bound
/// `L` or through `η = 1 - α` with the radii `ρ₂`, `σ`.
pub fn certify_thm32(f: &ExpressionFn, ctx: &KernelContext) -> Result<Thm32> {
    let finf = estimate_finf(f)?;
    if !finf.is_zero() {
        return Ok(Thm32::NotApplicable {
            reason: format!("f_inf estimate {} is not zero", finf.value),
        });
    }
    let mut scan = vec![0.0];
    scan.extend(log_scan(SCAN_LO, BOUNDED_PROBE_MAX, SCAN_POINTS));
    let values = scan
        .iter()
        .map(|&u| eval_nonneg(f, u))
        .collect::<Result<Vec<_>>>()?;

    let (argmax, &max) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("scan is nonempty");
    let tail: Vec<f64> = scan
        .iter()
        .zip(&values)
        .filter(|(u, _)| **u >= BOUNDED_PROBE_MAX / 10.0)
        .map(|(_, v)| *v)
        .collect();
    let tail_spread = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - tail.iter().copied().fold(f64::INFINITY, f64::min);
    if tail_spread <= STABLE_TAIL_TOL * max.max(f64::MIN_POSITIVE) {
        let lo = scan[argmax.saturating_sub(1)];
        let hi = scan[(argmax + 1).min(scan.len() - 1)];
        let refined = golden_max(f, lo, hi)?.max(max);
        return Ok(Thm32::Bounded {
            l: refined * (1.0 + L_INFLATION),
        });
    }

    let eta = 1.0 - ctx.alpha();
    // Last scan index where f(u) > η u; ρ₂ is the next scan point.
    let last_bad = scan.iter().zip(&values).rposition(|(u, v)| *v > eta * u);
    let rho2_index = match last_bad {
        None => 0,
        Some(k) if k + 1 < scan.len() => k + 1,
        Some(_) => {
            return Ok(Thm32::NotApplicable {
                reason: "f(u) > (1 - alpha) u at the end of the probed range".into(),
            })
        }
    };
    let rho2 = scan[rho2_index];
    let peak = values[..=rho2_index].iter().copied().fold(0.0, f64::max);
    let sigma = peak / eta;
    Ok(Thm32::Unbounded {
        eta,
        rho2,
        sigma,
        rho_hat2: sigma.max(rho2),
    })
}

/// Golden-section refinement of `max f` on `[lo, hi]`.
fn golden_max(f: &ExpressionFn, mut lo: f64, mut hi: f64) -> Result<f64> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = eval_nonneg(f, lo)?.max(eval_nonneg(f, hi)?);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = eval_nonneg(f, x1)?;
    let mut f2 = eval_nonneg(f, x2)?;
    for _ in 0..200 {
        best = best.max(f1).max(f2);
        if hi - lo <= 1e-15 * hi.abs().max(1e-300) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = eval_nonneg(f, x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = eval_nonneg(f, x1)?;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandingHypotheses {
    /// `f ≥ 0` at every scan point of `[0, 10⁶]`.
    pub h1: bool,
    /// `a ≥ 0` at the samples and `0 < α < 1`.
    pub h2: bool,
    /// `None` when `a` could not be integrated.
    pub alpha: Option<f64>,
    pub h1_detail: Option<String>,
    pub h2_detail: Option<String>,
}

pub fn check_h1_h2(f: &ExpressionFn, a: &ExpressionFn) -> StandingHypotheses {
    let mut h1_detail = None;
    let mut scan = vec![0.0];
    scan.extend(log_scan(SCAN_LO, BOUNDED_PROBE_MAX, SCAN_POINTS - 1));
    for u in scan {
        match f.eval(u) {
            Ok(v) if v >= 0.0 => {}
            Ok(v) => {
                h1_detail = Some(format!("f({u}) = {v} is negative"));
                break;
            }
            Err(e) => {
                h1_detail = Some(format!("f({u}) failed: {e}"));
                break;
            }
        }
    }

    let mut h2_detail = None;
    for i in 0..=1000 {
        let t = i as f64 / 1000.0;
        match a.eval(t) {
            Ok(v) if v >= 0.0 => {}
            Ok(v) => {
                h2_detail = Some(format!("a({t}) = {v} is negative"));
                break;
            }
            Err(e) => {
                h2_detail = Some(format!("a({t}) failed: {e}"));
                break;
            }
        }
    }
    let alpha = integrate(
        |t| a.eval(t).unwrap_or(f64::NAN),
        0.0,
        1.0,
        &QuadratureSettings::default(),
    )
    .ok();
    match alpha {
        Some(al) if !(al > 0.0 && al < 1.0) && h2_detail.is_none() => {
            h2_detail = Some(format!(
                "integral of a over [0, 1] is {al}, must lie in (0, 1)"
            ));
        }
        None if h2_detail.is_none() => h2_detail = Some("a could not be integrated".into()),
        _ => {}
    }
    StandingHypotheses {
        h1: h1_detail.is_none(),
        h2: h2_detail.is_none(),
        alpha,
        h1_detail,
        h2_detail,
    }
}

/// Everything the analysis reports about one `(f, a, θ)` instance.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub f0: LimitEstimate,
    pub finf: LimitEstimate,
    pub thm31: Thm31,
    pub thm32: Thm32,
}

impl HypothesisReport {
    pub fn thm31_applicable(&self) -> bool {
        matches!(self.thm31, Thm31::Applicable { .. })
    }

    pub fn thm32_applicable(&self) -> bool {
        !matches!(self.thm32, Thm32::NotApplicable { .. })
    }

    /// `f₀ = 0` and `f∞ = ∞`.
    pub fn superlinear(&self) -> bool {
        self.f0.is_zero() && self.finf.is_divergent()
    }

    /// `f₀ = ∞` and `f∞ = 0`.
    pub fn sublinear(&self) -> bool {
        self.f0.is_divergent() && self.finf.is_zero()
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self.thm31 {
            Thm31::Applicable { epsilon, .. } => Some(epsilon),
            _ => None,
        }
    }

    pub fn rho1(&self) -> Option<f64> {
        match self.thm31 {
            Thm31::Applicable { rho1, .. } => Some(rho1),
            _ => None,
        }
    }
}

/// Run both estimators and both certifications. `f` must satisfy (H1) on the
/// scanned points; violations surface as errors.
pub fn analyze(f: &ExpressionFn, ctx: &KernelContext) -> Result<HypothesisReport> {
    Ok(HypothesisReport {
        alpha: ctx.alpha(),
        beta: ctx.beta(),
        theta: ctx.theta(),
        f0: estimate_f0(f)?,
        finf: estimate_finf(f)?,
        thm31: certify_thm31(f, ctx)?,
        thm32: certify_thm32(f, ctx)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(src: &str) -> ExpressionFn {
        ExpressionFn::parse(src).unwrap()
    }

    fn ctx_t2() -> KernelContext {
        KernelContext::new(f("t^2"), 0.25, QuadratureSettings::default()).unwrap()
    }

    #[test]
    fn f0_estimates() {
        let e = estimate_f0(&f("u*(1-exp(-u))")).unwrap();
        assert!(e.is_zero());
        assert_eq!(e.schedule.len(), 12);
        let e = estimate_f0(&f("1-exp(-u)")).unwrap();
        assert!((e.value.finite().unwrap() - 1.0).abs() < 1e-3);
        let e = estimate_f0(&f("u")).unwrap();
        assert_eq!(e.value, LimitValue::Finite(1.0));
        assert!(e.converged);
        assert!(estimate_f0(&f("1")).unwrap().is_divergent());
    }

    #[test]
    fn finf_estimates() {
        let e = estimate_finf(&f("1-exp(-u)")).unwrap();
        assert!(e.is_zero());
        let e = estimate_finf(&f("u*(1-exp(-u))")).unwrap();
        assert!((e.value.finite().unwrap() - 1.0).abs() < 1e-3);
        assert!(e.converged);
        assert!(estimate_finf(&f("u^2")).unwrap().is_divergent());
        assert_eq!(estimate_finf(&f("u^2")).unwrap().schedule.len(), 8);
    }

    #[test]
    fn negative_f_is_an_h1_violation() {
        assert!(matches!(
            estimate_f0(&f("u-1")),
            Err(Error::HypothesisH1(_))
        ));
    }

    #[test]
    fn thm31_constants() {
        let ctx = ctx_t2();
        match certify_thm31(&f("u*(1-exp(-u))"), &ctx).unwrap() {
            Thm31::Applicable { epsilon, rho1 } => {
                assert!((epsilon - 2.0 / 3.0).abs() < 1e-15);
                assert!((rho1 - 3f64.ln()).abs() < 1e-6, "{rho1}");
            }
            other => panic!("{other:?}"),
        }
        match certify_thm31(&f("u^2"), &ctx).unwrap() {
            Thm31::Applicable { rho1, .. } => assert!((rho1 - 2.0 / 3.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            certify_thm31(&f("u"), &ctx).unwrap(),
            Thm31::NotApplicable { .. }
        ));
        match certify_thm31(&f("1e-6*u^2"), &ctx).unwrap() {
            Thm31::Applicable { rho1, .. } => assert_eq!(rho1, 1e3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn thm32_bounded_cases() {
        let ctx = ctx_t2();
        match certify_thm32(&f("1-exp(-u)"), &ctx).unwrap() {
            Thm32::Bounded { l } => assert!((l - 1.0).abs() <= 1e-6, "{l}"),
            other => panic!("{other:?}"),
        }
        match certify_thm32(&f("u*exp(-u)"), &ctx).unwrap() {
            Thm32::Bounded { l } => {
                let e1 = (-1f64).exp();
                assert!(l >= e1 && (l - e1).abs() < 1e-6, "{l}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            certify_thm32(&f("u^2"), &ctx).unwrap(),
            Thm32::NotApplicable { .. }
        ));
    }

    #[test]
    fn thm32_unbounded_case() {
        let ctx = ctx_t2();
        let g = f("u/(1+0.001*u)");
        match certify_thm32(&g, &ctx).unwrap() {
            Thm32::Unbounded {
                eta,
                rho2,
                sigma,
                rho_hat2,
            } => {
                assert!((eta - 2.0 / 3.0).abs() < 1e-15);
                // f(u) <= (2/3) u exactly for u >= 500
                // ρ₂ is the first scan point past 500; scan spacing is ~0.33%.
                assert!((500.0..500.0 * 1.004).contains(&rho2), "{rho2}");
                assert!((sigma - 500.0).abs() < 2.0, "{sigma}");
                assert_eq!(rho_hat2, sigma.max(rho2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn standing_hypotheses() {
        let c = check_h1_h2(&f("u*(1-exp(-u))"), &f("t^2"));
        assert!(c.h1 && c.h2);
        assert!((c.alpha.unwrap() - 1.0 / 3.0).abs() < 1e-14);
        let c = check_h1_h2(&f("u-1"), &f("t^2"));
        assert!(!c.h1 && c.h2);
        let c = check_h1_h2(&f("u"), &f("2*t"));
        assert!(c.h1 && !c.h2);
        assert!((c.alpha.unwrap() - 1.0).abs() < 1e-14);
        let c = check_h1_h2(&f("1/u"), &f("t-0.5"));
        assert!(!c.h1 && !c.h2);
    }

    #[test]
    fn report_flags() {
        let ctx = ctx_t2();
        let r = analyze(&f("u*(1-exp(-u))"), &ctx).unwrap();
        assert!(r.thm31_applicable() && !r.thm32_applicable());
        assert!(!r.superlinear() && !r.sublinear());
        let r = analyze(&f("1-exp(-u)"), &ctx).unwrap();
        assert!(!r.thm31_applicable() && r.thm32_applicable());
        assert!(!r.sublinear());
        let r = analyze(&f("u^2"), &ctx).unwrap();
        assert!(r.thm31_applicable() && !r.thm32_applicable());
        assert!(r.superlinear());
    }
}

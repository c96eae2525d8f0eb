//! Composite quadrature on `[lo, hi]` and on uniform grids over `[0, 1]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Midpoint,
    Simpson,
    /// Five-point Gauss-Legendre on each panel.
    Gauss5,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Midpoint => "midpoint",
            Rule::Simpson => "simpson",
            Rule::Gauss5 => "gauss5",
        })
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" => Ok(Rule::Midpoint),
            "simpson" => Ok(Rule::Simpson),
            "gauss5" => Ok(Rule::Gauss5),
            other => Err(Error::argument(format!(
                "unknown quadrature rule '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSettings {
    pub rule: Rule,
    pub panels: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rule: Rule::Simpson,
            panels: 200,
        }
    }
}

impl QuadratureSettings {
    pub fn new(rule: Rule, panels: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::argument("quadrature needs at least one panel"));
        }
        Ok(Self { rule, panels })
    }

    /// Nodes and weights for `[lo, hi]`, in increasing abscissa order.
    /// Shared panel endpoints of the Simpson rule are merged.
    pub fn nodes(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let panels = self.panels.max(1);
        let h = (hi - lo) / panels as f64;
        let at = |k: usize| if k == panels { hi } else { lo + k as f64 * h };
        match self.rule {
            Rule::Midpoint => (0..panels)
                .map(|k| (lo + (k as f64 + 0.5) * h, h))
                .collect(),
            Rule::Simpson => {
                let mut out = Vec::with_capacity(2 * panels + 1);
                out.push((lo, h / 6.0));
                for k in 0..panels {
                    let (a, b) = (at(k), at(k + 1));
                    out.push((0.5 * (a + b), 4.0 * h / 6.0));
                    out.push((b, h / 6.0));
                    if k + 1 < panels {
                        // The right endpoint is the next panel's left endpoint.
                        out.last_mut().unwrap().1 = 2.0 * h / 6.0;
                    }
                }
                out
            }
            Rule::Gauss5 => {
                let mut out = Vec::with_capacity(5 * panels);
                for k in 0..panels {
                    let mid = lo + (k as f64 + 0.5) * h;
                    for (x, w) in GAUSS5 {
                        out.push((mid + 0.5 * h * x, 0.5 * h * w));
                    }
                }
                out
            }
        }
    }
}

// Abscissae and weights of the 5-point Gauss-Legendre rule on [-1, 1].
const GAUSS5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// Approximate `∫_lo^hi f`. Fails on a non-finite sample, naming the abscissa.
pub fn integrate<F>(f: F, lo: f64, hi: f64, settings: &QuadratureSettings) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), lo, hi, settings)
}

/// As [`integrate`], for integrands that can fail.
pub fn try_integrate<F>(f: F, lo: f64, hi: f64, settings: &QuadratureSettings) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::argument(format!(
            "integration bounds out of order: [{lo}, {hi}]"
        )));
    }
    if settings.panels == 0 {
        return Err(Error::argument("quadrature needs at least one panel"));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for (x, w) in settings.nodes(lo, hi) {
        let y = f(x)?;
        if !y.is_finite() {
            return Err(Error::NonFinite { at: x });
        }
        sum += w * y;
    }
    Ok(sum)
}

/// Grid quadrature weights for `n` uniform intervals on `[0, 1]`.
///
/// `Simpson` needs an even `n`; `Midpoint` falls back to the trapezoid rule
/// (the grid has no midpoints). `Gauss5` cannot be evaluated on a uniform grid.
pub fn grid_weights(n: usize, rule: Rule) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::argument("grid needs at least one interval"));
    }
    let h = 1.0 / n as f64;
    match rule {
        Rule::Midpoint => {
            let mut w = vec![h; n + 1];
            w[0] = 0.5 * h;
            w[n] = 0.5 * h;
            Ok(w)
        }
        Rule::Simpson => {
            if !n.is_multiple_of(2) {
                return Err(Error::argument(format!(
                    "simpson grid rule needs an even number of intervals, got {n}"
                )));
            }
            Ok((0..=n)
                .map(|i| {
                    let c = if i == 0 || i == n {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    c * h / 3.0
                })
                .collect())
        }
        Rule::Gauss5 => Err(Error::argument("gauss5 nodes do not lie on a uniform grid")),
    }
}

/// Integrate grid samples over `[0, 1]` (only `settings.rule` is consulted).
pub fn integrate_grid(values: &GridFunction, settings: &QuadratureSettings) -> Result<f64> {
    let w = grid_weights(values.n(), settings.rule)?;
    Ok(w.iter().zip(values.values()).map(|(w, v)| w * v).sum())
}

use crate::error::{Error, Result};

/// Entries below this count as nonnegative.
pub const NONNEG_SLACK: f64 = 1e-12;

/// Samples of a function at `t_i = i/n`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::argument(
                "a grid function needs at least two samples",
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                at: i as f64 / (values.len() - 1) as f64,
            });
        }
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        assert!(n >= 1, "grid resolution must be positive");
        Self {
            values: (0..=n).map(|i| f(node(i, n))).collect(),
        }
    }

    pub fn try_from_fn(n: usize, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::argument("grid resolution must be positive"));
        }
        let values = (0..=n).map(|i| f(node(i, n))).collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::from_fn(n, |_| c)
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n() as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        node(i, self.n())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_nonneg(&self) -> bool {
        self.min() >= -NONNEG_SLACK
    }

    /// Piecewise-linear interpolation; `t` is clamped to `[0, 1]`.
    pub fn interpolate(&self, t: f64) -> f64 {
        let n = self.n();
        let x = t.clamp(0.0, 1.0) * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        let frac = x - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Sup-norm distance, sampling the finer grid at the coarser one's nodes
    /// when resolutions differ.
    pub fn distance(&self, other: &GridFunction) -> f64 {
        let (coarse, fine) = if self.n() <= other.n() {
            (self, other)
        } else {
            (other, self)
        };
        (0..=coarse.n())
            .map(|i| (coarse.values[i] - fine.interpolate(coarse.t(i))).abs())
            .fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Index range `lo..=hi` of grid points in `[theta, 1 - theta]`, with the
    /// endpoints snapped outward to the grid.
    pub fn inner_range(&self, theta: f64) -> (usize, usize) {
        let n = self.n() as f64;
        let snap = |x: f64, round: fn(f64) -> f64| {
            if (x - x.round()).abs() < 1e-9 {
                x.round()
            } else {
                round(x)
            }
        };
        let lo = snap(theta * n, f64::floor).max(0.0) as usize;
        let hi = snap((1.0 - theta) * n, f64::ceil).min(n) as usize;
        (lo, hi)
    }
}

pub(crate) fn node(i: usize, n: usize) -> f64 {
    if i == n {
        1.0
    } else {
        i as f64 / n as f64
    }
}

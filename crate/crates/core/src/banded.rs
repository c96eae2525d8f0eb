//! Banded LU with partial pivoting, plus a rank-one update for one dense row.

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals. Storage leaves room
/// for the `kl` extra super-diagonals that pivoting can fill in.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl >= i && j <= i + self.ku + self.kl {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// Panics outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn factor(mut self) -> Result<BandedLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut pivots = vec![0; n];
        let mut mult = vec![0.0; n * kl];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let p = (k..=last_row)
                .max_by(|&a, &b| self.get(a, k).abs().total_cmp(&self.get(b, k).abs()))
                .unwrap_or(k);
            if self.get(p, k) == 0.0 {
                return Err(Error::argument(format!(
                    "singular banded matrix at column {k}"
                )));
            }
            pivots[k] = p;
            let last_col = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last_row {
                let m = self.get(i, k) / pivot;
                mult[k * kl + (i - k - 1)] = m;
                if m == 0.0 {
                    continue;
                }
                for j in k + 1..=last_col {
                    let ukj = self.data[self.idx(k, j)];
                    let at = self.idx(i, j);
                    self.data[at] -= m * ukj;
                }
            }
        }
        Ok(BandedLu {
            lu: self,
            pivots,
            mult,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: BandedMatrix,
    pivots: Vec<usize>,
    mult: Vec<f64>,
}

impl BandedLu {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, kl, ku) = (self.lu.n, self.lu.kl, self.lu.ku);
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= self.mult[k * kl + (i - k - 1)] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + ku + kl).min(n - 1) {
                s -= self.lu.get(k, j) * x[j];
            }
            x[k] = s / self.lu.get(k, k);
        }
        x
    }
}

/// `A = B + e_r vᵀ`: a banded matrix whose row `r` also carries the dense
/// entries `v` (which must be zero inside the band of row `r`). Solved with
/// the Sherman-Morrison formula.
#[derive(Debug, Clone)]
pub struct BorderedSolver {
    lu: BandedLu,
    row: usize,
    dense: Vec<f64>,
    // B⁻¹ e_r
    y: Vec<f64>,
    denom: f64,
}

impl BorderedSolver {
    pub fn new(band: BandedMatrix, row: usize, dense: Vec<f64>) -> Result<Self> {
        let n = band.n();
        assert_eq!(dense.len(), n);
        let lu = band.factor()?;
        let mut e = vec![0.0; n];
        e[row] = 1.0;
        let y = lu.solve(&e);
        let denom = 1.0 + dot(&dense, &y);
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::argument("singular bordered system"));
        }
        Ok(Self {
            lu,
            row,
            dense,
            y,
            denom,
        })
    }

    pub fn row(&self) -> usize {
        self.row
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let z = self.lu.solve(rhs);
        let c = dot(&self.dense, &z) / self.denom;
        z.iter().zip(&self.y).map(|(z, y)| z - c * y).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

//! Dense real polynomials in the monomial basis, lowest degree first.

use std::fmt::Write as _;

use crate::exprlang::ExpressionFn;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// Polynomial from Bernstein coefficients on `[0, 1]`.
    pub fn from_bernstein(b: &[f64]) -> Self {
        let Some(deg) = b.len().checked_sub(1) else {
            return Self::zero();
        };
        let mut out = vec![0.0; deg + 1];
        // B_{k,d}(t) = C(d,k) t^k (1-t)^{d-k} = Σ_j C(d,k) C(d-k,j) (-1)^j t^{k+j}
        for (k, &bk) in b.iter().enumerate() {
            for j in 0..=(deg - k) {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                out[k + j] += bk * binomial(deg, k) * binomial(deg - k, j) * sign;
            }
        }
        Self::new(out)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k + 1) as f64),
        );
        Self::new(out)
    }

    /// `∫₀¹ p` from the moments `∫₀¹ t^k = 1/(k+1)`.
    pub fn integral_unit(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c / (k + 1) as f64)
            .sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|x| c * x).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        Self::new(
            (0..len)
                .map(|k| get(&self.coeffs, k) + get(&other.coeffs, k))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Render in the expression grammar over variable `var`. Coefficients are
    /// printed with round-trip precision.
    pub fn to_source(&self, var: char) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            if !s.is_empty() {
                s.push_str(if *c < 0.0 { " - " } else { " + " });
            } else if *c < 0.0 {
                s.push('-');
            }
            let _ = write!(s, "{:?}", c.abs());
            match k {
                0 => {}
                1 => {
                    let _ = write!(s, "*{var}");
                }
                _ => {
                    let _ = write!(s, "*{var}^{k}");
                }
            }
        }
        s
    }

    pub fn to_expression(&self, var: char) -> ExpressionFn {
        ExpressionFn::parse(&self.to_source(var)).expect("polynomial source is well-formed")
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

//! Problem files: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! f = u*(1-exp(-u))   # load, in the variable u
//! a = t^2             # weight of the integral condition, in t
//! theta = 0.25
//! grid_n = 800
//! quad_panels = 200
//! tol = 1e-10
//! max_iter = 500
//! u0 = constant 1
//! ```
//!
//! `f` and `a` are required; the other keys default to the values above
//! (`u0` defaults to `zero`).

use std::path::Path;
use std::str::FromStr;

use fourbvp_core::collocation::MIN_COLLOCATION_N;
use fourbvp_core::{
    ExpressionFn, InitialGuess, KernelContext, QuadratureSettings, Rule, SolveConfig, DEFAULT_THETA,
};

use crate::exit::CliError;

pub const KEYS: [&str; 8] = [
    "f",
    "a",
    "theta",
    "grid_n",
    "quad_panels",
    "tol",
    "max_iter",
    "u0",
];

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub f: ExpressionFn,
    pub a: ExpressionFn,
    pub theta: f64,
    pub grid_n: usize,
    pub quad_panels: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub u0: InitialGuess,
}

fn parse_number<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::parse(format!("line {line}: invalid value '{value}' for {key}")))
}

fn parse_expression(
    key: &str,
    value: &str,
    var: char,
    line: usize,
) -> Result<ExpressionFn, CliError> {
    let e = ExpressionFn::parse(value)
        .map_err(|err| CliError::parse(format!("line {line}: {key} = {value}: {err}")))?;
    if e.variable() != var && !e.is_constant() {
        return Err(CliError::parse(format!(
            "line {line}: {key} must be an expression in {var}, got '{value}'"
        )));
    }
    Ok(e)
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut f = None;
        let mut a = None;
        let mut theta = DEFAULT_THETA;
        let mut grid_n = 800;
        let mut quad_panels = 200;
        let mut tol = 1e-10;
        let mut max_iter = 500;
        let mut u0 = InitialGuess::Zero;
        let mut seen: Vec<&str> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| CliError::parse(format!("line {line}: expected key = value")))?;
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(CliError::parse(format!(
                    "line {line}: unknown key '{key}' (known: {})",
                    KEYS.join(", ")
                )));
            };
            if seen.contains(&known) {
                return Err(CliError::parse(format!(
                    "line {line}: duplicate key '{key}'"
                )));
            }
            seen.push(known);
            if value.is_empty() {
                return Err(CliError::parse(format!(
                    "line {line}: empty value for {key}"
                )));
            }
            match known {
                "f" => f = Some(parse_expression(key, value, 'u', line)?),
                "a" => a = Some(parse_expression(key, value, 't', line)?),
                "theta" => theta = parse_number(key, value, line)?,
                "grid_n" => grid_n = parse_number(key, value, line)?,
                "quad_panels" => quad_panels = parse_number(key, value, line)?,
                "tol" => tol = parse_number(key, value, line)?,
                "max_iter" => max_iter = parse_number(key, value, line)?,
                "u0" => {
                    u0 = InitialGuess::parse(value)
                        .map_err(|e| CliError::parse(format!("line {line}: {e}")))?
                }
                _ => unreachable!(),
            }
        }

        let problem = Self {
            f: f.ok_or_else(|| CliError::parse("missing required key 'f'"))?,
            a: a.ok_or_else(|| CliError::parse("missing required key 'a'"))?,
            theta,
            grid_n,
            quad_panels,
            tol,
            max_iter,
            u0,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
            .map_err(|e| CliError::new(e.status, format!("{}: {}", path.display(), e.message)))
    }

    /// Range checks that do not need the expressions.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.theta > 0.0 && self.theta < 0.5) {
            return Err(CliError::parse(format!(
                "theta = {} must lie in (0, 1/2)",
                self.theta
            )));
        }
        if self.grid_n < MIN_COLLOCATION_N || !self.grid_n.is_multiple_of(2) {
            return Err(CliError::parse(format!(
                "grid_n = {} must be even and at least {MIN_COLLOCATION_N}",
                self.grid_n
            )));
        }
        if self.quad_panels == 0 {
            return Err(CliError::parse("quad_panels must be positive"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::parse(format!(
                "tol = {} must be positive",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(CliError::parse("max_iter must be positive"));
        }
        self.u0.materialize(self.grid_n).map_err(CliError::from)?;
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureSettings {
        QuadratureSettings {
            rule: Rule::Simpson,
            panels: self.quad_panels,
        }
    }

    /// Builds the kernel context; (H2) violations surface here.
    pub fn context(&self) -> Result<KernelContext, CliError> {
        Ok(KernelContext::new(
            self.a.clone(),
            self.theta,
            self.quadrature(),
        )?)
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            n: self.grid_n,
            tol: self.tol,
            max_iter: self.max_iter,
            relaxation: 1.0,
            u0: self.u0.clone(),
        }
    }
}

//! Grid checks of the kernel inequalities and random cone checks for the
//! linear solution operator.

use fourbvp_core::{
    cone_ratio, g_weight, green, ExpressionFn, GridFunction, KernelContext, KernelMatrix,
    Polynomial, QuadratureSettings,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exit::{CliError, ExitStatus};
use crate::format::{pass_fail, short, Block};

pub const DEFAULT_THETAS: [f64; 3] = [0.1, 0.25, 0.4];
pub const DEFAULT_GRID: usize = 201;
/// Weight used for the cone checks.
pub const CONE_WEIGHT: &str = "t^2";
pub const CONE_SAMPLES: usize = 20;
pub const CONE_GRID_N: usize = 400;
const SEED: u64 = 0x5eed_2026;

/// Tolerances of the grid checks.
pub const NONNEG_TOL: f64 = 1e-14;
pub const BOUND_TOL: f64 = 1e-12;
pub const IDENTITY_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub thetas: Vec<f64>,
    pub grid: usize,
    /// Test hook: evaluate `-G` instead of `G`.
    pub corrupt_kernel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            thetas: DEFAULT_THETAS.to_vec(),
            grid: DEFAULT_GRID,
            corrupt_kernel: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub status: ExitStatus,
    pub report: String,
    /// Largest amount by which a kernel inequality is violated (0 when all hold exactly).
    pub max_bound_violation: f64,
}

/// Largest (signed) violation and where it happened; negative when the
/// inequality holds everywhere with room to spare.
#[derive(Debug, Clone, Copy)]
struct Worst {
    amount: f64,
    t: f64,
    s: f64,
}

impl Worst {
    fn new() -> Self {
        Self {
            amount: f64::NEG_INFINITY,
            t: f64::NAN,
            s: f64::NAN,
        }
    }

    fn record(&mut self, amount: f64, t: f64, s: f64) {
        if amount > self.amount {
            *self = Self { amount, t, s };
        }
    }

    fn location(&self) -> String {
        format!("(t, s) = ({}, {})", self.t, self.s)
    }
}

fn random_load(rng: &mut impl Rng) -> Polynomial {
    let degree = rng.gen_range(0..=4);
    let b: Vec<f64> = (0..=degree).map(|_| rng.gen_range(0.0..1.0)).collect();
    Polynomial::from_bernstein(&b)
}

pub fn run(opts: &VerifyOptions) -> Result<VerifyOutcome, CliError> {
    if opts.grid < 2 {
        return Err(CliError::parse("--grid must be at least 2"));
    }
    if opts.thetas.is_empty() {
        return Err(CliError::parse("--theta needs at least one value"));
    }
    for &theta in &opts.thetas {
        if !(theta > 0.0 && theta < 0.5) {
            return Err(CliError::parse(format!(
                "theta = {theta} must lie in (0, 1/2)"
            )));
        }
    }
    let sign = if opts.corrupt_kernel { -1.0 } else { 1.0 };
    let kernel = |t: f64, s: f64| sign * green(t, s).expect("grid points lie in [0, 1]");
    let weight = |s: f64| g_weight(s).expect("grid points lie in [0, 1]");
    let m = opts.grid;
    let node = |i: usize| i as f64 / (m - 1) as f64;

    let mut ok = true;
    let mut out = Block::new("verify-lemmas");
    out.field("kernel grid", format!("{m} x {m}"));
    if opts.corrupt_kernel {
        out.field("kernel", "CORRUPTED (sign flipped, test hook)");
    }

    let mut neg = Worst::new();
    let mut min_g = f64::INFINITY;
    for i in 0..m {
        for j in 0..m {
            let v = kernel(node(i), node(j));
            min_g = min_g.min(v);
            neg.record(-v - NONNEG_TOL, node(i), node(j));
        }
    }
    let nonneg_ok = neg.amount <= 0.0;
    ok &= nonneg_ok;
    out.heading("nonnegativity: G(t, s) >= 0");
    out.field("min G", short(min_g));
    out.field("tolerance", short(NONNEG_TOL));
    out.field("tightest point", neg.location());
    out.field("result", pass_fail(nonneg_ok));

    let mut ident = Worst::new();
    let mut max_diff = 0.0f64;
    for j in 0..m {
        let d = (kernel(1.0, node(j)) - weight(node(j))).abs();
        max_diff = max_diff.max(d);
        ident.record(d - IDENTITY_TOL, 1.0, node(j));
    }
    let ident_ok = ident.amount <= 0.0;
    ok &= ident_ok;
    out.heading("boundary identity: G(1, s) = g(s)");
    out.field("max |G(1, s) - g(s)|", short(max_diff));
    out.field("tolerance", short(IDENTITY_TOL));
    out.field("tightest point", ident.location());
    out.field("result", pass_fail(ident_ok));

    let a = ExpressionFn::parse(CONE_WEIGHT).expect("valid weight");
    let mut max_bound_violation = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for &theta in &opts.thetas {
        let c = theta.powi(3);
        let mut worst = Worst::new();
        for i in 0..m {
            let t = node(i);
            if t < theta || t > 1.0 - theta {
                continue;
            }
            for j in 0..m {
                let s = node(j);
                let (gv, gs) = (kernel(t, s), weight(s));
                worst.record((c * gs - gv).max(gv - gs), t, s);
            }
        }
        max_bound_violation = max_bound_violation.max(worst.amount.max(0.0));
        let bound_ok = worst.amount <= BOUND_TOL;
        ok &= bound_ok;
        out.heading(&format!("two-sided bound, theta = {theta}"));
        out.field(
            "inequality",
            "theta^3 g(s) <= G(t, s) <= g(s) on [theta, 1-theta]",
        );
        out.field("max violation (signed)", short(worst.amount));
        out.field("tolerance", short(BOUND_TOL));
        out.field(
            "tightest point",
            format!("(t, s, theta) = ({}, {}, {theta})", worst.t, worst.s),
        );
        out.field("result", pass_fail(bound_ok));

        let ctx = KernelContext::new(a.clone(), theta, QuadratureSettings::default())?;
        let km = KernelMatrix::assemble(&ctx, CONE_GRID_N)?;
        let mut passed = 0;
        let mut min_margin = f64::INFINITY;
        let mut failures = Vec::new();
        for k in 0..CONE_SAMPLES {
            let y = random_load(&mut rng);
            let u = km.solve(&GridFunction::from_fn(CONE_GRID_N, |t| y.eval(t)))?;
            let cone = cone_ratio(&u, &ctx);
            min_margin = min_margin.min(cone.ratio.unwrap_or(f64::INFINITY) - cone.threshold);
            if cone.satisfied && u.is_nonneg() {
                passed += 1;
            } else {
                failures.push(format!("sample {k}: y = {}", y.to_source('t')));
            }
        }
        ok &= failures.is_empty();
        out.heading(&format!("cone check, theta = {theta}"));
        out.field("weight a", CONE_WEIGHT);
        out.field(
            "threshold theta^3 (1-alpha+beta)",
            short(ctx.cone_constant()),
        );
        out.field("samples passed", format!("{passed}/{CONE_SAMPLES}"));
        out.field("min (ratio - threshold)", short(min_margin));
        for f in &failures {
            out.line(&format!("  failed {f}"));
        }
        out.field("result", pass_fail(failures.is_empty()));
    }

    let status = if ok {
        ExitStatus::Ok
    } else {
        ExitStatus::LemmaViolation
    };
    out.heading("verdict");
    out.field("status", status);
    Ok(VerifyOutcome {
        status,
        report: out.finish(),
        max_bound_violation,
    })
}

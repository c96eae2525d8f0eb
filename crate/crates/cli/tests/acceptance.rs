//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::time::Instant;

use fourbvp_cli::commands::{solve, verify};
use fourbvp_cli::fixtures::{EXAMPLE_ONE, EXAMPLE_TWO};
use fourbvp_cli::ProblemFile;
use fourbvp_core::hypothesis::{Thm31, Thm32};
use fourbvp_core::solver::norm_bound;
use fourbvp_core::{
    analyze, certify_thm31, certify_thm32, collocation_oracle, cone_ratio, g_weight, green,
    integrate, norm_bound_check, picard_solve, residual_ode, solve_linear, ExpressionFn,
    GridFunction, KernelContext, KernelMatrix, Polynomial, QuadratureSettings, SolveConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn expr(src: &str) -> ExpressionFn {
    ExpressionFn::parse(src).expect("valid expression")
}

fn ctx(a: &str, theta: f64) -> KernelContext {
    KernelContext::new(expr(a), theta, QuadratureSettings::default()).expect("valid context")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn grid_nodes() -> impl Iterator<Item = f64> + Clone {
    (0..201).map(|i| i as f64 / 200.0)
}

fn c1_nonnegativity() -> Outcome {
    let min = grid_nodes()
        .flat_map(|t| grid_nodes().map(move |s| green(t, s).unwrap()))
        .fold(f64::INFINITY, f64::min);
    check(min >= -1e-14, format!("min G = {min:e}"))
}

fn c2_two_sided_bound() -> Outcome {
    let out = verify::run(&verify::VerifyOptions::default()).map_err(|e| e.to_string())?;
    let mut worst = f64::NEG_INFINITY;
    for theta in [0.1, 0.25, 0.4] {
        for t in grid_nodes().filter(|t| *t >= theta && *t <= 1.0 - theta) {
            for s in grid_nodes() {
                let (gv, gs) = (green(t, s).unwrap(), g_weight(s).unwrap());
                worst = worst.max(theta.powi(3) * gs - gv).max(gv - gs);
            }
        }
    }
    check(
        worst <= 1e-12 && out.max_bound_violation < 1e-12 && out.status.is_ok(),
        format!(
            "max signed violation {worst:e}; verify-lemmas exit {}",
            out.status.code()
        ),
    )
}

fn c3_boundary_identity() -> Outcome {
    let max = grid_nodes()
        .map(|s| (green(1.0, s).unwrap() - g_weight(s).unwrap()).abs())
        .fold(0.0, f64::max);
    check(max < 1e-14, format!("max |G(1,s) - g(s)| = {max:e}"))
}

fn c4_linear_oracle() -> Outcome {
    let n = 2000;
    let u = solve_linear(&GridFunction::constant(n, 1.0), &ctx("t^2", 0.25))
        .map_err(|e| e.to_string())?;
    let exact = |t: f64| -t.powi(4) / 24.0 + t.powi(3) / 18.0 + 5.0 / 1008.0;
    let err = (0..=n)
        .map(|i| (u.values()[i] - exact(u.t(i))).abs())
        .fold(0.0, f64::max);
    let e0 = (u.values()[0] - 5.0 / 1008.0).abs();
    let e1 = (u.values()[n] - 19.0 / 1008.0).abs();
    check(
        err < 1e-8 && e0 < 1e-8 && e1 < 1e-8,
        format!("sup error {err:e}, |u(0) - 5/1008| = {e0:e}, |u(1) - 19/1008| = {e1:e}"),
    )
}

fn random_nonneg_poly(rng: &mut impl Rng) -> Polynomial {
    let degree = rng.gen_range(0..=4);
    let b: Vec<f64> = (0..=degree).map(|_| rng.gen_range(0.0..1.0)).collect();
    Polynomial::from_bernstein(&b)
}

fn c5_cone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let loads: Vec<Polynomial> = (0..20).map(|_| random_nonneg_poly(&mut rng)).collect();
    let n = 400;
    let mut passed = 0;
    let mut min_margin = f64::INFINITY;
    for theta in [0.1, 0.25, 0.4] {
        let c = ctx("t^2", theta);
        let km = KernelMatrix::assemble(&c, n).map_err(|e| e.to_string())?;
        for y in &loads {
            let u = km
                .solve(&GridFunction::from_fn(n, |t| y.eval(t)))
                .map_err(|e| e.to_string())?;
            let cone = cone_ratio(&u, &c);
            min_margin = min_margin.min(cone.ratio.unwrap_or(f64::INFINITY) - cone.threshold);
            passed += usize::from(cone.satisfied);
        }
    }
    check(
        passed == 60,
        format!("{passed}/60 satisfied, min ratio - threshold {min_margin:e}"),
    )
}

fn c6_norm_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let c = ctx("t^2", 0.25);
    let n = 400;
    let km = KernelMatrix::assemble(&c, n).map_err(|e| e.to_string())?;
    let loads = ["u", "u^2", "1", "1+u"].map(expr);
    let mut held = 0;
    let mut min_gap = f64::INFINITY;
    for k in 0..20 {
        let p = random_nonneg_poly(&mut rng);
        let amp = rng.gen_range(0.0..3.0);
        let u = GridFunction::from_fn(n, |t| amp * p.eval(t));
        let r = norm_bound_check(&u, &loads[k % 4], &km).map_err(|e| e.to_string())?;
        min_gap = min_gap.min(r.bound - r.norm_au);
        held += usize::from(r.holds);
    }
    check(
        held == 20,
        format!("{held}/20 hold, min (bound - ||Au||) {min_gap:e}"),
    )
}

fn c7_cross_oracle() -> Outcome {
    let c = ctx("t^2", 0.25);
    let f = expr("1+u");
    let config = SolveConfig::default();
    let picard = picard_solve(&f, &c, &config).map_err(|e| e.to_string())?;
    let colloc = collocation_oracle(&f, &c, &config).map_err(|e| e.to_string())?;
    let diff = picard.solution.distance(&colloc.solution);
    let rp = &picard.residual_ode;
    let rc = residual_ode(&colloc.solution, &f, &c).map_err(|e| e.to_string())?;
    check(
        picard.converged() && colloc.converged && diff < 1e-6 && rp.passes() && rc.passes(),
        format!(
            "n = {}, sup diff {diff:e}; picard ODE {:e}/{:e} bc {:e}; collocation ODE {:e}/{:e} bc {:e}",
            config.n, rp.interior, rp.interior_tol, rp.bc, rc.interior, rc.interior_tol, rc.bc
        ),
    )
}

fn example(text: &str) -> (ProblemFile, KernelContext) {
    let p = ProblemFile::parse(text).expect("bundled example parses");
    let c = p.context().expect("bundled example is admissible");
    (p, c)
}

fn c8_example_one_analysis() -> Outcome {
    let (p, c) = example(EXAMPLE_ONE);
    let r = analyze(&p.f, &c).map_err(|e| e.to_string())?;
    let f0 = r.f0.value.finite().unwrap_or(f64::INFINITY);
    let finf = r.finf.value.finite().unwrap_or(f64::INFINITY);
    let Thm31::Applicable { epsilon, rho1 } = certify_thm31(&p.f, &c).map_err(|e| e.to_string())?
    else {
        return Err("criterion f0 = 0 not certified".into());
    };
    let de = (epsilon - 2.0 / 3.0).abs();
    let dr = (rho1 - 3f64.ln()).abs();
    check(
        r.f0.is_zero() && f0.abs() < 1e-4 && (finf - 1.0).abs() < 1e-3 && de <= 1e-15 && dr < 1e-6,
        format!("f0 {f0:e}, f_inf {finf}, |eps - 2/3| = {de:e}, |rho1 - ln 3| = {dr:e}"),
    )
}

fn c9_example_two_analysis() -> Outcome {
    let (p, c) = example(EXAMPLE_TWO);
    let r = analyze(&p.f, &c).map_err(|e| e.to_string())?;
    let f0 = r.f0.value.finite().unwrap_or(f64::INFINITY);
    let finf = r.finf.value.finite().unwrap_or(f64::INFINITY);
    let Thm32::Bounded { l } = certify_thm32(&p.f, &c).map_err(|e| e.to_string())? else {
        return Err("criterion f_inf = 0 not certified in the bounded case".into());
    };
    check(
        r.finf.is_zero() && finf.abs() < 1e-4 && (f0 - 1.0).abs() < 1e-3 && (l - 1.0).abs() <= 1e-6,
        format!("f_inf {finf:e}, f0 {f0}, L = {l:.17}"),
    )
}

fn c10_example_solves() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (name, text) in [("one", EXAMPLE_ONE), ("two", EXAMPLE_TWO)] {
        let (p, c) = example(text);
        let r = picard_solve(&p.f, &c, &p.solve_config()).map_err(|e| e.to_string())?;
        let norm = r.solution.sup_norm();
        let last = r.delta_trace.last().copied().unwrap_or(f64::INFINITY);
        ok &= r.converged() && r.iterations <= 500 && last < 1e-10 && norm < 1e-8 && r.trivial;
        let u0 = p.u0.materialize(p.grid_n).map_err(|e| e.to_string())?;
        let printed = norm_bound(&u0, &p.f, &c).map_err(|e| e.to_string())?;
        if name == "one" {
            ok &= printed <= r.initial_norm / 48.0 && r.initial_norm_bound == printed;
        }
        details.push(format!(
            "example {name}: {} iterations, ||u|| {norm:e}, bound at u0 {printed:.6e} (||u0||/48 = {:.6e})",
            r.iterations,
            r.initial_norm / 48.0
        ));
    }
    check(ok, details.join("; "))
}

fn c11_grid_consistency() -> Outcome {
    let base = ProblemFile::parse("f = 1+u\na = t^2\n").expect("valid problem");
    let run = |n| {
        let mut p = base.clone();
        p.grid_n = n;
        solve::run(&p, &solve::SolveOptions::default())
    };
    let coarse = run(200).map_err(|e| e.to_string())?;
    let fine = run(1600).map_err(|e| e.to_string())?;
    let (Some(a), Some(b)) = (&coarse.picard, &fine.picard) else {
        return Err("solve did not run".into());
    };
    let d = a.solution.distance(&b.solution);
    check(
        d < 1e-6 && coarse.status.is_ok() && fine.status.is_ok(),
        format!(
            "sup diff {d:e} (exit codes {}, {})",
            coarse.status.code(),
            fine.status.code()
        ),
    )
}

fn c12_quadrature() -> Outcome {
    let q = QuadratureSettings::default();
    let s2 = integrate(|s| s * s, 0.0, 1.0, &q).map_err(|e| e.to_string())?;
    let g = integrate(|s| g_weight(s).unwrap(), 0.0, 1.0, &q).map_err(|e| e.to_string())?;
    let beta = ctx("t^2", 0.25).beta();
    let errs = [
        (s2 - 1.0 / 3.0).abs(),
        (g - 1.0 / 72.0).abs(),
        (beta - 13.0 / 96.0).abs(),
    ];
    check(
        errs.iter().all(|e| *e < 1e-12),
        format!(
            "errors: int s^2 {:e}, int g {:e}, beta {:e}",
            errs[0], errs[1], errs[2]
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("kernel nonnegativity", c1_nonnegativity),
        ("kernel two-sided bound", c2_two_sided_bound),
        ("boundary identity G(1,s) = g(s)", c3_boundary_identity),
        ("linear oracle, n = 2000", c4_linear_oracle),
        ("cone inequality, 60 cases", c5_cone),
        ("a-priori operator bound, 20 cases", c6_norm_bound),
        ("picard vs collocation, f = 1+u", c7_cross_oracle),
        ("example one analysis", c8_example_one_analysis),
        ("example two analysis", c9_example_two_analysis),
        ("example solves from u0 = 1", c10_example_solves),
        ("grid self-consistency 200 vs 1600", c11_grid_consistency),
        ("quadrature reference values", c12_quadrature),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.2}s]: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.2}s]: {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

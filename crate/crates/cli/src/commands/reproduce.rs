//! Analysis and solve for the bundled example problems, side by side.

use fourbvp_core::hypothesis::LimitEstimate;

use crate::commands::{analyze, solve};
use crate::exit::{CliError, ExitStatus};
use crate::fixtures::EXAMPLES;
use crate::format::{full, short, yes_no, Block};
use crate::problem::ProblemFile;

#[derive(Debug, Clone, Default)]
pub struct ReproduceOptions {
    pub theta: Option<f64>,
    pub grid: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ExampleRun {
    pub name: &'static str,
    pub problem: ProblemFile,
    pub analysis: analyze::AnalyzeOutcome,
    pub solve: solve::SolveOutcome,
    /// Limits agree with the known values (`f₀`, `f∞` ∈ {0, 1}).
    pub limits_match: bool,
}

#[derive(Debug, Clone)]
pub struct ReproduceOutcome {
    pub status: ExitStatus,
    pub report: String,
    pub runs: Vec<ExampleRun>,
}

/// Known limits `(f₀, f∞)` of the bundled examples.
fn expected_limits(name: &str) -> (f64, f64) {
    match name {
        "example-one" => (0.0, 1.0),
        "example-two" => (1.0, 0.0),
        _ => unreachable!("unknown example {name}"),
    }
}

fn matches(e: &LimitEstimate, expected: f64) -> bool {
    if expected == 0.0 {
        e.is_zero()
    } else {
        e.value
            .finite()
            .is_some_and(|v| (v - expected).abs() < 1e-3)
    }
}

pub fn load_example(text: &str, opts: &ReproduceOptions) -> Result<ProblemFile, CliError> {
    let mut p = ProblemFile::parse(text)?;
    if let Some(theta) = opts.theta {
        p.theta = theta;
    }
    if let Some(n) = opts.grid {
        p.grid_n = n;
    }
    p.validate()?;
    Ok(p)
}

pub fn run(opts: &ReproduceOptions) -> Result<ReproduceOutcome, CliError> {
    let mut runs = Vec::new();
    let mut status = ExitStatus::Ok;
    let mut report = String::new();
    for (name, text) in EXAMPLES {
        let problem = load_example(text, opts)?;
        let analysis = analyze::run(&problem)?;
        let solved = solve::run(&problem, &solve::SolveOptions::default())?;
        status = status.then(analysis.status).then(solved.status);
        let (e0, einf) = expected_limits(name);
        let limits_match = analysis
            .hypotheses
            .as_ref()
            .is_some_and(|h| matches(&h.f0, e0) && matches(&h.finf, einf));
        report.push_str(&format!("#### {name}\n\n"));
        report.push_str(&analysis.report);
        report.push('\n');
        report.push_str(&solved.summary);
        report.push('\n');
        runs.push(ExampleRun {
            name,
            problem,
            analysis,
            solve: solved,
            limits_match,
        });
    }

    let mut out = Block::new("examples: existence criteria vs computed fixed points");
    for run in &runs {
        out.heading(run.name);
        out.field("f(u)", run.problem.f.source());
        out.field(
            "theta, grid_n",
            format!("{}, {}", run.problem.theta, run.problem.grid_n),
        );
        if let Some(h) = &run.analysis.hypotheses {
            out.field("f0 estimate", h.f0.value);
            out.field("f_inf estimate", h.finf.value);
            out.field("limits as expected", yes_no(run.limits_match));
            out.field("criterion f0 = 0 applies", yes_no(h.thm31_applicable()));
            out.field("criterion f_inf = 0 applies", yes_no(h.thm32_applicable()));
            out.field("classical superlinear", yes_no(h.superlinear()));
            out.field("classical sublinear", yes_no(h.sublinear()));
        }
        if let Some(p) = &run.solve.picard {
            out.field("solve status", p.status);
            out.field("iterations", p.iterations);
            out.field("||u||", full(p.solution.sup_norm()));
            out.field("trivial", yes_no(p.trivial));
            out.field("bound at u0", full(p.initial_norm_bound));
            out.field("||u0|| / 48", full(p.initial_norm / 48.0));
            out.field("bound at u", short(p.norm_bound));
        }
    }
    out.heading("verdict");
    out.field("status", status);
    report.push_str("#### summary\n\n");
    report.push_str(&out.finish());
    Ok(ReproduceOutcome {
        status,
        report,
        runs,
    })
}

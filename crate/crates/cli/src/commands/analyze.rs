//! Standing hypotheses, growth limits and existence certificates for one
//! problem file.

use fourbvp_core::hypothesis::{LimitEstimate, LimitValue, StandingHypotheses, Thm31, Thm32};
use fourbvp_core::{analyze, check_h1_h2, HypothesisReport};

use crate::exit::{CliError, ExitStatus};
use crate::format::{full, short, yes_no, Block};
use crate::problem::ProblemFile;

#[derive(Debug, Clone)]
pub struct AnalyzeOutcome {
    pub status: ExitStatus,
    pub report: String,
    pub standing: StandingHypotheses,
    pub hypotheses: Option<HypothesisReport>,
}

pub(crate) fn standing_fields(out: &mut Block, standing: &StandingHypotheses) {
    out.field(
        "(H1) f >= 0 on [0, 1e6]",
        match &standing.h1_detail {
            None => "pass".to_string(),
            Some(d) => format!("FAIL: {d}"),
        },
    );
    out.field(
        "(H2) a >= 0, 0 < alpha < 1",
        match &standing.h2_detail {
            None => "pass".to_string(),
            Some(d) => format!("FAIL: {d}"),
        },
    );
}

fn limit_text(e: &LimitEstimate) -> String {
    let value = match e.value {
        LimitValue::Finite(v) => full(v),
        LimitValue::Divergent => "divergent".into(),
    };
    format!("{value} (converged: {})", yes_no(e.converged))
}

fn schedule_text(e: &LimitEstimate) -> String {
    e.schedule
        .iter()
        .map(|(u, r)| format!("{u:.0e}:{}", short(*r)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn run(problem: &ProblemFile) -> Result<AnalyzeOutcome, CliError> {
    let mut out = Block::new("analyze");
    out.field("f(u)", problem.f.source());
    out.field("a(t)", problem.a.source());
    out.field("theta", problem.theta);

    let standing = check_h1_h2(&problem.f, &problem.a);
    standing_fields(&mut out, &standing);
    if !(standing.h1 && standing.h2) {
        out.heading("verdict");
        out.field("status", ExitStatus::HypothesisViolation);
        return Ok(AnalyzeOutcome {
            status: ExitStatus::HypothesisViolation,
            report: out.finish(),
            standing,
            hypotheses: None,
        });
    }
    let ctx = problem.context()?;
    let report = analyze(&problem.f, &ctx)?;
    out.field("alpha = int a", full(report.alpha));
    out.field("beta = int_theta^(1-theta) a", full(report.beta));

    out.heading("growth limits of f(u)/u");
    out.field("f0   (u -> 0+)", limit_text(&report.f0));
    out.field("  schedule u:f(u)/u", schedule_text(&report.f0));
    out.field("  f0 = 0", yes_no(report.f0.is_zero()));
    out.field("f_inf (u -> inf)", limit_text(&report.finf));
    out.field("  schedule u:f(u)/u", schedule_text(&report.finf));
    out.field("  f_inf = 0", yes_no(report.finf.is_zero()));

    out.heading("existence criterion f0 = 0");
    match &report.thm31 {
        Thm31::Applicable { epsilon, rho1 } => {
            out.field("applies", "yes");
            out.field("epsilon = 1 - alpha", full(*epsilon));
            out.field("rho1 (f(u) <= epsilon u below it)", full(*rho1));
        }
        Thm31::NotApplicable { reason } => {
            out.field("applies", "no");
            out.field("reason", reason);
        }
    }

    out.heading("existence criterion f_inf = 0");
    match &report.thm32 {
        Thm32::Bounded { l } => {
            out.field("applies", "yes (f bounded)");
            out.field("L (sup f, inflated by 1e-6)", full(*l));
        }
        Thm32::Unbounded {
            eta,
            rho2,
            sigma,
            rho_hat2,
        } => {
            out.field("applies", "yes (f unbounded)");
            out.field("eta = 1 - alpha", full(*eta));
            out.field("rho2 (f(u) <= eta u above it)", full(*rho2));
            out.field("sigma (f <= eta sigma on [0, rho2])", full(*sigma));
            out.field("rho_hat2 = max(sigma, rho2)", full(*rho_hat2));
        }
        Thm32::NotApplicable { reason } => {
            out.field("applies", "no");
            out.field("reason", reason);
        }
    }

    out.heading("classical conditions, for comparison");
    out.field(
        "superlinear (f0 = 0, f_inf = inf)",
        yes_no(report.superlinear()),
    );
    out.field(
        "sublinear (f0 = inf, f_inf = 0)",
        yes_no(report.sublinear()),
    );

    out.heading("verdict");
    out.field("status", ExitStatus::Ok);
    Ok(AnalyzeOutcome {
        status: ExitStatus::Ok,
        report: out.finish(),
        standing,
        hypotheses: Some(report),
    })
}

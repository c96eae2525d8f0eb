use fourbvp_cli::commands::{analyze, reproduce, solve, verify};
use fourbvp_cli::{ExitStatus, ProblemFile};

#[test]
fn reproduce_grid_refinement() {
    let run = |n| {
        reproduce::run(&reproduce::ReproduceOptions {
            theta: None,
            grid: Some(n),
        })
        .unwrap()
    };
    let (coarse, fine) = (run(200), run(1600));
    assert_eq!(coarse.status, ExitStatus::Ok);
    assert_eq!(fine.status, ExitStatus::Ok);
    for (c, f) in coarse.runs.iter().zip(&fine.runs) {
        assert!(c.limits_match && f.limits_match);
        let (pc, pf) = (
            c.solve.picard.as_ref().unwrap(),
            f.solve.picard.as_ref().unwrap(),
        );
        assert!(pc.trivial && pf.trivial);
        assert!(pc.solution.distance(&pf.solution) < 1e-6);
        assert!(c.solve.summary.contains("bound at u0"));
    }
}

#[test]
fn affine_load_cross_check() {
    let p = ProblemFile::parse("f = 1+u\na = t^2\n").unwrap();
    let out = solve::run(&p, &solve::SolveOptions::default()).unwrap();
    assert_eq!(out.status, ExitStatus::Ok);
    assert!(!out.picard.as_ref().unwrap().trivial);
    assert!(out.agreement.unwrap() < 1e-6);
    assert_eq!(out.csv.unwrap().lines().count(), 802);
}

#[test]
fn analyze_reports_structured_results() {
    let p = ProblemFile::parse("f = u^2\na = t^2\n").unwrap();
    let out = analyze::run(&p).unwrap();
    let h = out.hypotheses.unwrap();
    assert!(h.thm31_applicable());
    assert!(!h.thm32_applicable());
    assert!(h.superlinear());
}

#[test]
fn verify_reports_offending_triple() {
    let out = verify::run(&verify::VerifyOptions {
        corrupt_kernel: true,
        ..Default::default()
    })
    .unwrap();
    assert_eq!(out.status, ExitStatus::LemmaViolation);
    assert!(out.max_bound_violation > 0.0);
    assert!(verify::run(&verify::VerifyOptions {
        grid: 1,
        ..Default::default()
    })
    .is_err());
}

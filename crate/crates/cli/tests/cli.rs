use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fourbvp"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find(|l| l.starts_with(key))
        .map(|l| l[key.len()..].trim())
        .unwrap_or_else(|| panic!("no field '{key}' in\n{report}"))
}

fn write_problem(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn verify_lemmas_default_passes() {
    let o = run(&["verify-lemmas"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn verify_lemmas_near_half() {
    let o = run(&["verify-lemmas", "--theta", "0.49", "--grid", "401"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn corrupted_kernel_is_detected() {
    let o = run(&["verify-lemmas", "--corrupt-kernel"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL"));
    assert!(out.contains("(t, s) = ("), "{out}");
    assert!(out.contains("(t, s, theta) = ("), "{out}");
}

#[test]
fn unit_load_solve() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("u.csv");
    let plot = dir.path().join("plot.csv");
    let o = bin()
        .arg("solve")
        .arg(fixture("unit_load.problem"))
        .arg("--csv")
        .arg(&csv)
        .arg("--plot-data")
        .arg(&plot)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let summary = stdout(&o);
    let u0: f64 = field(&summary, "u(0)").parse().unwrap();
    let u1: f64 = field(&summary, "u(1)").parse().unwrap();
    assert!((u0 - 5.0 / 1008.0).abs() < 1e-8);
    assert!((u1 - 19.0 / 1008.0).abs() < 1e-8);

    let table = std::fs::read_to_string(&csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("t,u,Au,fourth_diff_residual"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 801);
    assert!(rows.iter().all(|r| r.len() == 4));
    assert_eq!(rows[0][1], u0);
    // 17 significant digits.
    let first_u = table.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    assert_eq!(
        first_u
            .split('e')
            .next()
            .unwrap()
            .replace(['.', '-'], "")
            .len(),
        17
    );

    let plot = std::fs::read_to_string(&plot).unwrap();
    assert!(plot.starts_with("t,u\n"));
    assert_eq!(plot.lines().count(), 802);
}

#[test]
fn csv_on_stdout_is_deterministic() {
    let a = run(&["solve", fixture("affine_load.problem").to_str().unwrap()]);
    let b = run(&["solve", fixture("affine_load.problem").to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("t,u,Au,fourth_diff_residual\n"));
    let summary = stderr(&a);
    assert_eq!(field(&summary, "trivial (||u|| < 1e-8)"), "no");
    assert_eq!(field(&summary, "agreement (< 1e-6)"), "yes");
}

#[test]
fn example_one_contracts_to_zero() {
    let o = run(&["solve", fixture("example_one.problem").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let summary = stderr(&o);
    assert_eq!(field(&summary, "trivial (||u|| < 1e-8)"), "yes");
    let norm: f64 = field(&summary, "||u||").parse().unwrap();
    assert!(norm < 1e-8);
    assert!(summary.contains("note on the trivial fixed point"));
}

#[test]
fn u0_flag_overrides_file() {
    let o = run(&[
        "solve",
        fixture("example_one.problem").to_str().unwrap(),
        "--u0",
        "zero",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stderr(&o), "u0"), "zero");
    let bad = run(&[
        "solve",
        fixture("example_one.problem").to_str().unwrap(),
        "--u0",
        "warm",
    ]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn weight_violation_exits_2() {
    let dir = TempDir::new().unwrap();
    let p = write_problem(&dir, "bad.problem", "f = 1\na = 2*t\n");
    let o = run(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let o = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn negative_load_exits_2() {
    let dir = TempDir::new().unwrap();
    let p = write_problem(&dir, "neg.problem", "f = 1 - u\na = t^2\n");
    assert_eq!(
        run(&["analyze", p.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["solve", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn parse_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let p = write_problem(&dir, "broken.problem", "f = u*(1-exp(-u)\na = t^2\n");
    let o = run(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
    assert_eq!(
        run(&["analyze", "/nonexistent.problem"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(
        run(&["verify-lemmas", "--theta", "0.7"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn non_convergence_exits_4_with_report() {
    let dir = TempDir::new().unwrap();
    let p = write_problem(&dir, "slow.problem", "f = 1+u\na = t^2\nmax_iter = 1\n");
    let csv = dir.path().join("slow.csv");
    let o = bin()
        .arg("solve")
        .arg(&p)
        .arg("--csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(field(&stdout(&o), "status"), "max-iterations");
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 802);
}

#[test]
fn analyze_examples() {
    let one = stdout(&run(&[
        "analyze",
        fixture("example_one.problem").to_str().unwrap(),
    ]));
    let applies = |title: &str| {
        let start = one.find(&format!("== {title} ==")).unwrap();
        field(&one[start..], "applies").to_string()
    };
    assert_eq!(applies("existence criterion f0 = 0"), "yes");
    assert_eq!(applies("existence criterion f_inf = 0"), "no");
    assert_eq!(field(&one, "superlinear (f0 = 0, f_inf = inf)"), "no");

    let two = stdout(&run(&[
        "analyze",
        fixture("example_two.problem").to_str().unwrap(),
    ]));
    assert!(two.contains("yes (f bounded)"));
    assert_eq!(field(&two, "sublinear (f0 = inf, f_inf = 0)"), "no");

    let quad = stdout(&run(&[
        "analyze",
        fixture("quadratic.problem").to_str().unwrap(),
    ]));
    assert!(quad.contains("f_inf estimate divergent is not zero"));
    assert_eq!(field(&quad, "superlinear (f0 = 0, f_inf = inf)"), "yes");
}

#[test]
fn reproduce_examples_verdicts_do_not_depend_on_theta() {
    let a = run(&["reproduce-examples"]);
    let b = run(&["reproduce-examples", "--theta", "0.1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let verdicts = |o: &Output| {
        stdout(o)
            .lines()
            .filter(|l| {
                l.starts_with("criterion") || l.starts_with("classical") || l.starts_with("limits")
            })
            .map(String::from)
            .collect::<Vec<_>>()
    };
    assert_eq!(verdicts(&a).len(), 10);
    assert_eq!(verdicts(&a), verdicts(&b));
    assert!(!stdout(&a).contains("limits as expected                 no"));
}

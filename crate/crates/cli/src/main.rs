use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fourbvp_cli::commands::{analyze, reproduce, solve, verify};
use fourbvp_cli::{CliError, ExitStatus, ProblemFile};
use fourbvp_core::InitialGuess;

/// Solve and check u'''' + f(u) = 0, u'(0) = u'(1) = u''(0) = 0, u(0) = ∫ a u.
///
/// Exit codes: 0 ok, 1 lemma violation, 2 hypothesis violation,
/// 3 parse error, 4 solver non-convergence.
#[derive(Parser)]
#[command(name = "fourbvp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the kernel inequalities on a grid and the cone property of the
    /// linear solution operator.
    VerifyLemmas {
        /// Comma-separated cone parameters in (0, 1/2).
        #[arg(long, value_delimiter = ',', default_values_t = verify::DEFAULT_THETAS)]
        theta: Vec<f64>,
        /// Points per axis of the kernel grid.
        #[arg(long, default_value_t = verify::DEFAULT_GRID)]
        grid: usize,
        /// Flip the sign of the kernel (test hook).
        #[arg(long, hide = true)]
        corrupt_kernel: bool,
    },
    /// Solve a problem file. The solution CSV goes to --csv or stdout; the
    /// summary goes to stdout when --csv is given, stderr otherwise.
    Solve {
        file: PathBuf,
        /// Initial guess: `zero`, `constant <c>` or a number.
        #[arg(long)]
        u0: Option<String>,
        /// Write the solution table here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write a (t, u) table for external plotting.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Report standing hypotheses, growth limits and existence criteria.
    Analyze { file: PathBuf },
    /// Analyze and solve the two bundled examples.
    ReproduceExamples {
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
    },
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.display())))
}

fn dispatch(command: Command) -> Result<ExitStatus, CliError> {
    match command {
        Command::VerifyLemmas {
            theta,
            grid,
            corrupt_kernel,
        } => {
            let out = verify::run(&verify::VerifyOptions {
                thetas: theta,
                grid,
                corrupt_kernel,
            })?;
            print!("{}", out.report);
            Ok(out.status)
        }
        Command::Solve {
            file,
            u0,
            csv,
            plot_data,
        } => {
            let problem = ProblemFile::load(&file)?;
            let u0 = u0
                .map(|d| InitialGuess::parse(&d).map_err(|e| CliError::parse(format!("--u0: {e}"))))
                .transpose()?;
            let out = solve::run(&problem, &solve::SolveOptions { u0 })?;
            if let (Some(path), Some(plot)) = (&plot_data, &out.plot) {
                write_file(path, plot)?;
            }
            match (&csv, &out.csv) {
                (Some(path), Some(table)) => {
                    write_file(path, table)?;
                    print!("{}", out.summary);
                }
                (None, Some(table)) => {
                    print!("{table}");
                    eprint!("{}", out.summary);
                }
                (_, None) => eprint!("{}", out.summary),
            }
            Ok(out.status)
        }
        Command::Analyze { file } => {
            let problem = ProblemFile::load(&file)?;
            let out = analyze::run(&problem)?;
            print!("{}", out.report);
            Ok(out.status)
        }
        Command::ReproduceExamples { theta, grid } => {
            let out = reproduce::run(&reproduce::ReproduceOptions { theta, grid })?;
            print!("{}", out.report);
            Ok(out.status)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitStatus::ParseError.code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let status = match dispatch(cli.command) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("{e}");
            e.status
        }
    };
    ExitCode::from(status.code() as u8)
}

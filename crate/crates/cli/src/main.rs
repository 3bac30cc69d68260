use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kgw_cli::fixture::{parse_shape, Fixture, InputError, SUITES};
use kgw_cli::report::{Format, Report};
use kgw_cli::suites::{run_suite, Overrides};
use kgw_core::shape::Shape;

/// Batch verifier for k-graphs, their dynamical systems and groupoids.
///
/// Exit status: 0 when every selected check passes, 1 when a check fails,
/// 2 on I/O, parse or usage errors.
#[derive(Parser, Debug)]
#[command(name = "kgw", version)]
struct Cli {
    /// Seed for every randomised check (overrides the fixture).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Shape bound as a comma list, e.g. `3,3` (overrides the fixture).
    #[arg(long, global = true, value_parser = shape_arg)]
    bound: Option<Shape>,
    /// Include per-check elapsed times (makes output nondeterministic).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

fn shape_arg(s: &str) -> Result<Shape, String> {
    parse_shape(s)
}

#[derive(Args, Debug)]
struct FixtureArg {
    /// Path to a TOML fixture.
    fixture: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the suites listed in the fixture, or those given with --suites.
    Run {
        #[command(flatten)]
        fixture: FixtureArg,
        /// Comma-separated suite list.
        #[arg(long, value_delimiter = ',')]
        suites: Option<Vec<String>>,
    },
    /// Check the factorisation axioms of the fixture's graph.
    Validate(FixtureArg),
    /// Reproduce the domain-condition counterexample on the fixture's system.
    Counterexample(FixtureArg),
    /// Check Toeplitz relations pointwise on the Fock space basis.
    Fock {
        #[command(flatten)]
        fixture: FixtureArg,
        /// Comma-separated relation families (R1, R2, R3, R4, commutation).
        #[arg(long, value_delimiter = ',')]
        relations: Option<Vec<String>>,
        /// Also report the diagonal-algebra growth measurements.
        #[arg(long)]
        diagonal: bool,
    },
    /// Build the semidirect-product groupoid and check its laws.
    Groupoid(FixtureArg),
    /// Check the exact sequence built from the system's ideals.
    Ideals(FixtureArg),
    /// Check the duality constructions on the fixture's graph.
    Duality(FixtureArg),
    /// Verify the amenability skeleton for every coordinate subset.
    Amenability(FixtureArg),
}

fn execute(cli: &Cli) -> Result<Report, InputError> {
    let mut ov = Overrides {
        seed: cli.seed,
        bound: cli.bound.clone(),
        ..Overrides::default()
    };
    let (path, suites): (&PathBuf, Option<Vec<String>>) = match &cli.command {
        Command::Run { fixture, suites } => (&fixture.fixture, suites.clone()),
        Command::Fock {
            fixture,
            relations,
            diagonal,
        } => {
            ov.relations = relations.clone();
            ov.diagonal = *diagonal;
            (&fixture.fixture, Some(vec!["fock".into()]))
        }
        Command::Validate(f) => (&f.fixture, Some(vec!["validate".into()])),
        Command::Counterexample(f) => (&f.fixture, Some(vec!["counterexample".into()])),
        Command::Groupoid(f) => (&f.fixture, Some(vec!["groupoid".into()])),
        Command::Ideals(f) => (&f.fixture, Some(vec!["ideals".into()])),
        Command::Duality(f) => (&f.fixture, Some(vec!["duality".into()])),
        Command::Amenability(f) => (&f.fixture, Some(vec!["amenability".into()])),
    };
    let fixture = Fixture::load(path)?;
    let suites = suites.unwrap_or_else(|| fixture.suites.clone());
    if suites.is_empty() {
        return Err(InputError::Usage(format!(
            "{} selects no suites; list them under `suites` or pass --suites",
            fixture.origin
        )));
    }
    if let Some(bad) = suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(InputError::Usage(format!(
            "unknown suite {bad:?}; expected one of {}",
            SUITES.join(", ")
        )));
    }
    let mut report = Report::default();
    for suite in &suites {
        for check in run_suite(suite, &fixture, &ov)? {
            report.push(check);
        }
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if out
                .write_all(report.render(cli.format, cli.timings).as_bytes())
                .is_err()
            {
                return ExitCode::from(2);
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

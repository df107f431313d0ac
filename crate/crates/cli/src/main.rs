//! `hti`: check files, print normal forms, and run the oracle and property suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hti_core::harness::suites::oracle_pairs;
use hti_core::harness::{run_suite, Suite, SuiteConfig};
use hti_core::oracle::{oracle_check, OraclePair};
use hti_core::{Code, FileReport, Session};

#[derive(Parser)]
#[command(
    name = "hti",
    version,
    about = "A type-checking kernel for homotopy type theory with an interval"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, elaborate and check files in order.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Do not load the prelude first.
        #[arg(long)]
        no_prelude: bool,
    },
    /// Print the normal form of a definition.
    Norm {
        path: PathBuf,
        #[arg(long = "def", value_name = "NAME")]
        def: String,
        #[arg(long)]
        no_prelude: bool,
    },
    /// Compare the file's definitions and generated terms with their normal
    /// forms in the finite-set model.
    Oracle {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        no_prelude: bool,
    },
    /// Run property suites over generated terms.
    Props {
        #[arg(long, default_value = "all", value_parser = parse_suites)]
        suite: SuiteChoice,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Cases per suite instead of each suite's default.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Clone)]
struct SuiteChoice(Vec<Suite>);

fn parse_suites(name: &str) -> Result<SuiteChoice, String> {
    if name == "all" {
        return Ok(SuiteChoice(Suite::ALL.to_vec()));
    }
    Suite::parse(name)
        .map(|s| SuiteChoice(vec![s]))
        .ok_or_else(|| {
            let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            format!(
                "unknown suite `{name}` (expected one of: {}, all)",
                known.join(", ")
            )
        })
}

const TYPE_ERROR: u8 = 1;
const USAGE_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { paths, no_prelude } => check(&paths, no_prelude),
        Command::Norm {
            path,
            def,
            no_prelude,
        } => norm(&path, &def, no_prelude),
        Command::Oracle {
            path,
            count,
            seed,
            no_prelude,
        } => oracle(&path, count, seed, no_prelude),
        Command::Props {
            suite,
            seed,
            count,
            jobs,
        } => props(&suite.0, seed, count, jobs),
    };
    ExitCode::from(code)
}

/// Exit status for a report: IO failures are usage errors, the rest type errors.
fn status(report: &FileReport) -> u8 {
    if report.is_clean() {
        0
    } else if report
        .diagnostics
        .iter()
        .any(|d| d.span.is_none() && d.code == Code::Internal)
    {
        USAGE_ERROR
    } else {
        TYPE_ERROR
    }
}

fn emit(report: &FileReport) -> u8 {
    for line in report.rendered() {
        eprintln!("{line}");
    }
    status(report)
}

fn session(no_prelude: bool) -> Result<Session, u8> {
    if no_prelude {
        return Ok(Session::new());
    }
    Session::with_configured_prelude().map_err(|report| emit(&report))
}

/// Load one file into a fresh session; on failure, the exit status.
fn load(path: &Path, no_prelude: bool) -> Result<(Session, FileReport), u8> {
    let mut session = session(no_prelude)?;
    let report = session.load_file(path);
    match emit(&report) {
        0 => Ok((session, report)),
        code => Err(code),
    }
}

fn check(paths: &[PathBuf], no_prelude: bool) -> u8 {
    let mut session = match session(no_prelude) {
        Ok(s) => s,
        Err(code) => return code,
    };
    paths
        .iter()
        .map(|path| emit(&session.load_file(path)))
        .max()
        .unwrap_or(0)
}

fn norm(path: &Path, def: &str, no_prelude: bool) -> u8 {
    let (session, _) = match load(path, no_prelude) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    match session.normal_form(def) {
        Some(nf) => {
            println!("{nf}");
            0
        }
        None => {
            eprintln!("{}: no definition named `{def}`", path.display());
            TYPE_ERROR
        }
    }
}

fn oracle(path: &Path, count: usize, seed: u64, no_prelude: bool) -> u8 {
    let (session, report) = match load(path, no_prelude) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let globals = session.globals();
    let mut pairs: Vec<OraclePair> = report
        .decls
        .iter()
        .filter_map(|d| {
            let (_, entry) = globals.lookup(&d.name)?;
            Some(OraclePair {
                left: entry.body.clone(),
                right: hti_core::normalize(globals, &hti_core::Context::new(), &entry.body),
                ty: entry.ty.clone(),
            })
        })
        .collect();
    for (i, generated) in oracle_pairs(globals, seed, count).into_iter().enumerate() {
        match generated {
            Ok(pair) => pairs.push(pair),
            Err(why) => {
                eprintln!("generated term {i}: {why}");
                return TYPE_ERROR;
            }
        }
    }
    let result = oracle_check(globals, &pairs);
    for line in result.lines() {
        println!("{line}");
    }
    if result.disagreements() == 0 {
        0
    } else {
        TYPE_ERROR
    }
}

fn props(suites: &[Suite], seed: u64, count: Option<usize>, jobs: usize) -> u8 {
    let config = SuiteConfig {
        seed,
        cases: count,
        jobs: jobs.max(1),
        ..SuiteConfig::default()
    };
    let mut failed = false;
    for &suite in suites {
        let report = run_suite(suite, &config);
        for line in report.lines() {
            println!("{line}");
        }
        failed |= !report.passed();
    }
    u8::from(failed)
}

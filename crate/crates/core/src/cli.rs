//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use clap::{Parser, ValueEnum};

use crate::algorithms::{cautious_reasoning, AlgorithmId, EventKind, Procedure, RunReport, SolverOptions};
use crate::ingest::{parse_asp, parse_dimacs, parse_query, ParseError, SourceFormat};
use crate::multi::{run_multi, W1_ALGORITHM, W2_ALGORITHM};
use crate::oracle;
use crate::program::{AtomSet, Program};
use crate::protocol::{ProtocolWriter, TraceWriter};

pub const EXIT_COMPLETE: i32 = 10;
pub const EXIT_INCOHERENT: i32 = 20;
pub const EXIT_PARTIAL: i32 = 30;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_IO: i32 = 66;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    /// Model enumeration
    Enum,
    /// Overestimate reduction
    Ored,
    /// Iterative coherence testing
    Ict,
    /// Iterative partial coherence testing
    Ipct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Asp,
    Dimacs,
    Auto,
}

/// Computes the cautious consequences of a ground normal logic program,
/// printing sound answers as soon as they are known.
#[derive(Debug, Parser)]
#[command(name = "cautious", version)]
struct Args {
    /// Ground program (ASP rules) or DIMACS CNF
    input: PathBuf,

    /// Improvement procedure [default: ipct with --starred]
    #[arg(long, value_enum)]
    algorithm: Option<AlgorithmArg>,

    /// Report level-0 consequences at every restart
    #[arg(long)]
    starred: bool,

    /// Run overestimate reduction and partial coherence testing in parallel
    #[arg(long, conflicts_with_all = ["algorithm", "starred"])]
    multi: bool,

    /// File with one query atom per line [default: all atoms]
    #[arg(long, value_name = "FILE")]
    query: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,

    /// Stop after this many seconds and report a partial answer
    #[arg(long, value_name = "SECS", value_parser = clap::value_parser!(u64).range(1..))]
    timeout: Option<u64>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Luby restart unit in conflicts; 0 disables restarts
    #[arg(long, value_name = "N", default_value_t = 32)]
    restart_base: u64,

    /// Write estimate sizes over time as CSV
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,

    /// Print all stable models by brute force
    #[arg(long, hide = true)]
    oracle: bool,
}

impl Args {
    fn algorithm(&self) -> AlgorithmId {
        let procedure = match self.algorithm {
            None => return AlgorithmId::default(),
            Some(AlgorithmArg::Enum) => Procedure::Enumeration,
            Some(AlgorithmArg::Ored) => Procedure::OverestimateReduction,
            Some(AlgorithmArg::Ict) => Procedure::Ict,
            Some(AlgorithmArg::Ipct) => Procedure::Ipct,
        };
        AlgorithmId::new(procedure, self.starred)
    }
}

enum Failure {
    Io(PathBuf, io::Error),
    Parse(PathBuf, ParseError),
    Usage(String),
}

impl Failure {
    fn report(&self, err: &mut dyn Write) -> i32 {
        let (code, message) = match self {
            Failure::Io(path, e) => (EXIT_IO, format!("{}: {e}", path.display())),
            Failure::Parse(path, e) => (EXIT_PARSE, format!("{}:{e}", path.display())),
            Failure::Usage(message) => (EXIT_USAGE, message.clone()),
        };
        let _ = writeln!(err, "error: {message}");
        code
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load(args: &Args) -> Result<(Program, AtomSet), Failure> {
    let text = read(&args.input)?;
    let format = match args.format {
        FormatArg::Asp => SourceFormat::AspText,
        FormatArg::Dimacs => SourceFormat::DimacsCnf,
        FormatArg::Auto => SourceFormat::detect(&text),
    };
    let parsed = match format {
        SourceFormat::AspText => parse_asp(&text),
        SourceFormat::DimacsCnf => parse_dimacs(&text),
    };
    let mut program = parsed.map_err(|e| Failure::Parse(args.input.clone(), e))?;
    let query = match &args.query {
        Some(path) => {
            let text = read(path)?;
            parse_query(&text, &mut program).map_err(|e| Failure::Parse(path.clone(), e))?
        }
        None => program.all_atoms(),
    };
    Ok((program, query))
}

fn run_oracle(program: &Program, query: &AtomSet, out: &mut dyn Write) -> Result<i32, Failure> {
    let result = oracle::enumerate_stable_models(program).map_err(|e| Failure::Usage(e.to_string()))?;
    let io = |e| Failure::Io(PathBuf::from("<stdout>"), e);
    for (k, model) in result.stable_models.iter().enumerate() {
        let names = program.names(model.iter()).join(" ");
        writeln!(out, "c model {}: {names}", k + 1).map_err(io)?;
    }
    let code = match result.cautious_answer(query) {
        Some(answer) => {
            for name in program.names(answer.iter().copied()) {
                writeln!(out, "u {name}").map_err(io)?;
            }
            writeln!(out, "s COMPLETE").map_err(io)?;
            EXIT_COMPLETE
        }
        None => {
            writeln!(out, "s INCOHERENT").map_err(io)?;
            EXIT_INCOHERENT
        }
    };
    out.flush().map_err(io)?;
    Ok(code)
}

fn solve(args: &Args, cancel: Arc<AtomicBool>, out: &mut dyn Write) -> Result<i32, Failure> {
    let (program, query) = load(args)?;
    if args.oracle {
        return run_oracle(&program, &query, out);
    }
    let trace = match &args.trace {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::Io(path.clone(), e))?;
            let boxed: Box<dyn Write> = Box::new(file);
            Some(TraceWriter::new(boxed, query.len()).map_err(|e| Failure::Io(path.clone(), e))?)
        }
        None => None,
    };

    if let Some(secs) = args.timeout {
        let flag = Arc::clone(&cancel);
        thread::spawn(move || {
            thread::sleep(Duration::from_secs(secs));
            flag.store(true, Ordering::Relaxed);
        });
    }
    let options = SolverOptions {
        restart_base: Some(args.restart_base).filter(|&b| b > 0),
        seed: args.seed,
        selection: None,
        conflict_budget: None,
        cancel: Some(cancel),
    };

    let mut writer = ProtocolWriter::new(&program, out).show_origin(args.multi);
    if let Some(trace) = trace {
        writer = writer.with_trace(trace);
    }
    let mode = if args.multi {
        format!("multi {W1_ALGORITHM}+{W2_ALGORITHM}")
    } else {
        args.algorithm().to_string()
    };
    writer.comment(&format!("algorithm {mode}"));
    writer.comment(&format!(
        "atoms {} rules {} query {}",
        program.atom_count() - 1,
        program.rules().len(),
        query.len()
    ));
    let report: RunReport = if args.multi {
        run_multi(&program, &query, &options, &mut writer)
    } else {
        cautious_reasoning(&program, &query, args.algorithm(), &options, &mut writer)
    };
    let s = &report.simplification;
    writer.comment(&format!(
        "simplification fixed_true {} fixed_false {} eliminated {} removed_clauses {}",
        s.fixed_true.len(),
        s.fixed_false.len(),
        s.eliminated.len(),
        s.removed_clauses
    ));
    let t = &report.stats;
    writer.comment(&format!(
        "search conflicts {} decisions {} restarts {} learned {} loop_nogoods {}",
        t.conflicts, t.decisions, t.restarts, t.learned, t.loop_nogoods
    ));
    let terminal = writer
        .finish()
        .map_err(|e| Failure::Io(PathBuf::from("<output>"), e))?;
    Ok(match terminal {
        Some(EventKind::Complete) => EXIT_COMPLETE,
        Some(EventKind::Incoherent) => EXIT_INCOHERENT,
        _ => EXIT_PARTIAL,
    })
}

/// Runs the command line with explicit streams and cancellation flag.
pub fn run_with_io<I, T>(
    argv: I,
    cancel: Arc<AtomicBool>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match solve(&args, cancel, out) {
        Ok(code) => code,
        Err(failure) => failure.report(err),
    }
}

/// Entry point of the binary: real stdio, interrupt handling.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cancel = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&cancel);
    let _ = ctrlc::set_handler(move || flag.store(true, Ordering::Relaxed));
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with_io(argv, cancel, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Args, clap::Error> {
        Args::try_parse_from(std::iter::once("cautious").chain(args.iter().copied()))
    }

    #[test]
    fn default_algorithm_is_starred_ipct() {
        let args = parse(&["p.lp"]).unwrap();
        assert_eq!(args.algorithm().to_string(), "A4*");
        let args = parse(&["p.lp", "--algorithm", "ict"]).unwrap();
        assert_eq!(args.algorithm().to_string(), "A3");
        let args = parse(&["p.lp", "--algorithm", "enum", "--starred"]).unwrap();
        assert_eq!(args.algorithm().to_string(), "A1*");
    }

    #[test]
    fn usage_errors() {
        assert!(parse(&["p.lp", "--multi", "--algorithm", "ict"]).is_err());
        assert!(parse(&["p.lp", "--multi", "--starred"]).is_err());
        assert!(parse(&["p.lp", "--timeout", "0"]).is_err());
        assert!(parse(&["p.lp", "--algorithm", "fast"]).is_err());
        assert!(parse(&[]).is_err());
        assert!(parse(&["p.lp", "--multi", "--timeout", "3", "--seed", "7"]).is_ok());
    }
}

//! Command-line front end: argument definitions, the four subcommands and
//! the line-based records format.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use wamc_core::automaton::Path;
use wamc_core::bisim::{class_report, minimize};
use wamc_core::{automata_equivalent, check, ctl_compat, parse_automaton, parse_formula, Semiring, Weight, WeightedAutomaton};

/// Every initial state satisfies the formula, the models are equivalent,
/// or a weight was printed.
pub const EXIT_OK: i32 = 0;
/// Some initial state violates the formula, or the models differ.
pub const EXIT_FAIL: i32 = 1;
/// Bad input, unsupported feature or I/O failure.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: wamc_core::Error },
    #[error(transparent)]
    Core(#[from] wamc_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "wamc", version, about = "Model checking for weighted automata over semirings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a formula in every state.
    Check(CheckArgs),
    /// Write the quotient by the largest bisimulation.
    Minimize(MinimizeArgs),
    /// Decide whether two automata are bisimilar.
    Equiv(EquivArgs),
    /// Weight of a path or of a label sequence.
    Weight(WeightArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    #[default]
    Plain,
    Records,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["formula", "formula_file"])))]
pub struct CheckArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub formula: Option<String>,
    #[arg(long)]
    pub formula_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputMode::Plain)]
    pub output: OutputMode,
    /// Print the root operator's weight next to each listed state.
    #[arg(long)]
    pub show_weights: bool,
    /// Read CTL operators (EX, AF, E[.. U ..], ...) over the boolean semiring.
    #[arg(long)]
    pub ctl_compat: bool,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Write the quotient here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report_classes: bool,
    /// Signature tolerance for real weights.
    #[arg(long, default_value_t = wamc_core::bisim::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    /// Given twice, once per automaton.
    #[arg(long = "model", required = true)]
    pub models: Vec<PathBuf>,
    #[arg(long, default_value_t = wamc_core::bisim::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("what").required(true).args(["seq", "path"])))]
pub struct WeightArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Comma-separated labels; empty for the empty sequence.
    #[arg(long)]
    pub seq: Option<String>,
    /// Comma-separated `state,label,state,...`.
    #[arg(long)]
    pub path: Option<String>,
    /// Start state for `--seq`; all states weighted by α when absent.
    #[arg(long)]
    pub from: Option<String>,
    /// Print the reach vector of `--seq` instead of its weight.
    #[arg(long)]
    pub reach: bool,
}

/// One per-state line of structured check output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub state: String,
    pub verdict: bool,
    /// Weight literal of the root operator, if it has one.
    pub weight: Option<String>,
}

impl Record {
    pub fn weight_in(&self, s: Semiring) -> Option<wamc_core::Result<Weight>> {
        self.weight.as_deref().map(|w| s.parse_weight(w))
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}",
            self.state,
            self.verdict,
            self.weight.as_deref().unwrap_or("-")
        )
    }
}

pub const RECORDS_HEADER: &str = "# state\tverdict\tweight";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("records line {line}: {msg}")]
pub struct RecordError {
    pub line: usize,
    pub msg: String,
}

/// Parses the output of `check --output records`. Lines starting with `#`
/// and blank lines are skipped.
pub fn parse_records(text: &str) -> Result<Vec<Record>, RecordError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| RecordError {
            line: i + 1,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = line.split('\t').collect();
        let [state, verdict, weight] = fields[..] else {
            return Err(err("expected three tab-separated fields"));
        };
        let verdict = match verdict {
            "true" => true,
            "false" => false,
            _ => return Err(err("verdict must be true or false")),
        };
        if state.is_empty() || weight.is_empty() {
            return Err(err("empty field"));
        }
        out.push(Record {
            state: state.to_string(),
            verdict,
            weight: (weight != "-").then(|| weight.to_string()),
        });
    }
    Ok(out)
}

pub fn write_records(out: &mut dyn Write, records: &[Record]) -> io::Result<()> {
    writeln!(out, "{RECORDS_HEADER}")?;
    for r in records {
        writeln!(out, "{r}")?;
    }
    Ok(())
}

fn read(path: &FsPath) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &FsPath) -> Result<WeightedAutomaton, CliError> {
    parse_automaton(&read(path)?).map_err(|source| CliError::Model {
        path: path.to_path_buf(),
        source,
    })
}

fn split_list(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let a = load_model(&args.model)?;
    let text = match (&args.formula, &args.formula_file) {
        (Some(f), _) => f.clone(),
        (None, Some(p)) => read(p)?,
        (None, None) => return Err(CliError::Usage("a formula is required".into())),
    };
    let f = if args.ctl_compat {
        ctl_compat(text.trim(), a.semiring())?
    } else {
        parse_formula(text.trim(), a.semiring())?
    };
    let r = check(&a, &f)?;
    let weight = |x: usize| r.weights.as_ref().map(|w| w[x].to_string());
    match args.output {
        OutputMode::Plain => {
            for x in (0..a.n()).filter(|&x| r.holds(x)) {
                match weight(x).filter(|_| args.show_weights) {
                    Some(w) => writeln!(out, "{}\t{w}", a.state_name(x))?,
                    None => writeln!(out, "{}", a.state_name(x))?,
                }
            }
        }
        OutputMode::Records => {
            let records: Vec<Record> = (0..a.n())
                .map(|x| Record {
                    state: a.state_name(x).to_string(),
                    verdict: r.holds(x),
                    weight: weight(x),
                })
                .collect();
            write_records(out, &records)?;
        }
    }
    Ok(if r.holds_initially(&a) { EXIT_OK } else { EXIT_FAIL })
}

pub fn cmd_minimize(args: &MinimizeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let a = load_model(&args.model)?;
    let (q, part) = minimize(&a, args.tol)?;
    let report = if args.report_classes { class_report(&a, &part) } else { Vec::new() };
    match &args.out {
        Some(path) => {
            fs::write(path, q.to_string()).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            for line in &report {
                writeln!(out, "{line}")?;
            }
        }
        None => {
            write!(out, "{q}")?;
            for line in &report {
                writeln!(err, "{line}")?;
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_equiv(args: &EquivArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let [m1, m2] = &args.models[..] else {
        return Err(CliError::Usage(format!(
            "equiv needs exactly two --model arguments, got {}",
            args.models.len()
        )));
    };
    let (a1, a2) = (load_model(m1)?, load_model(m2)?);
    let same = automata_equivalent(&a1, &a2, args.tol)?;
    writeln!(out, "{}", if same { "equivalent" } else { "not equivalent" })?;
    Ok(if same { EXIT_OK } else { EXIT_FAIL })
}

fn parse_path(a: &WeightedAutomaton, text: &str) -> Result<Path, CliError> {
    let items = split_list(text);
    let Some((first, rest)) = items.split_first() else {
        return Err(CliError::Usage("--path needs at least a start state".into()));
    };
    if rest.len() % 2 != 0 {
        return Err(CliError::Usage("--path must alternate state,label,state,...".into()));
    }
    let mut path = Path::empty(a.require_state(first)?);
    for pair in rest.chunks(2) {
        path.steps.push((a.require_label(pair[0])?, a.require_state(pair[1])?));
    }
    Ok(path)
}

pub fn cmd_weight(args: &WeightArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let a = load_model(&args.model)?;
    if let Some(text) = &args.path {
        let w = a.path_weight(&parse_path(&a, text)?)?;
        writeln!(out, "{w}")?;
        return Ok(EXIT_OK);
    }
    let seq = a.label_sequence(&split_list(args.seq.as_deref().unwrap_or("")))?;
    if args.reach {
        let v = a.reach_vector(&seq)?;
        for x in 0..a.n() {
            writeln!(out, "{}\t{}", a.state_name(x), v.get(x))?;
        }
    } else {
        let from = args.from.as_deref().map(|s| a.require_state(s)).transpose()?;
        writeln!(out, "{}", a.seq_weight(&seq, from)?)?;
    }
    Ok(EXIT_OK)
}

/// Runs a parsed command line and returns the process exit code. Errors are
/// reported on `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, out),
        Command::Minimize(a) => cmd_minimize(a, out, err),
        Command::Equiv(a) => cmd_equiv(a, out),
        Command::Weight(a) => cmd_weight(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

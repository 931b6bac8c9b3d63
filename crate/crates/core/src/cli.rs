//! Command-line front end.
//!
//! Exit codes: 0 satisfied, 1 refuted, 2 inconclusive, 10 and above for
//! errors (10 usage, 11 input/output, 12 model or formula, 13 engine,
//! 14 region-graph size guard, 15 oracle disagreement).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::benchmarks::{generate, Family};
use crate::engine::{ApproxMode, Checker, EngineConfig, Verdict};
use crate::formula::parse_formula;
use crate::model::parse_model;
use crate::region_oracle::RegionGraph;

pub const EXIT_USAGE: i32 = 10;
pub const EXIT_IO: i32 = 11;
pub const EXIT_INPUT: i32 = 12;
pub const EXIT_ENGINE: i32 = 13;
pub const EXIT_TOO_LARGE: i32 = 14;
pub const EXIT_DISAGREE: i32 = 15;

#[derive(Debug, Parser)]
#[command(name = "nzfcheck", version, about = "TCTL model checking of timed automata with under-approximated fair cycles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check formulas against a model.
    Check(CheckArgs),
    /// Write a benchmark model and its property.
    Gen(GenArgs),
    /// Compare exact evaluation with the region graph on a small model.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Under,
    Over,
}

impl From<ModeArg> for ApproxMode {
    fn from(m: ModeArg) -> ApproxMode {
        match m {
            ModeArg::Exact => ApproxMode::Exact,
            ModeArg::Under => ApproxMode::Under,
            ModeArg::Over => ApproxMode::Over,
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Formula text.
    #[arg(long, required_unless_present = "formula_file", conflicts_with = "formula_file")]
    pub formula: Option<String>,
    /// File with one formula per line; blank lines and `//` lines are skipped.
    #[arg(long)]
    pub formula_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    /// Zone-search rounds for under-approximation.
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    /// Prune the search space by backward closures (default).
    #[arg(long, overrides_with = "no_big_chunks")]
    pub big_chunks: bool,
    #[arg(long)]
    pub no_big_chunks: bool,
    /// Do not restrict until-targets to divergent states.
    #[arg(long)]
    pub no_non_zeno: bool,
    /// Write run statistics as JSON.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Print the initial states violating the property.
    #[arg(long)]
    pub witness: bool,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iterations: u64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// fischer, fischer-bug, csma, csma-bug or pathos.
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub formula: String,
}

/// Statistics written by `check --stats`.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RunReport {
    pub verdict: Verdict,
    pub mode: ApproxMode,
    pub level_used: usize,
    pub fixpoint_iterations: u64,
    pub peak_zone_count: usize,
    pub final_zone_count: usize,
    pub wall_ms: u64,
}

struct Failure(i32, String);

/// Runs the front end and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let result = match cli.command {
        Command::Check(a) => check(&a, out),
        Command::Gen(a) => gen(&a, out),
        Command::OracleCheck(a) => oracle_check(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(EXIT_IO, format!("{}: {e}", path.display())))
}

fn check(a: &CheckArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let started = Instant::now();
    let model_src = read(&a.model)?;
    let mut ta = parse_model(&model_src).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", a.model.display())))?;
    let texts: Vec<String> = match (&a.formula, &a.formula_file) {
        (Some(f), _) => vec![f.clone()],
        (None, Some(path)) => read(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with("//"))
            .map(String::from)
            .collect(),
        (None, None) => unreachable!("clap requires one formula source"),
    };
    let mut formulas = Vec::new();
    for t in &texts {
        let f = parse_formula(t, &mut ta).map_err(|e| Failure(EXIT_INPUT, format!("formula `{t}`: {e}")))?;
        formulas.push(f);
    }
    let cfg = EngineConfig {
        level: a.level,
        big_chunks: !a.no_big_chunks,
        non_zeno: !a.no_non_zeno,
        max_iterations: a.max_iterations,
        ..EngineConfig::default()
    };
    let refs: Vec<_> = formulas.iter().collect();
    let mut checker = Checker::new(&ta, &refs, cfg).map_err(|e| Failure(EXIT_ENGINE, e.to_string()))?;
    let mode = ApproxMode::from(a.mode);
    let mut combined = Verdict::Satisfied;
    let mut final_zones = 0;
    for (text, f) in texts.iter().zip(&formulas) {
        let r = checker.check(f, mode).map_err(|e| Failure(EXIT_ENGINE, e.to_string()))?;
        let _ = writeln!(out, "{text}: {}", r.verdict);
        if a.witness && !r.witness.is_empty() {
            let names = checker.system().mode_names();
            let mut clocks = ta.clocks.clone();
            clocks.push("z".into());
            let _ = write!(out, "{}", r.witness.display_with(&names, &clocks));
        }
        final_zones += r.final_zone_count;
        combined = match (combined, r.verdict) {
            (Verdict::Refuted, _) | (_, Verdict::Refuted) => Verdict::Refuted,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Satisfied,
        };
    }
    let stats = checker.stats();
    let report = RunReport {
        verdict: combined,
        mode,
        level_used: stats.level_used,
        fixpoint_iterations: stats.fixpoint_iterations,
        peak_zone_count: stats.peak_zone_count,
        final_zone_count: final_zones,
        wall_ms: started.elapsed().as_millis() as u64,
    };
    if let Some(path) = &a.stats {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(path, json + "\n").map_err(|e| Failure(EXIT_IO, format!("{}: {e}", path.display())))?;
    }
    Ok(combined.exit_code())
}

fn gen(a: &GenArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let b = generate(a.family, a.n).map_err(|e| Failure(EXIT_USAGE, e.to_string()))?;
    let (model, prop) = b.write_to(&a.out).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
    let _ = writeln!(out, "{}\n{}", model.display(), prop.display());
    Ok(0)
}

fn oracle_check(a: &OracleArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut ta = parse_model(&read(&a.model)?).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", a.model.display())))?;
    let f = parse_formula(&a.formula, &mut ta).map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
    let mut checker = Checker::new(&ta, &[&f], EngineConfig::default()).map_err(|e| Failure(EXIT_ENGINE, e.to_string()))?;
    let graph = RegionGraph::build(&ta, checker.ceiling()).map_err(|e| Failure(EXIT_TOO_LARGE, e.to_string()))?;
    let engine = checker.eval(&f, ApproxMode::Exact).map_err(|e| Failure(EXIT_ENGINE, e.to_string()))?;
    let bad = graph.disagreements(&engine, &graph.eval(&f, true));
    if bad.is_empty() {
        let _ = writeln!(out, "agree on all {} regions", graph.len());
        Ok(0)
    } else {
        let _ = writeln!(out, "disagree on {} of {} regions", bad.len(), graph.len());
        for r in bad.iter().take(10) {
            let _ = writeln!(out, "  {r:?}");
        }
        Ok(EXIT_DISAGREE)
    }
}

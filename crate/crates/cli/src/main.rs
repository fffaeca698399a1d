//! `pcnf` command-line tool.
//!
//! Exit codes: 20 unsatisfiable, 10 satisfiable, 0 unknown/success,
//! 64 and up for usage, input and internal errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pcnf::analysis::{analyze_raw, AnalysisOptions, DEFAULT_ANALYZE_ORACLE_MAX_N};
use pcnf::bounds::{bounds_for, clause_distribution, Construction, VarConvention};
use pcnf::dimacs::{parse_dimacs, write_dimacs, DimacsCnf};
use pcnf::formula::{Assignment, PcnfFormula};
use pcnf::generate::{double_sat_construction, enumerate_clauses, max_sat_construction, width_histogram};
use pcnf::normalize::normalize;
use pcnf::oracle::{solve, OracleConfig, DEFAULT_ORACLE_MAX_N};
use pcnf::verify::{verify_bounds, Strata, VerifyMode, DEFAULT_EXHAUSTIVE_BUDGET};
use serde_json::{json, Value};

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;
const EX_SOFTWARE: u8 = 70;
const EX_IOERR: u8 = 74;

#[derive(Parser)]
#[command(name = "pcnf", version, about = "Precise CNF analysis: bounds, screens and a brute-force oracle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize, classify and screen a DIMACS formula
    Analyze {
        /// DIMACS file, or `-` for standard input
        file: PathBuf,
        /// Run the oracle only up to this many variables
        #[arg(long, env = "PCNF_ORACLE_MAX_N", default_value_t = DEFAULT_ANALYZE_ORACLE_MAX_N)]
        oracle_max_n: usize,
        /// Evaluate bounds at the number of variables that actually occur
        #[arg(long)]
        recount_vars: bool,
        /// Stop the clause-class scan at the first full class
        #[arg(long)]
        early_exit: bool,
        /// Aligned text instead of JSON
        #[arg(long)]
        text: bool,
    },
    /// Print the bounds table for n variables
    Bounds {
        n: usize,
        #[arg(long)]
        text: bool,
    },
    /// Convert DIMACS CNF to its PCNF form
    Normalize {
        input: PathBuf,
        /// Output file; standard output when omitted
        output: Option<PathBuf>,
    },
    /// Emit one of the clause-set constructions as DIMACS
    Generate {
        #[arg(long, value_enum)]
        construction: ConstructionArg,
        #[arg(long)]
        n: usize,
        /// Variable to flip for double-sat (letter or 1-based index)
        #[arg(long, default_value = "a")]
        flip: String,
        /// Witness assignment as 0/1 per variable, `a` first; all true by default
        #[arg(long)]
        witness: Option<String>,
        /// Clause listing with per-width counts instead of DIMACS
        #[arg(long)]
        text: bool,
    },
    /// Count models by exhaustive enumeration
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_MAX_N)]
        max_n: usize,
        #[arg(long)]
        text: bool,
    },
    /// Check the clause-count theorems against the oracle
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Formulas per stratum in sample mode
        #[arg(long, default_value_t = 10_000)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = StratumArg::All)]
        stratum: StratumArg,
        /// Maximum formulas for exhaustive mode
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_BUDGET)]
        budget: u64,
        #[arg(long)]
        text: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    All,
    MaxSat,
    DoubleSat,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sample,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StratumArg {
    All,
    BeyondF,
    Natural,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::new(EX_NOINPUT, format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::new(EX_NOINPUT, format!("{}: {e}", path.display())))
}

fn read_dimacs(path: &Path) -> Result<DimacsCnf, Failure> {
    let text = read_input(path)?;
    let parsed = parse_dimacs(&text).map_err(|e| Failure::new(EX_DATAERR, format!("{}: {e}", path.display())))?;
    if parsed.clause_count_mismatch {
        eprintln!(
            "warning: {}: header declares {} clauses, found {}",
            path.display(),
            parsed.declared_clauses,
            parsed.cnf.clauses().len()
        );
    }
    Ok(parsed)
}

fn print_json(value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("json value serializes");
    println!("{text}");
    Ok(())
}

fn parse_var(spec: &str, n: usize) -> Result<usize, Failure> {
    let var = match spec.as_bytes() {
        [c @ b'a'..=b'z'] => (c - b'a') as usize,
        _ => spec
            .parse::<usize>()
            .ok()
            .and_then(|v| v.checked_sub(1))
            .ok_or_else(|| Failure::new(EX_USAGE, format!("bad variable `{spec}`")))?,
    };
    if var >= n {
        return Err(Failure::new(EX_USAGE, format!("variable `{spec}` outside {n} variables")));
    }
    Ok(var)
}

fn parse_witness(spec: Option<&str>, n: usize) -> Result<Assignment, Failure> {
    let Some(spec) = spec else {
        return Ok(Assignment::all_true(n));
    };
    if spec.len() != n || !spec.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Failure::new(EX_USAGE, format!("witness must be {n} characters of 0/1")));
    }
    let bits = spec
        .bytes()
        .enumerate()
        .filter(|(_, b)| *b == b'1')
        .fold(0u64, |acc, (i, _)| acc | 1 << i);
    Assignment::new(bits, n).map_err(|e| Failure::new(EX_USAGE, e.to_string()))
}

fn cmd_analyze(file: &Path, options: AnalysisOptions, text: bool) -> CmdResult {
    let parsed = read_dimacs(file)?;
    let (report, _) =
        analyze_raw(&parsed.cnf, &options).map_err(|e| Failure::new(EX_DATAERR, format!("{}: {e}", file.display())))?;
    if report.oracle.is_none() {
        eprintln!(
            "note: oracle skipped, {} variables exceeds --oracle-max-n {}",
            report.formula.num_vars(),
            options.oracle_max_n
        );
    }
    if text {
        print!("{}", report.to_text());
    } else {
        println!("{}", report.to_json());
    }
    Ok(report.exit_code() as u8)
}

fn cmd_bounds(n: usize, text: bool) -> CmdResult {
    let table = bounds_for(n).map_err(|e| Failure::new(EX_USAGE, e.to_string()))?;
    let dist = |c| -> Value {
        match clause_distribution(n, c) {
            Ok(v) => Value::Array(v.iter().map(|x| num(&x.to_string())).collect()),
            Err(_) => Value::Null,
        }
    };
    if text {
        let rows = [
            ("m", &table.m, "clause universe"),
            ("f", &table.f, "more clauses: unsatisfiable"),
            ("g", &table.g, "more clauses: at most one model"),
            ("r", &table.r, "m - f"),
            ("s", &table.s, "f - g"),
            ("v", &table.v, "variable occurrence threshold"),
            ("p", &table.p, "literal occurrence ceiling"),
            ("q", &table.q, "complement threshold"),
        ];
        let width = rows.iter().map(|r| r.1.to_string().len()).max().unwrap_or(1);
        println!("n = {n}");
        for (name, value, what) in rows {
            println!("{name}  {value:>width$}  {what}");
        }
        for (name, c) in [
            ("all", Construction::All),
            ("max-sat", Construction::MaxSat),
            ("double-sat", Construction::DoubleSat),
        ] {
            if let Ok(v) = clause_distribution(n, c) {
                let v: Vec<String> = v.iter().map(ToString::to_string).collect();
                println!("{name:<11} by width: [{}]", v.join(", "));
            }
        }
        return Ok(0);
    }
    print_json(&json!({
        "n": n,
        "m": num(&table.m.to_string()),
        "f": num(&table.f.to_string()),
        "g": num(&table.g.to_string()),
        "r": num(&table.r.to_string()),
        "s": num(&table.s.to_string()),
        "v": num(&table.v.to_string()),
        "p": num(&table.p.to_string()),
        "q": num(&table.q.to_string()),
        "distribution": {
            "all": dist(Construction::All),
            "max_sat": dist(Construction::MaxSat),
            "double_sat": dist(Construction::DoubleSat),
        },
    }))?;
    Ok(0)
}

/// Exact integer JSON number from its decimal text.
fn num(digits: &str) -> Value {
    serde_json::from_str(digits).expect("decimal integer")
}

fn cmd_normalize(input: &Path, output: Option<&Path>) -> CmdResult {
    let parsed = read_dimacs(input)?;
    let (formula, stats) =
        normalize(&parsed.cnf).map_err(|e| Failure::new(EX_DATAERR, format!("{}: {e}", input.display())))?;
    let dimacs = write_dimacs(&formula);
    let stats = serde_json::to_string_pretty(&stats).expect("stats serialize");
    match output {
        Some(path) => {
            fs::write(path, dimacs).map_err(|e| Failure::new(EX_IOERR, format!("{}: {e}", path.display())))?;
            println!("{stats}");
        }
        None => {
            print!("{dimacs}");
            eprintln!("{stats}");
        }
    }
    Ok(0)
}

fn cmd_generate(construction: ConstructionArg, n: usize, flip: &str, witness: Option<&str>, text: bool) -> CmdResult {
    let usage = |e: &dyn std::fmt::Display| Failure::new(EX_USAGE, e.to_string());
    if n == 0 || n > pcnf::generate::MAX_ENUMERATION_N {
        return Err(Failure::new(
            EX_USAGE,
            format!("--n must be in 1..={}", pcnf::generate::MAX_ENUMERATION_N),
        ));
    }
    let witness = parse_witness(witness, n)?;
    let formula = match construction {
        ConstructionArg::All => {
            PcnfFormula::new(n, enumerate_clauses(n).map_err(|e| usage(&e))?).map_err(|e| usage(&e))?
        }
        ConstructionArg::MaxSat => max_sat_construction(n, witness).map_err(|e| usage(&e))?,
        ConstructionArg::DoubleSat => {
            double_sat_construction(n, witness, parse_var(flip, n)?).map_err(|e| usage(&e))?
        }
    };
    if text {
        let hist = width_histogram(formula.clauses(), n);
        println!("{} clauses, by width {:?}", formula.len(), hist);
        for c in formula.clauses() {
            println!("{}", c.display(n));
        }
    } else {
        print!("{}", write_dimacs(&formula));
    }
    Ok(0)
}

fn cmd_solve(file: &Path, max_n: usize, text: bool) -> CmdResult {
    let parsed = read_dimacs(file)?;
    let raw = &parsed.cnf;
    let (formula, _) = normalize(&raw.without_empty_clauses())
        .map_err(|e| Failure::new(EX_DATAERR, format!("{}: {e}", file.display())))?;
    let config = OracleConfig {
        max_n,
        ..OracleConfig::default()
    };
    let mut result = solve(&formula, &config).map_err(|e| Failure::new(EX_USAGE, e.to_string()))?;
    if raw.contains_empty_clause() {
        result.model_count = 0;
        result.models.clear();
    }
    let n = formula.num_vars();
    let models: Vec<String> = result.models.iter().map(|a| a.to_bit_string(n)).collect();
    if text {
        println!("variables    {n}");
        println!("clauses      {}", formula.len());
        println!("models       {}", result.model_count);
        for m in &models {
            println!("  {m}");
        }
    } else {
        print_json(&json!({
            "n": n,
            "num_clauses": formula.len(),
            "model_count": result.model_count,
            "verdict": result.verdict(),
            "models": models,
            "empty_clause": raw.contains_empty_clause(),
        }))?;
    }
    Ok(if result.model_count == 0 { 20 } else { 10 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(n: usize, mode: ModeArg, count: u64, seed: u64, stratum: StratumArg, budget: u64, text: bool) -> CmdResult {
    let mode = match mode {
        ModeArg::Exhaustive => VerifyMode::Exhaustive { budget },
        ModeArg::Sample => VerifyMode::Sample { count, seed },
    };
    let strata = match stratum {
        StratumArg::All => Strata::All,
        StratumArg::BeyondF => Strata::BeyondF,
        StratumArg::Natural => Strata::Natural,
    };
    let report = verify_bounds(n, mode, strata).map_err(|e| Failure::new(EX_USAGE, e.to_string()))?;
    if text {
        print!("{}", report.to_text());
    } else {
        print_json(&serde_json::to_value(&report).expect("report serializes"))?;
    }
    Ok(if report.holds { 0 } else { EX_SOFTWARE })
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Analyze {
            file,
            oracle_max_n,
            recount_vars,
            early_exit,
            text,
        } => {
            let options = AnalysisOptions {
                oracle_max_n,
                convention: if recount_vars {
                    VarConvention::Occurring
                } else {
                    VarConvention::Declared
                },
                early_exit,
            };
            cmd_analyze(&file, options, text)
        }
        Command::Bounds { n, text } => cmd_bounds(n, text),
        Command::Normalize { input, output } => cmd_normalize(&input, output.as_deref()),
        Command::Generate {
            construction,
            n,
            flip,
            witness,
            text,
        } => cmd_generate(construction, n, &flip, witness.as_deref(), text),
        Command::Solve { file, max_n, text } => cmd_solve(&file, max_n, text),
        Command::Verify {
            n,
            mode,
            count,
            seed,
            stratum,
            budget,
            text,
        } => cmd_verify(n, mode, count, seed, stratum, budget, text),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EX_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    };
    let _ = io::stdout().flush();
    ExitCode::from(code)
}

//! `mct`: many-to-one comparisons from the command line.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 invalid input or arguments.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mct_core::sim::{parse_scenarios, reproduce_table, run_scenario, TableId};
use mct_core::{csv_header, parse_dataset, run_test, Alternative, Dataset, HcFlavor, Method, TestSpec};

#[derive(Parser, Debug)]
#[command(name = "mct", version, about = "Many-to-one (Dunnett-type) comparisons to a control")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare every treatment group of a long-format CSV with the control.
    Test(TestArgs),
    /// Simulate rejection rates for the scenarios in a scenario file.
    Simulate(SimulateArgs),
    /// Reproduce one of the published simulation tables.
    Tables(TablesArgs),
}

#[derive(Parser, Debug)]
struct TestArgs {
    /// CSV file, or `-` for standard input.
    input: PathBuf,
    /// Grouping column (default: first column).
    #[arg(long)]
    group: Option<String>,
    /// Response column (default: second column).
    #[arg(long)]
    response: Option<String>,
    /// Control group label (default: first group in the file).
    #[arg(long)]
    control: Option<String>,
    #[arg(long, default_value = "original")]
    method: String,
    /// less, greater or two-sided.
    #[arg(long, default_value = "two-sided")]
    alternative: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Integration seed.
    #[arg(long, env = "MCT_SEED", default_value_t = 0)]
    seed: u64,
    /// Sandwich flavor: hc3 or hc0.
    #[arg(long, default_value = "hc3")]
    hc: String,
    /// Absolute error target of the multivariate t integration.
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Parser, Debug)]
struct SimulateArgs {
    /// Scenario file (CSV with header, or key=value lines), or `-` for standard input.
    input: PathBuf,
    /// Override the run count of every scenario.
    #[arg(long)]
    runs: Option<usize>,
    /// Override the seed of every scenario.
    #[arg(long, env = "MCT_SEED")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = SimFormat::Csv)]
    format: SimFormat,
}

#[derive(Parser, Debug)]
struct TablesArgs {
    /// h0_small, h1_balanced, h1_unbalanced, h0_moderate, h1_moderate or all.
    id: String,
    /// Runs per scenario row (default: 5000 for H0 tables, 2000 for H1 tables).
    #[arg(long, conflicts_with = "quick")]
    runs: Option<usize>,
    /// 500 runs per row.
    #[arg(long)]
    quick: bool,
    #[arg(long, env = "MCT_SEED", default_value_t = 1)]
    seed: u64,
    /// Output CSV file, or a directory receiving `<id>.csv` (default: current directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SimFormat {
    Csv,
    Table,
}

const QUICK_RUNS: usize = 500;

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<mct_core::Error> for Failure {
    fn from(e: mct_core::Error) -> Self {
        Self {
            code: if e.is_numeric() { 1 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Tables(args) => cmd_tables(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("cannot read standard input: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_stdout(text: &str) -> Result<(), Failure> {
    io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| Failure::usage(format!("cannot write output: {e}")))
}

fn cmd_test(args: TestArgs) -> Result<u8, Failure> {
    let method: Method = args.method.parse()?;
    let alternative: Alternative = args.alternative.parse()?;
    let hc: HcFlavor = args.hc.parse()?;
    let mut spec = TestSpec::new(method, alternative)
        .with_alpha(args.alpha)
        .with_seed(args.seed);
    spec.hc = hc;
    if let Some(tol) = args.abs_tol {
        if !(tol > 0.0) {
            return Err(Failure::usage(format!("--abs-tol must be positive, got {tol}")));
        }
        spec.mvt.abs_tol = tol;
    }
    spec.validate()?;

    let text = read_input(&args.input)?;
    let header = csv_header(&text)?;
    let column = |given: Option<String>, pos: usize, flag: &str| {
        given.or_else(|| header.get(pos).cloned()).ok_or_else(|| {
            Failure::usage(format!("CSV has fewer than {} columns; pass --{flag}", pos + 1))
        })
    };
    let group = column(args.group, 0, "group")?;
    let response = column(args.response, 1, "response")?;
    let ds: Dataset = parse_dataset(&text, &group, &response, args.control.as_deref())?;
    let report = run_test(&ds, &spec)?;
    let rendered = match args.format {
        Format::Table => output::report_table(&report, &ds, args.seed),
        Format::Csv => output::report_csv(&report, &ds, args.seed),
        Format::Json => output::report_json(&report, &ds, args.seed),
    };
    write_stdout(&rendered)?;
    Ok(0)
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8, Failure> {
    let text = read_input(&args.input)?;
    let parsed = parse_scenarios(&text)?;
    let mut reports = Vec::new();
    let mut failed = false;
    for (i, sc) in parsed.into_iter().enumerate() {
        let result = sc.and_then(|mut sc| {
            if let Some(r) = args.runs {
                sc.runs = r;
            }
            if let Some(s) = args.seed {
                sc.seed = s;
            }
            run_scenario(&sc)
        });
        match result {
            Ok(r) => reports.push((i + 1, r)),
            Err(e) => {
                eprintln!("error: scenario {}: {e}", i + 1);
                failed = true;
            }
        }
    }
    let rendered = match args.format {
        SimFormat::Csv => output::sim_csv(&reports),
        SimFormat::Table => output::sim_table(&reports),
    };
    write_stdout(&rendered)?;
    Ok(u8::from(failed))
}

fn cmd_tables(args: TablesArgs) -> Result<u8, Failure> {
    let ids: Vec<TableId> = if args.id.eq_ignore_ascii_case("all") {
        TableId::ALL.to_vec()
    } else {
        vec![args.id.parse()?]
    };
    if args.runs == Some(0) {
        return Err(Failure::usage("--runs must be at least 1"));
    }
    if ids.len() > 1 && args.out.as_ref().is_some_and(|p| !p.is_dir()) {
        return Err(Failure::usage("--out must be a directory when writing all tables"));
    }
    for id in ids {
        let runs = if args.quick {
            QUICK_RUNS
        } else {
            args.runs.unwrap_or(id.default_runs())
        };
        let table = reproduce_table(id, runs, args.seed)?;
        let path = match &args.out {
            Some(p) if p.is_dir() => p.join(format!("{id}.csv")),
            Some(p) => p.clone(),
            None => PathBuf::from(format!("{id}.csv")),
        };
        fs::write(&path, table.to_csv())
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
        write_stdout(&format!("{table}wrote {}\n\n", path.display()))?;
    }
    Ok(0)
}

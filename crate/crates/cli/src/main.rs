use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dicke_cli::config::{parse_config, BasisSelection, SweepConfig};
use dicke_cli::error::{CliError, Result};
use dicke_cli::solve::{format_solve, run_solve, CutoffChoice, SolveArgs};
use dicke_cli::table::{format_bench, format_table, run_bench, table1, BenchOptions, TableOptions, FOCK_MAX_DIM};
use dicke_cli::{check, sweep};
use dicke_core::matrix::DEFAULT_MAX_DIM;
use dicke_core::{DickeError, ModelParams};

#[derive(Parser)]
#[command(name = "dicke", version, about = "Exact diagonalization of the finite-N Dicke model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenstates and observables at one parameter point.
    Solve(SolveCmd),
    /// Observables along a γ grid for several j.
    Sweep(SweepCmd),
    /// Converged ground energies and minimal cutoffs on the standard (j, γ) grid.
    Table1(TableCmd),
    /// Timing and cutoff comparison of the two bases.
    Bench(BenchCmd),
    /// Run the oracle suites.
    Check,
}

#[derive(Args)]
struct SolveCmd {
    #[arg(long)]
    j: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value = "coherent")]
    basis: BasisSelection,
    /// `auto` for convergence-driven escalation, or a fixed photon cutoff.
    #[arg(long, default_value = "auto")]
    cutoff: CutoffChoice,
    #[arg(long, default_value_t = 2)]
    states: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
    /// Write the assembled matrix to PATH.<basis>.
    #[arg(long, value_name = "PATH")]
    dump_matrix: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepCmd {
    /// Flat `key = value` settings file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated list of j values.
    #[arg(long)]
    j: Option<String>,
    #[arg(long)]
    gamma_min: Option<f64>,
    #[arg(long)]
    gamma_max: Option<f64>,
    #[arg(long)]
    gamma_points: Option<usize>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    basis: Option<BasisSelection>,
    #[arg(long)]
    states: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    max_dim: Option<usize>,
}

impl SweepCmd {
    fn settings(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("j", self.j.clone());
        put("gamma_min", self.gamma_min.map(|v| v.to_string()));
        put("gamma_max", self.gamma_max.map(|v| v.to_string()));
        put("gamma_points", self.gamma_points.map(|v| v.to_string()));
        put("omega", self.omega.map(|v| v.to_string()));
        put("delta", self.delta.map(|v| v.to_string()));
        put("basis", self.basis.map(|v| v.to_string()));
        put("states", self.states.map(|v| v.to_string()));
        put("tolerance", self.tol.map(|v| v.to_string()));
        put("output", self.output.as_ref().map(|v| v.display().to_string()));
        put("format", self.format.clone());
        put("threads", self.threads.map(|v| v.to_string()));
        put("max_dim", self.max_dim.map(|v| v.to_string()));
        m
    }
}

#[derive(Args)]
struct TableCmd {
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Fock cells needing a larger basis print "--".
    #[arg(long, default_value_t = FOCK_MAX_DIM)]
    fock_max_dim: usize,
    /// Only the coherent basis.
    #[arg(long)]
    no_fock: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchCmd {
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,20")]
    j: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    gamma: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = FOCK_MAX_DIM)]
    fock_max_dim: usize,
    #[arg(long)]
    json: bool,
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(a) => {
            let params = ModelParams::new(a.omega, a.delta, a.gamma, a.j).map_err(|e| CliError::Usage(e.to_string()))?;
            let args = SolveArgs {
                params,
                basis: a.basis,
                cutoff: a.cutoff,
                states: a.states,
                tolerance: a.tol,
                max_dim: a.max_dim,
                dump: a.dump_matrix,
            };
            let solves = run_solve(&args)?;
            if a.json {
                print_json(&solves)
            } else {
                print!("{}", format_solve(&params, &solves));
                Ok(())
            }
        }
        Command::Sweep(a) => {
            let mut cfg = SweepConfig::default();
            if let Some(path) = &a.config {
                cfg.apply(&parse_config(&std::fs::read_to_string(path)?)?)?;
            }
            cfg.apply(&a.settings())?;
            let outcome = sweep::run_sweep(&cfg)?;
            match &cfg.output {
                Some(path) => sweep::write_rows(&outcome.rows, cfg.format, std::io::BufWriter::new(std::fs::File::create(path)?))?,
                None => sweep::write_rows(&outcome.rows, cfg.format, std::io::stdout().lock())?,
            }
            for &j in &cfg.js {
                for &kind in cfg.basis.kinds() {
                    if let Some(c) = outcome.max_cutoff(j, kind) {
                        log::info!("j={j} {kind}: largest minimal cutoff {c}");
                    }
                }
            }
            if outcome.failed_points > 0 {
                return Err(CliError::Partial { failed: outcome.failed_points, total: outcome.total_points });
            }
            Ok(())
        }
        Command::Table1(a) => {
            let opts = TableOptions { tolerance: a.tol, fock_max_dim: a.fock_max_dim, include_fock: !a.no_fock, ..TableOptions::default() };
            let cells = table1(&opts)?;
            if a.json {
                print_json(&cells)
            } else {
                print!("{}", format_table(&cells));
                Ok(())
            }
        }
        Command::Bench(a) => {
            let opts = BenchOptions { js: a.j, gammas: a.gamma, tolerance: a.tol, fock_max_dim: a.fock_max_dim };
            let (rows, trends) = run_bench(&opts)?;
            if a.json {
                print_json(&serde_json::json!({ "rows": rows, "trends": trends }))?;
            } else {
                print!("{}", format_bench(&rows, &trends));
            }
            match trends.iter().find(|t| !t.passed()) {
                Some(t) => Err(CliError::Check(format!("cutoff ordering violated at gamma={}", t.gamma))),
                None => Ok(()),
            }
        }
        Command::Check => {
            let lines = check::run_checks()?;
            for l in &lines {
                println!("{l}");
            }
            match lines.iter().filter(|l| !l.passed).count() {
                0 => Ok(()),
                n => Err(CliError::Check(format!("{n} oracle suite(s) failed"))),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Core(DickeError::NonConvergence { path }) = &e {
                let pretty: Vec<String> = path.iter().map(|(c, e)| format!("{c}:{e:.10}")).collect();
                eprintln!("escalation path (cutoff:E0): {}", pretty.join(" "));
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Single-point solves.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use dicke_core::matrix::Budget;
use dicke_core::{
    build_hamiltonian, converge_solution, measure_all, solve_lowest, BasisKind, ConvergenceReport, CutoffPolicy,
    ModelParams, ObservableRecord,
};
use serde::Serialize;

use crate::config::BasisSelection;
use crate::error::{usage, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutoffChoice {
    Auto,
    Fixed(u32),
}

impl std::str::FromStr for CutoffChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(CutoffChoice::Auto);
        }
        s.parse().map(CutoffChoice::Fixed).map_err(|_| format!("cutoff must be 'auto' or a non-negative integer, got '{s}'"))
    }
}

#[derive(Clone, Debug)]
pub struct SolveArgs {
    pub params: ModelParams,
    pub basis: BasisSelection,
    pub cutoff: CutoffChoice,
    pub states: usize,
    pub tolerance: f64,
    pub max_dim: usize,
    /// Writes each assembled matrix to `<path>.<basis>`.
    pub dump: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisSolve {
    pub basis: BasisKind,
    pub cutoff: u32,
    pub dimension: usize,
    pub records: Vec<ObservableRecord>,
    pub report: Option<ConvergenceReport>,
    pub wall_time_s: f64,
}

pub fn run_solve(args: &SolveArgs) -> Result<Vec<BasisSolve>> {
    if args.states == 0 {
        return usage("states must be positive");
    }
    let budget = Budget::new(args.max_dim);
    let mut out = Vec::new();
    for &kind in args.basis.kinds() {
        let started = Instant::now();
        let (cutoff, solution, report) = match args.cutoff {
            CutoffChoice::Auto => {
                let policy = CutoffPolicy { budget, ..CutoffPolicy::default() };
                let (report, solution) = converge_solution(&args.params, kind, args.states, args.tolerance, &policy)?;
                (report.minimal_cutoff, solution, Some(report))
            }
            CutoffChoice::Fixed(c) => {
                let h = build_hamiltonian(&args.params, kind, c, &budget)?;
                if args.states > h.dim() {
                    return usage(format!("{} states requested but the basis has {}", args.states, h.dim()));
                }
                (c, solve_lowest(&h, args.states)?, None)
            }
        };
        if let Some(path) = &args.dump {
            let h = build_hamiltonian(&args.params, kind, cutoff, &budget)?;
            let mut target = path.clone().into_os_string();
            target.push(format!(".{kind}"));
            h.write_dump(std::io::BufWriter::new(std::fs::File::create(&target)?))?;
        }
        let records = measure_all(&solution, &args.params)?;
        out.push(BasisSolve {
            basis: kind,
            cutoff,
            dimension: solution.states.len(),
            records,
            report,
            wall_time_s: started.elapsed().as_secs_f64(),
        });
    }
    Ok(out)
}

pub fn format_solve(params: &ModelParams, solves: &[BasisSolve]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "omega={} delta={} gamma={} j={} G={:.6}",
        params.omega(),
        params.delta(),
        params.gamma(),
        params.j(),
        params.g()
    );
    for b in solves {
        let _ = writeln!(s, "[{}] cutoff={} dimension={} wall={:.3}s", b.basis, b.cutoff, b.dimension, b.wall_time_s);
        let _ = writeln!(s, "{:>5} {:>16} {:>12} {:>12} {:>12} {:>6}", "state", "energy", "gap", "n/j", "jz/j", "parity");
        for r in &b.records {
            let parity = match r.parity {
                dicke_core::ParityLabel::Even => "even",
                dicke_core::ParityLabel::Odd => "odd",
            };
            let flag = if r.near_degenerate { " *" } else { "" };
            let _ = writeln!(
                s,
                "{:>5} {:>16.8} {:>12.4e} {:>12.6} {:>12.6} {:>6}{flag}",
                r.state_index, r.energy, r.gap, r.photon_per_j, r.jz_per_j, parity
            );
        }
    }
    if let [a, b] = solves {
        let worst = a.records.iter().zip(&b.records).map(|(x, y)| (x.energy - y.energy).abs()).fold(0.0, f64::max);
        let _ = writeln!(s, "max |E_{} - E_{}| = {worst:.3e}", a.basis, b.basis);
    }
    if solves.iter().any(|b| b.records.iter().any(|r| r.near_degenerate)) {
        let _ = writeln!(s, "* near-degenerate; reported as a parity eigenstate");
    }
    s
}

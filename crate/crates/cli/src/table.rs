//! The (j, γ) convergence table and the basis-size benchmark.

use std::fmt::Write as _;

use dicke_core::matrix::Budget;
use dicke_core::{converge, BasisKind, ConvergenceReport, CutoffPolicy, DickeError, ModelParams};
use serde::Serialize;

use crate::error::Result;

pub const TABLE_J: [f64; 5] = [1.0, 2.0, 5.0, 10.0, 20.0];
pub const TABLE_GAMMA: [f64; 6] = [0.0, 0.1, 0.2, 0.5, 1.0, 2.0];

/// Default dimension cap for the Fock basis in table and bench runs; cells
/// that would need more are reported as skipped.
pub const FOCK_MAX_DIM: usize = 3_000;

#[derive(Clone, Debug, Serialize)]
pub struct BasisCell {
    pub minimal_cutoff: u32,
    pub dimension: usize,
    pub energy: f64,
    pub assembly_time_s: f64,
    pub solve_time_s: f64,
    pub wall_time_s: f64,
}

impl From<&ConvergenceReport> for BasisCell {
    fn from(r: &ConvergenceReport) -> Self {
        Self {
            minimal_cutoff: r.minimal_cutoff,
            dimension: r.dimension,
            energy: r.converged_energies[0],
            assembly_time_s: r.assembly_time_s,
            solve_time_s: r.solve_time_s,
            wall_time_s: r.wall_time_s,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableCell {
    pub j: f64,
    pub gamma: f64,
    pub fock: Option<BasisCell>,
    pub coherent: Option<BasisCell>,
}

impl TableCell {
    /// Ground energy, preferring the coherent basis.
    pub fn energy(&self) -> Option<f64> {
        self.coherent.as_ref().or(self.fock.as_ref()).map(|c| c.energy)
    }
}

#[derive(Clone, Debug)]
pub struct TableOptions {
    pub js: Vec<f64>,
    pub gammas: Vec<f64>,
    pub tolerance: f64,
    pub fock_max_dim: usize,
    pub coherent_max_dim: usize,
    pub include_fock: bool,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            js: TABLE_J.to_vec(),
            gammas: TABLE_GAMMA.to_vec(),
            tolerance: 1e-6,
            fock_max_dim: FOCK_MAX_DIM,
            coherent_max_dim: dicke_core::matrix::DEFAULT_MAX_DIM,
            include_fock: true,
        }
    }
}

/// Ground-state convergence of one basis; `None` when the budget runs out.
fn cell(params: &ModelParams, kind: BasisKind, tolerance: f64, max_dim: usize) -> Result<Option<BasisCell>> {
    let policy = CutoffPolicy { budget: Budget::new(max_dim), ..CutoffPolicy::default() };
    match converge(params, kind, 1, tolerance, &policy) {
        Ok(r) => Ok(Some(BasisCell::from(&r))),
        Err(DickeError::NonConvergence { path }) => {
            log::info!("j={} γ={} {kind}: skipped after {} cutoffs", params.j(), params.gamma(), path.len());
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn table1(opts: &TableOptions) -> Result<Vec<TableCell>> {
    let mut out = Vec::new();
    for &j in &opts.js {
        for &gamma in &opts.gammas {
            let p = ModelParams::resonant(gamma, j)?;
            let fock = if opts.include_fock { cell(&p, BasisKind::Fock, opts.tolerance, opts.fock_max_dim)? } else { None };
            let coherent = cell(&p, BasisKind::Coherent, opts.tolerance, opts.coherent_max_dim)?;
            out.push(TableCell { j, gamma, fock, coherent });
        }
    }
    Ok(out)
}

pub fn format_table(cells: &[TableCell]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>5} {:>5} {:>14} {:>8} {:>10} {:>8} {:>10}",
        "j", "gamma", "E0", "n_fock", "t_fock[s]", "n_coh", "t_coh[s]"
    );
    for c in cells {
        let energy = c.energy().map_or("--".to_string(), |e| format!("{e:.5}"));
        let basis = |b: &Option<BasisCell>| match b {
            Some(b) => (b.minimal_cutoff.to_string(), format!("{:.3}", b.wall_time_s)),
            None => ("--".to_string(), "--".to_string()),
        };
        let (nf, tf) = basis(&c.fock);
        let (nc, tc) = basis(&c.coherent);
        let _ = writeln!(s, "{:>5} {:>5} {:>14} {:>8} {:>10} {:>8} {:>10}", c.j, c.gamma, energy, nf, tf, nc, tc);
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub j: f64,
    pub gamma: f64,
    pub basis: BasisKind,
    pub cell: Option<BasisCell>,
}

/// Minimal cutoffs along j at fixed γ, and whether they follow the expected
/// orderings: Fock strictly increasing, coherent non-increasing.
#[derive(Clone, Debug, Serialize)]
pub struct TrendCheck {
    pub gamma: f64,
    pub fock: Vec<(f64, u32)>,
    pub coherent: Vec<(f64, u32)>,
    pub fock_increasing: bool,
    pub coherent_non_increasing: bool,
    pub coherent_decreasing: bool,
}

impl TrendCheck {
    pub fn passed(&self) -> bool {
        self.fock_increasing && self.coherent_non_increasing
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub js: Vec<f64>,
    pub gammas: Vec<f64>,
    pub tolerance: f64,
    pub fock_max_dim: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { js: TABLE_J.to_vec(), gammas: vec![2.0], tolerance: 1e-6, fock_max_dim: FOCK_MAX_DIM }
    }
}

fn trend(gamma: f64, rows: &[BenchRow]) -> TrendCheck {
    let series = |kind: BasisKind| -> Vec<(f64, u32)> {
        rows.iter()
            .filter(|r| r.gamma == gamma && r.basis == kind)
            .filter_map(|r| r.cell.as_ref().map(|c| (r.j, c.minimal_cutoff)))
            .collect()
    };
    let fock = series(BasisKind::Fock);
    let coherent = series(BasisKind::Coherent);
    TrendCheck {
        gamma,
        fock_increasing: fock.len() >= 2 && fock.windows(2).all(|w| w[1].1 > w[0].1),
        coherent_non_increasing: coherent.len() >= 2 && coherent.windows(2).all(|w| w[1].1 <= w[0].1),
        coherent_decreasing: coherent.len() >= 2 && coherent.windows(2).all(|w| w[1].1 < w[0].1),
        fock,
        coherent,
    }
}

pub fn run_bench(opts: &BenchOptions) -> Result<(Vec<BenchRow>, Vec<TrendCheck>)> {
    let mut js = opts.js.clone();
    js.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for &gamma in &opts.gammas {
        for &j in &js {
            let p = ModelParams::resonant(gamma, j)?;
            for (kind, max_dim) in [(BasisKind::Fock, opts.fock_max_dim), (BasisKind::Coherent, dicke_core::matrix::DEFAULT_MAX_DIM)] {
                rows.push(BenchRow { j, gamma, basis: kind, cell: cell(&p, kind, opts.tolerance, max_dim)? });
            }
        }
    }
    let trends = opts.gammas.iter().map(|&g| trend(g, &rows)).collect();
    Ok((rows, trends))
}

pub fn format_bench(rows: &[BenchRow], trends: &[TrendCheck]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>5} {:>5} {:>9} {:>7} {:>6} {:>11} {:>9}",
        "j", "gamma", "basis", "cutoff", "dim", "assembly[s]", "solve[s]"
    );
    for r in rows {
        match &r.cell {
            Some(c) => {
                let _ = writeln!(
                    s,
                    "{:>5} {:>5} {:>9} {:>7} {:>6} {:>11.4} {:>9.4}",
                    r.j, r.gamma, r.basis, c.minimal_cutoff, c.dimension, c.assembly_time_s, c.solve_time_s
                );
            }
            None => {
                let _ = writeln!(s, "{:>5} {:>5} {:>9} {:>7} {:>6} {:>11} {:>9}", r.j, r.gamma, r.basis, "--", "--", "--", "--");
            }
        }
    }
    for t in trends {
        let verdict = if t.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            s,
            "{verdict} gamma={}: fock cutoffs {:?} increasing={}, coherent cutoffs {:?} non-increasing={}",
            t.gamma, t.fock, t.fock_increasing, t.coherent, t.coherent_non_increasing
        );
    }
    s
}

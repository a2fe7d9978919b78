//! γ-sweeps: one observable row per (j, γ, basis, state).

use std::io::Write;

use dicke_core::{converge_solution, measure_all, BasisKind, CutoffPolicy, DickeError, ModelParams};
use dicke_core::matrix::Budget;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{OutputFormat, SweepConfig};
use crate::error::{CliError, Result};

pub const CSV_SCHEMA_LINE: &str = "# dicke-sweep schema=1";
pub const SCHEMA: u32 = 1;

/// Value columns are empty when the point failed; `status` says why.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub j: f64,
    pub omega: f64,
    pub delta: f64,
    pub gamma: f64,
    pub state: usize,
    pub energy: Option<f64>,
    pub gap: Option<f64>,
    pub n_photon: Option<f64>,
    pub n_photon_per_j: Option<f64>,
    pub jz: Option<f64>,
    pub jz_per_j: Option<f64>,
    pub parity: Option<&'static str>,
    pub basis: BasisKind,
    pub cutoff: Option<u32>,
    pub status: String,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub failed_points: usize,
    pub total_points: usize,
}

impl SweepOutcome {
    /// Largest minimal cutoff used for `(j, basis)`.
    pub fn max_cutoff(&self, j: f64, basis: BasisKind) -> Option<u32> {
        self.rows.iter().filter(|r| r.j == j && r.basis == basis).filter_map(|r| r.cutoff).max()
    }
}

fn point(cfg: &SweepConfig, j: f64, gamma: f64, kind: BasisKind) -> Vec<SweepRow> {
    let row = |state: usize| SweepRow {
        j,
        omega: cfg.omega,
        delta: cfg.delta,
        gamma,
        state,
        energy: None,
        gap: None,
        n_photon: None,
        n_photon_per_j: None,
        jz: None,
        jz_per_j: None,
        parity: None,
        basis: kind,
        cutoff: None,
        status: String::new(),
    };
    let failed = |status: &str| {
        (0..cfg.states)
            .map(|s| SweepRow { status: status.to_string(), ..row(s) })
            .collect::<Vec<_>>()
    };
    let policy = CutoffPolicy { budget: Budget::new(cfg.max_dim), ..CutoffPolicy::default() };
    let result = ModelParams::new(cfg.omega, cfg.delta, gamma, j)
        .and_then(|p| converge_solution(&p, kind, cfg.states, cfg.tolerance, &policy).map(|s| (p, s)))
        .and_then(|(p, (report, solution))| Ok((report, measure_all(&solution, &p)?)));
    match result {
        Ok((report, records)) => records
            .into_iter()
            .map(|r| SweepRow {
                energy: Some(r.energy),
                gap: Some(r.gap),
                n_photon: Some(r.photon_number),
                n_photon_per_j: Some(r.photon_per_j),
                jz: Some(r.jz),
                jz_per_j: Some(r.jz_per_j),
                parity: Some(match r.parity {
                    dicke_core::ParityLabel::Even => "even",
                    dicke_core::ParityLabel::Odd => "odd",
                }),
                cutoff: Some(report.minimal_cutoff),
                status: "ok".into(),
                ..row(r.state_index)
            })
            .collect(),
        Err(DickeError::NonConvergence { path }) => {
            log::warn!("j={j} γ={gamma} {kind}: no convergence after {} cutoffs", path.len());
            failed("nonconverged")
        }
        Err(e) => {
            log::warn!("j={j} γ={gamma} {kind}: {e}");
            failed("error")
        }
    }
}

/// Runs every point on a pool of `cfg.threads` workers; rows come back
/// ordered by (j, γ, basis, state) regardless of scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let gammas = cfg.gamma.values();
    let tasks: Vec<(f64, f64, BasisKind)> = cfg
        .js
        .iter()
        .flat_map(|&j| gammas.iter().flat_map(move |&g| cfg.basis.kinds().iter().map(move |&k| (j, g, k))))
        .collect();
    // one eigensolver thread per worker
    faer::set_global_parallelism(faer::Par::Seq);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} worker threads: {e}", cfg.threads)))?;
    let per_point: Vec<Vec<SweepRow>> =
        pool.install(|| tasks.par_iter().map(|&(j, g, k)| point(cfg, j, g, k)).collect());
    let failed_points = per_point.iter().filter(|rows| rows.iter().any(|r| !r.ok())).count();
    Ok(SweepOutcome { rows: per_point.into_iter().flatten().collect(), failed_points, total_points: tasks.len() })
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    schema: u32,
    rows: &'a [SweepRow],
}

pub fn write_json<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &JsonDoc { schema: SCHEMA, rows })?;
    writeln!(out)?;
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Json => write_json(rows, out),
    }
}

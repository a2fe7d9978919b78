//! Oracle suites: the library's fast paths against slow independent references.

use dicke_core::coherent::{overlap_direct_sum, OverlapKernel};
use dicke_core::oracles::{brute_force_hamiltonian, displaced_overlap_series, mean_field, mean_field_numerical};
use dicke_core::spectra::lowest_eigenvalues;
use dicke_core::matrix::Budget;
use dicke_core::{build_coherent_hamiltonian, build_fock_hamiltonian, crossbasis_check, CutoffPolicy, Direction, ModelParams};

use crate::error::Result;

#[derive(Clone, Debug)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn line(name: &'static str, worst: f64, bound: f64) -> CheckLine {
    CheckLine { name, passed: worst <= bound, detail: format!("max deviation {worst:.3e} (bound {bound:.0e})") }
}

pub const KERNEL_G: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 3.5];

/// Worst `|kernel − series|` over `n, n' ≤ max_n` and the given displacements.
pub fn kernel_vs_series(max_n: u32, gs: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for &g in gs {
        let kernel = OverlapKernel::new(g, max_n);
        for n in 0..=max_n {
            for np in 0..=max_n {
                let series = displaced_overlap_series(np, n, -g, 400);
                worst = worst.max((kernel.get(np, n, Direction::RaiseM) - series).abs());
            }
        }
    }
    worst
}

fn brute_force() -> Result<f64> {
    let mut worst = 0.0f64;
    for (gamma, j, cutoff) in [(0.7, 1.5, 8), (1.9, 2.0, 6), (0.2, 0.5, 12)] {
        let p = ModelParams::new(1.1, 0.9, gamma, j)?;
        let h = build_fock_hamiltonian(&p, cutoff, None, &Budget::default())?;
        let b = brute_force_hamiltonian(&p, cutoff)?;
        for r in 0..h.dim() {
            for c in 0..h.dim() {
                worst = worst.max((h.get(r, c) - b[(r, c)]).abs());
            }
        }
    }
    Ok(worst)
}

fn direct_sum() -> f64 {
    // excess of |recurrence − direct sum| over the sum's own error bound
    let mut worst = 0.0f64;
    for &g in &KERNEL_G {
        for n in 0..20 {
            for np in 0..20 {
                let (v, bound) = overlap_direct_sum(np, n, g, Direction::LowerM);
                let fast = dicke_core::overlap(np, n, g, Direction::LowerM);
                worst = worst.max((fast - v).abs() - bound);
            }
        }
    }
    worst.max(0.0)
}

fn zero_splitting() -> Result<f64> {
    let p = ModelParams::new(1.0, 0.0, 1.2, 3.0)?;
    let cutoff = 6;
    let h = build_coherent_hamiltonian(&p, cutoff, &Budget::default())?;
    let mut exact: Vec<f64> = h
        .spec()
        .states()
        .map(|s| p.omega() * (s.n as f64 - p.g().powi(2) * s.m.value().powi(2)))
        .collect();
    exact.sort_by(f64::total_cmp);
    let computed = lowest_eigenvalues(&h, h.dim())?;
    Ok(exact.iter().zip(&computed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

fn mean_field_agreement() -> Result<f64> {
    let mut worst = 0.0f64;
    for gamma in [0.0, 0.3, 0.5, 0.7, 1.0, 2.0] {
        let p = ModelParams::resonant(gamma, 1.0)?;
        worst = worst.max((mean_field(&p).energy_per_j - mean_field_numerical(&p).energy_per_j).abs());
    }
    Ok(worst)
}

fn cross_basis() -> Result<f64> {
    let mut worst = 0.0f64;
    for (gamma, j) in [(0.5, 1.0), (1.0, 2.0), (0.3, 1.5)] {
        let r = crossbasis_check(&ModelParams::resonant(gamma, j)?, 2, 1e-10, &CutoffPolicy::default())?;
        worst = r.differences.iter().cloned().fold(worst, f64::max);
    }
    Ok(worst)
}

pub fn run_checks() -> Result<Vec<CheckLine>> {
    Ok(vec![
        line("fock builder vs brute force", brute_force()?, 1e-13),
        line("overlap kernel vs series", kernel_vs_series(30, &KERNEL_G), 1e-12),
        line("overlap kernel vs direct sum", direct_sum(), 1e-13),
        line("zero splitting spectrum", zero_splitting()?, 1e-12),
        line("mean field closed form vs minimization", mean_field_agreement()?, 1e-9),
        line("fock vs coherent spectrum", cross_basis()?, 1e-8),
    ])
}

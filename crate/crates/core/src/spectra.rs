//! Lowest eigenpairs and the cutoff-escalation loop.

use std::collections::BTreeMap;
use std::time::Instant;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::coherent::build_coherent_hamiltonian;
use crate::error::{DickeError, Result};
use crate::fock::build_fock_hamiltonian;
use crate::matrix::{dot, Budget, HamiltonianMatrix};
use crate::model::{BasisKind, BasisSpec, BasisState, ModelParams, ParityLabel};
use crate::parity::ParityOperator;

/// Eigenvalues closer than this (times `max(1, |E|)`) are treated as one
/// degenerate cluster and re-resolved into parity eigenstates.
pub const NEAR_DEGENERATE: f64 = 1e-6;

/// Residual bound `‖Hv − Ev‖ ≤ RESIDUAL_TOL·max(1, |E|)`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Lowest `k` eigenpairs of one matrix.
#[derive(Clone, Debug)]
pub struct EigenSolution {
    pub spec: BasisSpec,
    pub parity_block: Option<ParityLabel>,
    pub displacement: Option<f64>,
    pub states: Vec<BasisState>,
    pub energies: Vec<f64>,
    /// One vector per energy, on `states`.
    pub vectors: Vec<Vec<f64>>,
}

impl EigenSolution {
    pub fn k(&self) -> usize {
        self.energies.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn gap(&self) -> Option<f64> {
        (self.k() > 1).then(|| self.energies[1] - self.energies[0])
    }

    /// Whether state `i` lies within [`NEAR_DEGENERATE`] of a neighbour.
    pub fn is_near_degenerate(&self, i: usize) -> bool {
        let close = |a: usize, b: usize| {
            (self.energies[a] - self.energies[b]).abs() < NEAR_DEGENERATE * self.energies[a].abs().max(1.0)
        };
        (i > 0 && close(i, i - 1)) || (i + 1 < self.k() && close(i, i + 1))
    }
}

fn solver_error(h: &HamiltonianMatrix, message: impl Into<String>) -> DickeError {
    DickeError::Solver { dim: h.dim(), max_abs: h.max_abs(), message: message.into() }
}

/// Lowest `k` eigenvalues in ascending order, without eigenvectors.
pub fn lowest_eigenvalues(h: &HamiltonianMatrix, k: usize) -> Result<Vec<f64>> {
    check_k(h, k)?;
    let mut values = h
        .entries()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| solver_error(h, format!("{e:?}")))?;
    values.sort_by(f64::total_cmp);
    values.truncate(k);
    Ok(values)
}

fn check_k(h: &HamiltonianMatrix, k: usize) -> Result<()> {
    if k == 0 || k > h.dim() {
        return Err(DickeError::Domain(format!("requested {k} eigenpairs of a {}-dimensional matrix", h.dim())));
    }
    Ok(())
}

/// Lowest `k` eigenpairs.
///
/// Near-degenerate clusters are rotated onto parity eigenstates (and then
/// re-diagonalized inside each parity sector), so every returned vector has
/// definite parity. Each vector's largest-magnitude component is positive.
pub fn solve_lowest(h: &HamiltonianMatrix, k: usize) -> Result<EigenSolution> {
    check_k(h, k)?;
    let eig = h
        .entries()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| solver_error(h, format!("{e:?}")))?;
    let dim = h.dim();
    let u = eig.U();
    let s = eig.S().column_vector();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let all_values: Vec<f64> = order.iter().map(|&i| s[i]).collect();

    // extend past k while the cluster continues
    let mut end = k;
    while end < dim && close(all_values[end - 1], all_values[end]) {
        end += 1;
    }
    let mut vectors: Vec<Vec<f64>> = order[..end].iter().map(|&c| (0..dim).map(|r| u[(r, c)]).collect()).collect();
    let mut energies = all_values[..end].to_vec();

    let parity = if h.parity_block().is_none() { Some(ParityOperator::for_matrix(h)?) } else { None };
    if let Some(parity) = &parity {
        let mut start = 0;
        while start < end {
            let mut stop = start + 1;
            while stop < end && close(energies[stop - 1], energies[stop]) {
                stop += 1;
            }
            if stop - start > 1 {
                resolve_cluster(h, parity, &mut vectors[start..stop], &mut energies[start..stop]);
            }
            start = stop;
        }
    }

    vectors.truncate(k);
    energies.truncate(k);
    for v in &mut vectors {
        fix_sign(v);
    }

    for (e, v) in energies.iter().zip(&vectors) {
        let hv = h.apply(v);
        let residual = hv.iter().zip(v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
        if residual > RESIDUAL_TOL * e.abs().max(1.0) {
            return Err(solver_error(h, format!("residual {residual:.3e} for eigenvalue {e}")));
        }
    }

    Ok(EigenSolution {
        spec: *h.spec(),
        parity_block: h.parity_block(),
        displacement: h.displacement(),
        states: h.states().to_vec(),
        energies,
        vectors,
    })
}

fn close(a: f64, b: f64) -> bool {
    (b - a).abs() < NEAR_DEGENERATE * a.abs().max(1.0)
}

/// Diagonalizes `Π` inside the cluster, then `H` inside each parity sector.
fn resolve_cluster(h: &HamiltonianMatrix, parity: &ParityOperator, vectors: &mut [Vec<f64>], energies: &mut [f64]) {
    let d = vectors.len();
    let pv: Vec<Vec<f64>> = vectors.iter().map(|v| parity.apply(v)).collect();
    let p = Mat::<f64>::from_fn(d, d, |a, b| 0.5 * (dot(&vectors[a], &pv[b]) + dot(&vectors[b], &pv[a])));
    let Ok(peig) = p.self_adjoint_eigen(Side::Lower) else { return };
    let rotated = combine(vectors, peig.U());
    let signs: Vec<f64> = (0..d).map(|i| peig.S().column_vector()[i]).collect();

    let mut resolved: Vec<(f64, Vec<f64>)> = Vec::with_capacity(d);
    for sector in [-1.0, 1.0] {
        let members: Vec<&Vec<f64>> = rotated
            .iter()
            .zip(&signs)
            .filter(|(_, s)| (**s >= 0.0) == (sector > 0.0))
            .map(|(v, _)| v)
            .collect();
        if members.is_empty() {
            continue;
        }
        let hv: Vec<Vec<f64>> = members.iter().map(|v| h.apply(v)).collect();
        let m = members.len();
        let hs = Mat::<f64>::from_fn(m, m, |a, b| 0.5 * (dot(members[a], &hv[b]) + dot(members[b], &hv[a])));
        let Ok(heig) = hs.self_adjoint_eigen(Side::Lower) else { return };
        let owned: Vec<Vec<f64>> = members.into_iter().cloned().collect();
        for v in combine(&owned, heig.U()) {
            let e = h.expectation(&v) / dot(&v, &v);
            resolved.push((e, v));
        }
    }
    resolved.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (slot, (e, v)) in resolved.into_iter().enumerate() {
        energies[slot] = e;
        vectors[slot] = v;
    }
}

fn combine(vectors: &[Vec<f64>], coeffs: faer::MatRef<'_, f64>) -> Vec<Vec<f64>> {
    let dim = vectors[0].len();
    (0..coeffs.ncols())
        .map(|c| {
            let mut out = vec![0.0; dim];
            for (r, v) in vectors.iter().enumerate() {
                let w = coeffs[(r, c)];
                for (o, x) in out.iter_mut().zip(v) {
                    *o += w * x;
                }
            }
            let norm = dot(&out, &out).sqrt();
            out.iter_mut().for_each(|x| *x /= norm);
            out
        })
        .collect()
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// How the cutoff is escalated during convergence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffPolicy {
    /// First cutoff tried; `None` picks the basis default.
    pub start: Option<u32>,
    /// Stride of the coarse pre-scan.
    pub coarse_step: u32,
    /// Stride of the refinement and of the convergence criterion.
    pub step: u32,
    pub max_cutoff: Option<u32>,
    pub budget: Budget,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self { start: None, coarse_step: 5, step: 1, max_cutoff: None, budget: Budget::default() }
    }
}

impl CutoffPolicy {
    /// Fock: `max(2, ⌈G²j²⌉ + 2)`, just above the mean-field photon number.
    /// Coherent: 2.
    pub fn start_for(&self, params: &ModelParams, kind: BasisKind) -> u32 {
        if let Some(s) = self.start {
            return s;
        }
        match kind {
            BasisKind::Fock => {
                let photons = (params.g() * params.j_value()).powi(2);
                2.max((photons - 1e-9).ceil().max(0.0) as u32 + 2)
            }
            BasisKind::Coherent => 2,
        }
    }

    fn allows(&self, params: &ModelParams, cutoff: u32) -> bool {
        let dim = (cutoff as usize + 1) * (params.n_atoms() as usize + 1);
        self.max_cutoff.is_none_or(|m| cutoff <= m) && dim <= self.budget.max_dim
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_STATES: usize = 2;

/// One converged `(j, γ)` point of a cutoff study.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub params: ModelParams,
    pub basis: BasisKind,
    pub k: usize,
    pub tolerance: f64,
    pub minimal_cutoff: u32,
    pub converged_energies: Vec<f64>,
    /// Every evaluated `(cutoff, ground energy)`, ascending in cutoff.
    pub escalation_path: Vec<(u32, f64)>,
    pub dimension: usize,
    pub assembly_time_s: f64,
    pub solve_time_s: f64,
    pub wall_time_s: f64,
}

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ReportJson {
    schema: u32,
    params: ModelParams,
    basis: BasisKind,
    k: usize,
    tolerance: f64,
    minimal_cutoff: u32,
    dimension: usize,
    energies: Vec<f64>,
    escalation: Vec<(u32, f64)>,
    assembly_time_s: f64,
    solve_time_s: f64,
    wall_time_s: f64,
}

impl Serialize for ConvergenceReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ReportJson {
            schema: REPORT_SCHEMA,
            params: self.params,
            basis: self.basis,
            k: self.k,
            tolerance: self.tolerance,
            minimal_cutoff: self.minimal_cutoff,
            dimension: self.dimension,
            energies: self.converged_energies.clone(),
            escalation: self.escalation_path.clone(),
            assembly_time_s: self.assembly_time_s,
            solve_time_s: self.solve_time_s,
            wall_time_s: self.wall_time_s,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConvergenceReport {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = ReportJson::deserialize(deserializer)?;
        Ok(Self {
            params: r.params,
            basis: r.basis,
            k: r.k,
            tolerance: r.tolerance,
            minimal_cutoff: r.minimal_cutoff,
            converged_energies: r.energies,
            escalation_path: r.escalation,
            dimension: r.dimension,
            assembly_time_s: r.assembly_time_s,
            solve_time_s: r.solve_time_s,
            wall_time_s: r.wall_time_s,
        })
    }
}

pub fn build_hamiltonian(params: &ModelParams, kind: BasisKind, cutoff: u32, budget: &Budget) -> Result<HamiltonianMatrix> {
    match kind {
        BasisKind::Fock => build_fock_hamiltonian(params, cutoff, None, budget),
        BasisKind::Coherent => build_coherent_hamiltonian(params, cutoff, budget),
    }
}

struct Escalation<'a> {
    params: &'a ModelParams,
    kind: BasisKind,
    k: usize,
    policy: &'a CutoffPolicy,
    cache: BTreeMap<u32, Vec<f64>>,
    assembly: f64,
    solve: f64,
}

impl Escalation<'_> {
    fn energies(&mut self, cutoff: u32) -> Result<Option<Vec<f64>>> {
        if let Some(e) = self.cache.get(&cutoff) {
            return Ok(Some(e.clone()));
        }
        if !self.policy.allows(self.params, cutoff) {
            return Ok(None);
        }
        let t = Instant::now();
        let h = build_hamiltonian(self.params, self.kind, cutoff, &self.policy.budget)?;
        self.assembly += t.elapsed().as_secs_f64();
        let t = Instant::now();
        let values = lowest_eigenvalues(&h, self.k.min(h.dim()))?;
        self.solve += t.elapsed().as_secs_f64();
        self.cache.insert(cutoff, values.clone());
        Ok(Some(values))
    }

    fn path(&self) -> Vec<(u32, f64)> {
        self.cache.iter().map(|(c, e)| (*c, e[0])).collect()
    }

    fn non_convergence(&self) -> DickeError {
        DickeError::NonConvergence { path: self.path() }
    }

    /// `Some(true)` when `cutoff` and `cutoff + stride` agree within tolerance.
    fn settled(&mut self, cutoff: u32, stride: u32, tol: f64) -> Result<Option<bool>> {
        let Some(lo) = self.energies(cutoff)? else { return Ok(None) };
        let Some(hi) = self.energies(cutoff + stride)? else { return Ok(None) };
        if lo.len() != hi.len() {
            return Ok(Some(false));
        }
        Ok(Some(lo.iter().zip(&hi).all(|(a, b)| (a - b).abs() <= tol)))
    }
}

/// Escalates the cutoff until every tracked energy moves by at most
/// `tolerance` under a further `policy.step` increase, and reports the
/// smallest such cutoff.
pub fn converge(params: &ModelParams, kind: BasisKind, k: usize, tolerance: f64, policy: &CutoffPolicy) -> Result<ConvergenceReport> {
    Ok(converge_solution(params, kind, k, tolerance, policy)?.0)
}

/// [`converge`] plus the eigenvectors at the minimal cutoff.
pub fn converge_solution(
    params: &ModelParams,
    kind: BasisKind,
    k: usize,
    tolerance: f64,
    policy: &CutoffPolicy,
) -> Result<(ConvergenceReport, EigenSolution)> {
    if !(tolerance > 0.0) {
        return Err(DickeError::Domain(format!("tolerance must be positive, got {tolerance}")));
    }
    if k == 0 || policy.step == 0 || policy.coarse_step == 0 {
        return Err(DickeError::Domain("k and cutoff strides must be positive".into()));
    }
    let started = Instant::now();
    let mut esc = Escalation { params, kind, k, policy, cache: BTreeMap::new(), assembly: 0.0, solve: 0.0 };
    let start = policy.start_for(params, kind);
    let step = policy.step;

    // coarse pre-scan
    let mut coarse = start;
    if policy.coarse_step > step {
        loop {
            match esc.settled(coarse, policy.coarse_step, tolerance)? {
                Some(true) => break,
                Some(false) => coarse += policy.coarse_step,
                None => break,
            }
        }
    }

    // refine from the last unsettled coarse point
    let mut cutoff = if coarse > start { coarse.saturating_sub(policy.coarse_step).max(start) } else { start };
    let minimal = loop {
        match esc.settled(cutoff, step, tolerance)? {
            Some(true) => break cutoff,
            Some(false) => cutoff += step,
            None => return Err(esc.non_convergence()),
        }
    };

    let t = Instant::now();
    let h = build_hamiltonian(params, kind, minimal, &policy.budget)?;
    esc.assembly += t.elapsed().as_secs_f64();
    let t = Instant::now();
    let solution = solve_lowest(&h, k.min(h.dim()))?;
    esc.solve += t.elapsed().as_secs_f64();

    let report = ConvergenceReport {
        params: *params,
        basis: kind,
        k,
        tolerance,
        minimal_cutoff: minimal,
        converged_energies: solution.energies.clone(),
        escalation_path: esc.path(),
        dimension: h.dim(),
        assembly_time_s: esc.assembly,
        solve_time_s: esc.solve,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    Ok((report, solution))
}

/// Converged energies of both bases and their per-state differences.
#[derive(Clone, Debug)]
pub struct CrossBasisReport {
    pub fock: ConvergenceReport,
    pub coherent: ConvergenceReport,
    pub differences: Vec<f64>,
    pub passed: bool,
}

pub fn crossbasis_check(params: &ModelParams, k: usize, tolerance: f64, policy: &CutoffPolicy) -> Result<CrossBasisReport> {
    let fock = converge(params, BasisKind::Fock, k, tolerance, policy)?;
    let coherent = converge(params, BasisKind::Coherent, k, tolerance, policy)?;
    let differences: Vec<f64> = fock
        .converged_energies
        .iter()
        .zip(&coherent.converged_energies)
        .map(|(a, b)| (a - b).abs())
        .collect();
    let passed = differences.iter().all(|d| *d <= 10.0 * tolerance);
    Ok(CrossBasisReport { fock, coherent, differences, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HalfInt;

    fn raw(entries: Mat<f64>) -> HamiltonianMatrix {
        let d = entries.nrows();
        let spec = BasisSpec::new(BasisKind::Fock, (d - 1) as u32, HalfInt::from_twice(0));
        let states = spec.states().collect();
        // single spin projection, so parity follows n alone
        HamiltonianMatrix::from_parts(spec, None, None, states, entries)
    }

    #[test]
    fn diagonal_matrix() {
        let h = raw(Mat::from_fn(3, 3, |i, j| if i == j { i as f64 } else { 0.0 }));
        let s = solve_lowest(&h, 2).unwrap();
        assert_eq!(s.energies, vec![0.0, 1.0]);
        assert_eq!(s.vectors[0], vec![1.0, 0.0, 0.0]);
        assert!(solve_lowest(&h, 4).is_err());
        assert!(solve_lowest(&h, 0).is_err());
    }

    #[test]
    fn two_level_split() {
        let g = 0.7;
        let h = raw(Mat::from_fn(2, 2, |i, j| if i != j { g } else { 0.0 }));
        let s = solve_lowest(&h, 2).unwrap();
        assert!((s.energies[0] + g).abs() < 1e-15 && (s.energies[1] - g).abs() < 1e-15);
        for v in &s.vectors {
            let top = v.iter().cloned().fold(f64::MIN, f64::max);
            assert!(top > 0.0);
        }
    }

    #[test]
    fn degenerate_cluster_gets_parity_definite_vectors() {
        // states n = 0, 1 degenerate with opposite parity, plus a mixing-free third
        let h = raw(Mat::from_fn(3, 3, |i, j| if i == j { [1.0, 1.0, 3.0][i] } else { 0.0 }));
        let s = solve_lowest(&h, 2).unwrap();
        let p = ParityOperator::for_matrix(&h).unwrap();
        for v in &s.vectors {
            assert!((p.expectation(v).abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn policy_defaults() {
        let p = ModelParams::resonant(0.0, 5.0).unwrap();
        let pol = CutoffPolicy::default();
        assert_eq!(pol.start_for(&p, BasisKind::Fock), 2);
        let q = ModelParams::resonant(2.0, 5.0).unwrap();
        // G²j² = 1.6·25 = 40
        assert_eq!(pol.start_for(&q, BasisKind::Fock), 42);
        assert_eq!(pol.start_for(&q, BasisKind::Coherent), 2);
    }

    #[test]
    fn zero_coupling_converges_at_smallest_cutoff() {
        for kind in [BasisKind::Fock, BasisKind::Coherent] {
            let p = ModelParams::resonant(0.0, 2.0).unwrap();
            let r = converge(&p, kind, 2, 1e-6, &CutoffPolicy::default()).unwrap();
            assert_eq!(r.minimal_cutoff, 2);
            assert!((r.converged_energies[0] + 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_convergence_carries_path() {
        let p = ModelParams::resonant(1.0, 2.0).unwrap();
        let policy = CutoffPolicy { max_cutoff: Some(12), ..CutoffPolicy::default() };
        match converge(&p, BasisKind::Fock, 2, 1e-9, &policy) {
            Err(DickeError::NonConvergence { path }) => {
                assert!(!path.is_empty());
                assert!(path.windows(2).all(|w| w[0].0 < w[1].0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn report_json_field_names() {
        let p = ModelParams::resonant(0.1, 1.0).unwrap();
        let r = converge(&p, BasisKind::Coherent, 2, 1e-6, &CutoffPolicy::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["schema", "params", "basis", "k", "tolerance", "minimal_cutoff", "energies", "escalation", "wall_time_s"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        for key in ["omega", "delta", "gamma", "j"] {
            assert!(v["params"].get(key).is_some());
        }
        assert_eq!(v["basis"], "coherent");
        assert!(v["escalation"][0].as_array().unwrap().len() == 2);
        let back: ConvergenceReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}

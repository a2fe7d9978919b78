//! Expectation values of eigenstates: photon number, `J_z`, parity.

use serde::{Deserialize, Serialize};

use crate::coherent::{jz_operator_coherent, photon_number_operator_coherent};
use crate::error::{DickeError, Result};
use crate::fock::{jz_fock, photon_number_fock};
use crate::matrix::{Budget, HamiltonianMatrix};
use crate::model::{BasisKind, ModelParams, ParityLabel};
use crate::parity::{label_of, ParityOperator};
use crate::spectra::EigenSolution;

/// Measured properties of one eigenstate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub params: ModelParams,
    pub state_index: usize,
    pub energy: f64,
    /// `E_i − E_0`.
    pub gap: f64,
    pub photon_number: f64,
    pub jz: f64,
    pub photon_per_j: f64,
    pub jz_per_j: f64,
    /// `⟨Π⟩`, ±1 for a parity eigenstate.
    pub parity_expectation: f64,
    pub parity: ParityLabel,
    pub near_degenerate: bool,
    pub basis: BasisKind,
    pub cutoff: u32,
}

/// Operators needed to measure states of one solution.
struct Operators {
    photon: HamiltonianMatrix,
    jz: HamiltonianMatrix,
    parity: Option<ParityOperator>,
}

fn operators(solution: &EigenSolution, params: &ModelParams) -> Result<Operators> {
    let spec = solution.spec;
    if spec.j != params.j() {
        return Err(DickeError::Domain(format!("solution has j = {}, params have j = {}", spec.j, params.j())));
    }
    // the operator builders use the caller's budget; the solution already fits
    let budget = Budget::new(solution.states.len().max(spec.dimension()));
    match spec.kind {
        BasisKind::Fock => Ok(Operators {
            photon: photon_number_fock(spec.j, spec.cutoff, solution.parity_block, &budget)?,
            jz: jz_fock(spec.j, spec.cutoff, solution.parity_block, &budget)?,
            parity: match solution.parity_block {
                None => Some(ParityOperator::for_basis(&spec, &solution.states)?),
                Some(_) => None,
            },
        }),
        BasisKind::Coherent => Ok(Operators {
            photon: photon_number_operator_coherent(params, spec.cutoff, &budget)?,
            jz: jz_operator_coherent(params, spec.cutoff, &budget)?,
            parity: Some(ParityOperator::for_basis(&spec, &solution.states)?),
        }),
    }
}

/// Observables of every state in `solution`.
pub fn measure_all(solution: &EigenSolution, params: &ModelParams) -> Result<Vec<ObservableRecord>> {
    let ops = operators(solution, params)?;
    let j = params.j_value();
    let e0 = solution.ground_energy();
    Ok((0..solution.k())
        .map(|i| {
            let v = &solution.vectors[i];
            let photon_number = ops.photon.expectation(v);
            let jz = ops.jz.expectation(v);
            let parity_expectation = match (&ops.parity, solution.parity_block) {
                (Some(p), _) => p.expectation(v),
                (None, Some(block)) => block.sign(),
                (None, None) => unreachable!("unprojected solution always carries a parity operator"),
            };
            ObservableRecord {
                params: *params,
                state_index: i,
                energy: solution.energies[i],
                gap: solution.energies[i] - e0,
                photon_number,
                jz,
                photon_per_j: photon_number / j,
                jz_per_j: jz / j,
                parity_expectation,
                parity: label_of(parity_expectation),
                near_degenerate: solution.is_near_degenerate(i),
                basis: solution.spec.kind,
                cutoff: solution.spec.cutoff,
            }
        })
        .collect())
}

/// Observables of state `index`.
pub fn measure(solution: &EigenSolution, params: &ModelParams, index: usize) -> Result<ObservableRecord> {
    if index >= solution.k() {
        return Err(DickeError::Domain(format!("state {index} not computed (k = {})", solution.k())));
    }
    Ok(measure_all(solution, params)?.swap_remove(index))
}

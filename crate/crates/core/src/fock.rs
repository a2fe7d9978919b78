//! Dicke Hamiltonian on the truncated Fock ⊗ `|j, m⟩` basis.
//!
//! Matrix elements:
//! `⟨n'; m'|H|n; m⟩ = (nω + mΔ) δ δ + (γ/√N)(√(n+1) δ_{n',n+1} + √n δ_{n',n−1})
//!                    × (c₊(m) δ_{m',m+1} + c₋(m) δ_{m',m−1})`.
//! Both triangle entries are written from the same value, so the result is
//! exactly symmetric.

use faer::Mat;

use crate::error::Result;
use crate::matrix::{Budget, HamiltonianMatrix};
use crate::model::{
    ladder_coeff_minus, ladder_coeff_plus, parity_of, BasisKind, BasisSpec, BasisState, HalfInt, ModelParams,
    ParityLabel,
};

pub fn build_fock_hamiltonian(
    params: &ModelParams,
    cutoff: u32,
    parity: Option<ParityLabel>,
    budget: &Budget,
) -> Result<HamiltonianMatrix> {
    let coupling = params.gamma() / (params.n_atoms() as f64).sqrt();
    assemble(params.j(), cutoff, parity, budget, params.omega(), params.delta(), coupling)
}

/// Both parity blocks of the Fock Hamiltonian.
#[derive(Clone, Debug)]
pub struct ParityBlocks {
    pub even: HamiltonianMatrix,
    pub odd: HamiltonianMatrix,
}

impl ParityBlocks {
    pub fn get(&self, label: ParityLabel) -> &HamiltonianMatrix {
        match label {
            ParityLabel::Even => &self.even,
            ParityLabel::Odd => &self.odd,
        }
    }
}

pub fn build_parity_projected_spectrum(params: &ModelParams, cutoff: u32, budget: &Budget) -> Result<ParityBlocks> {
    Ok(ParityBlocks {
        even: build_fock_hamiltonian(params, cutoff, Some(ParityLabel::Even), budget)?,
        odd: build_fock_hamiltonian(params, cutoff, Some(ParityLabel::Odd), budget)?,
    })
}

/// `a†a` on the Fock basis.
pub fn photon_number_fock(j: HalfInt, cutoff: u32, parity: Option<ParityLabel>, budget: &Budget) -> Result<HamiltonianMatrix> {
    assemble(j, cutoff, parity, budget, 1.0, 0.0, 0.0)
}

/// `J_z` on the Fock basis.
pub fn jz_fock(j: HalfInt, cutoff: u32, parity: Option<ParityLabel>, budget: &Budget) -> Result<HamiltonianMatrix> {
    assemble(j, cutoff, parity, budget, 0.0, 1.0, 0.0)
}

/// `∂H/∂γ = (1/√N)(a† + a)(J₊ + J₋)` on the Fock basis.
pub fn coupling_derivative_fock(
    j: HalfInt,
    cutoff: u32,
    parity: Option<ParityLabel>,
    budget: &Budget,
) -> Result<HamiltonianMatrix> {
    let coupling = 1.0 / (j.twice() as f64).sqrt();
    assemble(j, cutoff, parity, budget, 0.0, 0.0, coupling)
}

fn assemble(
    j: HalfInt,
    cutoff: u32,
    parity: Option<ParityLabel>,
    budget: &Budget,
    omega: f64,
    delta: f64,
    coupling: f64,
) -> Result<HamiltonianMatrix> {
    let spec = BasisSpec::new(BasisKind::Fock, cutoff, j);
    let full_dim = spec.dimension();
    let states: Vec<BasisState> = match parity {
        None => spec.states().collect(),
        Some(p) => spec.states().filter(|s| parity_of(*s, j) == p).collect(),
    };
    budget.check(states.len())?;

    // full index -> block position
    let mut position = vec![usize::MAX; full_dim];
    for (pos, s) in states.iter().enumerate() {
        position[spec.index_of(*s)?] = pos;
    }

    let dim = states.len();
    let mut h = Mat::<f64>::zeros(dim, dim);
    for (col, s) in states.iter().enumerate() {
        h[(col, col)] = s.n as f64 * omega + s.m.value() * delta;
        if coupling == 0.0 || s.n == cutoff {
            continue;
        }
        let photon = ((s.n + 1) as f64).sqrt();
        let up = HalfInt::from_twice(s.m.twice() + 2);
        let down = HalfInt::from_twice(s.m.twice() - 2);
        if s.m < j {
            let row = position[spec.index_of(BasisState::new(s.n + 1, up))?];
            let v = coupling * photon * ladder_coeff_plus(j, s.m)?;
            h[(row, col)] = v;
            h[(col, row)] = v;
        }
        if s.m.twice() > -j.twice() {
            let row = position[spec.index_of(BasisState::new(s.n + 1, down))?];
            let v = coupling * photon * ladder_coeff_minus(j, s.m)?;
            h[(row, col)] = v;
            h[(col, row)] = v;
        }
    }
    Ok(HamiltonianMatrix::from_parts(spec, parity, None, states, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::DickeError;
    use crate::model::HalfInt;
    use crate::oracles::brute_force_hamiltonian;

    fn h(v: f64) -> HalfInt {
        HalfInt::from_f64(v).unwrap()
    }

    #[test]
    fn diagonal_entry() {
        let p = ModelParams::resonant(0.3, 1.0).unwrap();
        let m = build_fock_hamiltonian(&p, 4, None, &Budget::default()).unwrap();
        let i = m.spec().index_of(BasisState::new(2, h(1.0))).unwrap();
        assert_eq!(m.get(i, i), 3.0);
    }

    #[test]
    fn coupling_entry_matches_brute_force() {
        let p = ModelParams::resonant(0.5, 1.0).unwrap();
        let m = build_fock_hamiltonian(&p, 3, None, &Budget::default()).unwrap();
        let a = m.spec().index_of(BasisState::new(0, h(0.0))).unwrap();
        let b = m.spec().index_of(BasisState::new(1, h(-1.0))).unwrap();
        assert!((m.get(a, b) - 0.5).abs() < 1e-15);
        let brute = brute_force_hamiltonian(&p, 3).unwrap();
        assert!((brute[(a, b)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_symmetry_and_selection_rules() {
        let p = ModelParams::new(1.3, 0.7, 0.9, 2.5).unwrap();
        let m = build_fock_hamiltonian(&p, 7, None, &Budget::default()).unwrap();
        assert_eq!(m.max_asymmetry(), 0.0);
        let states = m.states();
        for i in 0..m.dim() {
            for k in 0..m.dim() {
                if i == k || m.get(i, k) == 0.0 {
                    continue;
                }
                let (a, b) = (states[i], states[k]);
                assert_eq!(a.n.abs_diff(b.n), 1);
                assert_eq!((a.m.twice() - b.m.twice()).abs(), 2);
                assert_eq!(parity_of(a, p.j()), parity_of(b, p.j()));
            }
        }
    }

    #[test]
    fn parity_blocks_partition_basis() {
        let p = ModelParams::resonant(0.0, 1.0).unwrap();
        let blocks = build_parity_projected_spectrum(&p, 2, &Budget::default()).unwrap();
        assert_eq!(blocks.even.dim() + blocks.odd.dim(), 9);
        assert!(blocks.even.states().iter().all(|s| parity_of(*s, p.j()) == ParityLabel::Even));
        assert!(blocks.odd.states().iter().all(|s| parity_of(*s, p.j()) == ParityLabel::Odd));
        let pos = blocks
            .even
            .states()
            .iter()
            .position(|s| *s == BasisState::new(0, h(-1.0)))
            .unwrap();
        assert_eq!(blocks.even.get(pos, pos), -1.0);
    }

    #[test]
    fn budget_refuses_large_basis() {
        let p = ModelParams::resonant(1.0, 10.0).unwrap();
        match build_fock_hamiltonian(&p, 999, None, &Budget::new(1000)) {
            Err(DickeError::Resource { dim, .. }) => assert_eq!(dim, 21_000),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn operator_diagonals() {
        let j = h(1.5);
        let n = photon_number_fock(j, 3, None, &Budget::default()).unwrap();
        let z = jz_fock(j, 3, None, &Budget::default()).unwrap();
        for (i, s) in n.states().iter().enumerate() {
            assert_eq!(n.get(i, i), s.n as f64);
            assert_eq!(z.get(i, i), s.m.value());
        }
    }
}

//! The conserved parity `Π = e^{iπΛ}`, `Λ = j + J_z + a†a`, acting on vectors
//! of either basis.

use faer::Mat;

use crate::coherent::SpinFrame;
use crate::error::Result;
use crate::matrix::{dot, HamiltonianMatrix};
use crate::model::{parity_of, BasisKind, BasisSpec, BasisState, ParityLabel};

#[derive(Clone, Debug)]
pub enum ParityOperator {
    /// Fock frame: `Π` is diagonal with entries `(−1)^λ`.
    Diagonal(Vec<f64>),
    /// Coherent frame: `Π|n; m⟩_b = (−1)^n Σ_{m'} P[m', m] |n; m'⟩_b` where `P`
    /// is the pseudospin parity in the primed basis.
    SpinFlip { levels: usize, spin: Mat<f64> },
}

impl ParityOperator {
    pub fn for_matrix(h: &HamiltonianMatrix) -> Result<Self> {
        Self::for_basis(h.spec(), h.states())
    }

    pub fn for_basis(spec: &BasisSpec, states: &[BasisState]) -> Result<Self> {
        match spec.kind {
            BasisKind::Fock => Ok(Self::Diagonal(states.iter().map(|s| parity_of(*s, spec.j).sign()).collect())),
            BasisKind::Coherent => {
                let frame = SpinFrame::new(spec.j)?;
                Ok(Self::SpinFlip { levels: spec.cutoff as usize + 1, spin: frame.spin_parity() })
            }
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Self::Diagonal(signs) => v.iter().zip(signs).map(|(x, s)| x * s).collect(),
            Self::SpinFlip { levels, spin } => {
                let levels = *levels;
                let d = spin.nrows();
                let mut out = vec![0.0; v.len()];
                for to in 0..d {
                    for from in 0..d {
                        let p = spin[(to, from)];
                        if p.abs() < 1e-15 {
                            continue;
                        }
                        for n in 0..levels {
                            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                            out[to * levels + n] += sign * p * v[from * levels + n];
                        }
                    }
                }
                out
            }
        }
    }

    /// `⟨v|Π|v⟩ / ⟨v|v⟩`.
    pub fn expectation(&self, v: &[f64]) -> f64 {
        dot(v, &self.apply(v)) / dot(v, v)
    }
}

/// Parity of a Fock-frame vector given on `states`; `⟨Π⟩` in `[−1, 1]`.
pub fn fock_parity_expectation(j: crate::model::HalfInt, states: &[BasisState], v: &[f64]) -> f64 {
    let num: f64 = states.iter().zip(v).map(|(s, c)| parity_of(*s, j).sign() * c * c).sum();
    num / dot(v, v)
}

pub fn label_of(expectation: f64) -> ParityLabel {
    ParityLabel::from_sign(expectation)
}

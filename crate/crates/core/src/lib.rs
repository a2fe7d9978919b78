//! Exact diagonalization of the finite-N Dicke Hamiltonian
//!
//! `H = ω a†a + Δ J_z + (γ/√N)(a† + a)(J₊ + J₋)`
//!
//! in two bases: the plain Fock ⊗ `|j, m⟩` product basis and a basis of
//! oscillator states displaced in proportion to the pseudospin projection,
//! which needs far fewer photon levels in the superradiant regime.

pub mod coherent;
pub mod error;
pub mod fock;
pub mod matrix;
pub mod model;
pub mod observables;
pub mod oracles;
pub mod parity;
pub mod spectra;

pub use coherent::{build_coherent_hamiltonian, coherent_to_fock, coherent_to_fock_auto, overlap, Direction, OverlapKernel};
pub use error::{DickeError, Result};
pub use fock::{build_fock_hamiltonian, build_parity_projected_spectrum};
pub use matrix::{read_dump, Budget, HamiltonianMatrix, MatrixDump};
pub use model::{
    ladder_coeff_minus, ladder_coeff_plus, parity_of, BasisKind, BasisSpec, BasisState, HalfInt, ModelParams,
    ParityLabel,
};
pub use observables::{measure, measure_all, ObservableRecord};
pub use spectra::{
    build_hamiltonian, converge, converge_solution, crossbasis_check, solve_lowest, ConvergenceReport, CutoffPolicy,
    EigenSolution,
};

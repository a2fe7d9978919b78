use dicke_core::coherent::coupling_derivative_coherent;
use dicke_core::fock::coupling_derivative_fock;
use dicke_core::oracles::{mean_field, BRUTE_FORCE_MAX_DIM};
use dicke_core::*;

fn ground(p: &ModelParams, kind: BasisKind, cutoff: u32) -> (f64, Vec<f64>) {
    let h = build_hamiltonian(p, kind, cutoff, &Budget::default()).unwrap();
    let s = solve_lowest(&h, 1).unwrap();
    (s.energies[0], s.vectors[0].clone())
}

#[test]
fn brute_force_agrees_with_fock_builder() {
    let p = ModelParams::new(0.8, 1.2, 0.7, 1.5).unwrap();
    let h = build_fock_hamiltonian(&p, 9, None, &Budget::default()).unwrap();
    let b = oracles::brute_force_hamiltonian(&p, 9).unwrap();
    assert!(h.dim() <= BRUTE_FORCE_MAX_DIM);
    for r in 0..h.dim() {
        for c in 0..h.dim() {
            assert!((h.get(r, c) - b[(r, c)]).abs() < 1e-14);
        }
    }
}

#[test]
fn hellmann_feynman_both_bases() {
    let step = 1e-4;
    for (gamma, j) in [(0.3, 1.0), (0.8, 2.0), (1.5, 1.5)] {
        let p = ModelParams::resonant(gamma, j).unwrap();
        for kind in [BasisKind::Fock, BasisKind::Coherent] {
            let cutoff = 50;
            let (_, v) = ground(&p, kind, cutoff);
            let op = match kind {
                BasisKind::Fock => coupling_derivative_fock(p.j(), cutoff, None, &Budget::default()).unwrap(),
                BasisKind::Coherent => coupling_derivative_coherent(&p, cutoff, &Budget::default()).unwrap(),
            };
            let analytic = op.expectation(&v);
            let up = ground(&p.set_gamma(gamma + step).unwrap(), kind, cutoff).0;
            let down = ground(&p.set_gamma(gamma - step).unwrap(), kind, cutoff).0;
            let numeric = (up - down) / (2.0 * step);
            assert!((analytic - numeric).abs() <= 1e-3 * numeric.abs(), "{kind} γ={gamma} j={j}: {analytic} vs {numeric}");
        }
    }
}

#[test]
fn parity_projected_blocks_reproduce_full_spectrum() {
    let p = ModelParams::resonant(0.9, 2.0).unwrap();
    let full = spectra::lowest_eigenvalues(&build_fock_hamiltonian(&p, 20, None, &Budget::default()).unwrap(), 6).unwrap();
    let blocks = build_parity_projected_spectrum(&p, 20, &Budget::default()).unwrap();
    let mut merged = spectra::lowest_eigenvalues(&blocks.even, 6).unwrap();
    merged.extend(spectra::lowest_eigenvalues(&blocks.odd, 6).unwrap());
    merged.sort_by(f64::total_cmp);
    for (a, b) in full.iter().zip(&merged) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn mapped_coherent_ground_state_matches_fock_ground_state() {
    let p = ModelParams::resonant(0.7, 1.5).unwrap();
    let (_, c) = ground(&p, BasisKind::Coherent, 30);
    let mapped = coherent_to_fock(&c, &p, 30, 60).unwrap();
    let (_, f) = ground(&p, BasisKind::Fock, 60);
    let overlap: f64 = mapped.values.iter().zip(&f).map(|(a, b)| a * b).sum();
    assert!((overlap.abs() - 1.0).abs() < 1e-8);
}

#[test]
fn mean_field_limit_approached_monotonically() {
    for gamma in [1.0, 2.0] {
        let mf = mean_field(&ModelParams::resonant(gamma, 1.0).unwrap()).energy_per_j;
        let mut prev = f64::INFINITY;
        for j in [5.0, 10.0, 20.0] {
            let p = ModelParams::resonant(gamma, j).unwrap();
            let r = converge(&p, BasisKind::Coherent, 1, 1e-8, &CutoffPolicy::default()).unwrap();
            let dev = (r.converged_energies[0] / j - mf).abs();
            assert!(dev < prev, "γ={gamma} j={j}: {dev} !< {prev}");
            prev = dev;
        }
    }
}

#[test]
fn half_integer_spin_crossbasis() {
    let p = ModelParams::new(1.0, 0.6, 0.8, 2.5).unwrap();
    let r = crossbasis_check(&p, 3, 1e-10, &CutoffPolicy::default()).unwrap();
    assert!(r.passed, "{:?}", r.differences);
}

#[test]
fn escalation_paths_are_variational() {
    let p = ModelParams::resonant(1.0, 2.0).unwrap();
    for kind in [BasisKind::Fock, BasisKind::Coherent] {
        let r = converge(&p, kind, 2, 1e-8, &CutoffPolicy::default()).unwrap();
        assert!(r.escalation_path.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
    }
}

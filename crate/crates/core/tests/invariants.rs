use dicke_core::coherent::{displacement_table, jz_operator_coherent, photon_number_operator_coherent};
use dicke_core::parity::ParityOperator;
use dicke_core::*;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (0.2f64..2.0, 0.0f64..2.0, 0.0f64..2.0, 1i32..=8)
        .prop_map(|(w, d, g, tj)| ModelParams::with_spin(w, d, g, HalfInt::from_twice(tj)).unwrap())
}

fn kind() -> impl Strategy<Value = BasisKind> {
    prop_oneof![Just(BasisKind::Fock), Just(BasisKind::Coherent)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn index_map_round_trip(tj in 0i32..=30, cutoff in 0u32..80, pick in any::<prop::sample::Index>()) {
        let spec = BasisSpec::new(BasisKind::Fock, cutoff, HalfInt::from_twice(tj));
        let i = pick.index(spec.dimension());
        let s = spec.state_of(i).unwrap();
        prop_assert_eq!(spec.index_of(s).unwrap(), i);
        prop_assert_eq!(i, ((s.m.twice() + tj) / 2) as usize * (cutoff as usize + 1) + s.n as usize);
    }

    #[test]
    fn ladder_coefficients_mirror(tj in 1i32..=40, step in 0i32..40) {
        let j = HalfInt::from_twice(tj);
        let m = HalfInt::from_twice(-tj + 2 * (step % tj));
        let up = HalfInt::from_twice(m.twice() + 2);
        prop_assert_eq!(ladder_coeff_plus(j, m).unwrap(), ladder_coeff_minus(j, up).unwrap());
    }

    #[test]
    fn hamiltonians_are_symmetric(p in params(), cutoff in 1u32..14, kind in kind()) {
        let h = build_hamiltonian(&p, kind, cutoff, &Budget::default()).unwrap();
        match kind {
            BasisKind::Fock => prop_assert_eq!(h.max_asymmetry(), 0.0),
            BasisKind::Coherent => prop_assert!(h.max_asymmetry() <= 1e-12),
        }
    }

    #[test]
    fn dump_round_trip(p in params(), cutoff in 1u32..6, kind in kind()) {
        let h = build_hamiltonian(&p, kind, cutoff, &Budget::default()).unwrap();
        let mut buf = Vec::new();
        h.write_dump(&mut buf).unwrap();
        let d = read_dump(buf.as_slice()).unwrap();
        prop_assert_eq!(d.dim, h.dim());
        for r in 0..h.dim() {
            for c in 0..h.dim() {
                prop_assert_eq!(d.get(r, c), h.get(r, c));
            }
        }
    }

    #[test]
    fn kernel_sign_and_transpose(g in 0.0f64..3.5, n in 0u32..60, np in 0u32..60) {
        let raise = overlap(np, n, g, Direction::RaiseM);
        let lower = overlap(np, n, g, Direction::LowerM);
        let sign = if (n + np) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((lower - sign * raise).abs() <= 1e-15);
        prop_assert!((raise - overlap(n, np, g, Direction::LowerM)).abs() <= 1e-15);
        prop_assert!(raise.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn kernel_columns_are_unit_vectors(g in 0.0f64..3.5, n in 0usize..40) {
        let t = displacement_table(g, 400, n + 1);
        let norm: f64 = (0..400).map(|k| t[(k, n)].powi(2)).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn hamiltonian_commutes_with_parity(p in params(), cutoff in 1u32..10, kind in kind(), seed in 0u64..1000) {
        let h = build_hamiltonian(&p, kind, cutoff, &Budget::default()).unwrap();
        let pi = ParityOperator::for_matrix(&h).unwrap();
        let v: Vec<f64> = (0..h.dim()).map(|i| (((i as u64 * 2654435761 + seed) % 1000) as f64) / 500.0 - 1.0).collect();
        let a = h.apply(&pi.apply(&v));
        let b = pi.apply(&h.apply(&v));
        let scale = h.max_abs().max(1.0) * v.len() as f64;
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12 * scale));
    }

    #[test]
    fn ground_energy_non_increasing_in_cutoff(p in params(), kind in kind()) {
        let mut prev = f64::INFINITY;
        for cutoff in 1..12 {
            let h = build_hamiltonian(&p, kind, cutoff, &Budget::default()).unwrap();
            let e = spectra::lowest_eigenvalues(&h, 1).unwrap()[0];
            prop_assert!(e <= prev + 1e-10, "cutoff {}: {} > {}", cutoff, e, prev);
            prev = e;
        }
    }

    #[test]
    fn residual_and_orthonormality(p in params(), kind in kind()) {
        let h = build_hamiltonian(&p, kind, 8, &Budget::default()).unwrap();
        let s = solve_lowest(&h, 4).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let d: f64 = s.vectors[a].iter().zip(&s.vectors[b]).map(|(x, y)| x * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                prop_assert!((d - expected).abs() < 1e-10);
            }
        }
        prop_assert!(s.energies.windows(2).all(|w| w[0] <= w[1] + 1e-12));
    }

    #[test]
    fn observables_within_physical_range(p in params(), kind in kind()) {
        let h = build_hamiltonian(&p, kind, 10, &Budget::default()).unwrap();
        let s = solve_lowest(&h, 2).unwrap();
        for r in measure_all(&s, &p).unwrap() {
            prop_assert!(r.photon_number >= -1e-10);
            prop_assert!(r.jz_per_j.abs() <= 1.0 + 1e-10);
            prop_assert!((r.parity_expectation.abs() - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn coherent_operators_are_symmetric() {
    let p = ModelParams::resonant(1.3, 2.5).unwrap();
    for op in [
        photon_number_operator_coherent(&p, 12, &Budget::default()).unwrap(),
        jz_operator_coherent(&p, 12, &Budget::default()).unwrap(),
    ] {
        assert!(op.max_asymmetry() <= 1e-12);
    }
}

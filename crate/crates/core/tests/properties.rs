use isingquench_core::state::{lambda_to_omega, omega_to_lambda};
use isingquench_core::thermal::canonical_omegas;
use isingquench_core::{diagonalize, ChainSpec, OccupationPattern, ReducedSpectrum, ThermalModel};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn chain() -> impl Strategy<Value = ChainSpec> {
    (
        2usize..=16,
        0.0f64..3.0,
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
        any::<bool>(),
    )
        .prop_map(|(n, delta, alpha, cut, has_cut)| {
            let spec = ChainSpec::new(n, delta, alpha.index(n) + 1, []).unwrap();
            if has_cut {
                spec.cut_bond(cut.index(n - 1) + 1).unwrap()
            } else {
                spec
            }
        })
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lambda_omega_round_trip(lambda in 0.0f64..0.4999) {
        let back = omega_to_lambda(lambda_to_omega(lambda));
        prop_assert!((back - lambda).abs() < 1e-12);
    }

    #[test]
    fn propagator_orthogonal(spec in chain(), t in prop::sample::select(vec![0.1, 1.0, 10.0, 100.0, 1000.0])) {
        let basis = diagonalize(&spec.coupling()).unwrap();
        let m = basis.propagator(t).unwrap().matrix().clone();
        let d = m.nrows();
        prop_assert!(max_abs(&(&m * m.transpose() - DMatrix::identity(d, d))) < 1e-10);
    }

    #[test]
    fn propagator_group_law(spec in chain(), a in -50.0f64..50.0, b in -50.0f64..50.0) {
        let basis = diagonalize(&spec.coupling()).unwrap();
        let lhs = basis.propagator(a + b).unwrap().matrix().clone();
        let rhs = basis.propagator(a).unwrap().matrix() * basis.propagator(b).unwrap().matrix();
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-9);
    }

    #[test]
    fn energies_are_singular_values(spec in chain()) {
        let a = spec.coupling().generator().clone();
        let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
        sv.sort_by(f64::total_cmp);
        let basis = diagonalize(&spec.coupling()).unwrap();
        for (k, e) in basis.energies().iter().enumerate() {
            prop_assert!((sv[2 * k] - e).abs() < 1e-9 && (sv[2 * k + 1] - e).abs() < 1e-9);
        }
    }

    #[test]
    fn pattern_labels_round_trip(bits in prop::collection::vec(any::<bool>(), 1..100)) {
        let p = OccupationPattern::from_bits(bits.clone()).unwrap();
        let again = OccupationPattern::parse(&format!("{p}_b"), bits.len()).unwrap();
        prop_assert_eq!(&again, &p);
        if let Some(d) = p.decimal_label() {
            prop_assert_eq!(OccupationPattern::parse(&format!("{d}_d"), bits.len()).unwrap(), p);
        }
    }

    #[test]
    fn fidelity_ignores_input_order(
        energies in prop::collection::vec(0.01f64..4.0, 1..20),
        beta in 0.0f64..5.0,
        seed in any::<u64>(),
    ) {
        let model = ThermalModel::new(energies.clone()).unwrap();
        let n = energies.len();
        let omegas: Vec<f64> = (0..n).map(|k| ((seed >> (k % 60)) & 0xff) as f64 / 40.0).collect();
        let mut shuffled = omegas.clone();
        shuffled.rotate_left(seed as usize % n);
        shuffled.reverse();
        let f1 = model.classical_fidelity(&canonical_omegas(&omegas), beta).unwrap();
        let f2 = model.classical_fidelity(&canonical_omegas(&shuffled), beta).unwrap();
        prop_assert_eq!(f1, f2);
        prop_assert!(f1 > 0.0 && f1 <= 1.0);
    }

    #[test]
    fn equation_of_state_inverts_thermal_spectra(
        energies in prop::collection::vec(0.05f64..4.0, 1..30),
        beta in 0.01f64..8.0,
    ) {
        let model = ThermalModel::new(energies).unwrap();
        let omegas: Vec<f64> = model.mode_energies().iter().map(|e| beta * e).collect();
        let s = ReducedSpectrum::from_omegas(&omegas).unwrap().entropy();
        prop_assume!(s > 1e-6);
        let fitted = model.fit_beta_eos(s).unwrap();
        prop_assert!((fitted - beta).abs() / beta < 1e-4);
        let f = model.classical_fidelity(&canonical_omegas(&omegas), fitted).unwrap();
        prop_assert!(f > 1.0 - 1e-8);
    }

    #[test]
    fn eos_residual_monotone(energies in prop::collection::vec(0.05f64..4.0, 1..20), b1 in 0.0f64..5.0, b2 in 0.0f64..5.0) {
        let model = ThermalModel::new(energies).unwrap();
        let g = |b: f64| model.log_partition(b).unwrap() + b * model.internal_energy(b).unwrap();
        let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
        prop_assert!(g(hi) <= g(lo) + 1e-12);
    }
}

//! Cross-checks of the Gaussian pipeline against brute-force dense evolution.

use isingquench_core::oracle::{
    dense_entropy, dense_hamiltonian, dense_quasiparticle_state, dense_reduced_density, free_fermion_spectrum,
    DenseEvolver,
};
use isingquench_core::state::left_block;
use isingquench_core::{diagonalize, ChainSpec, CorrelationMatrix, OccupationPattern};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_spec(rng: &mut ChaCha8Rng, n: usize) -> ChainSpec {
    let delta = rng.random_range(0.0..2.0);
    let alpha = rng.random_range(1..=n);
    let mut spec = ChainSpec::new(n, delta, alpha, []).unwrap();
    if rng.random_bool(0.3) {
        spec = spec.cut_bond(rng.random_range(1..n)).unwrap();
    }
    spec
}

#[test]
fn many_body_spectrum_matches_free_fermions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=8 {
        for _ in 0..4 {
            let spec = random_spec(&mut rng, n);
            let dense = dense_hamiltonian(&spec).unwrap().eigenvalues();
            let free = free_fermion_spectrum(&diagonalize(&spec.coupling()).unwrap()).unwrap();
            let err = dense.iter().zip(&free).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-8, "{spec:?}: {err}");
        }
    }
}

#[test]
fn mirror_relabeling_keeps_energies() {
    for n in [5, 8, 11] {
        for alpha in 1..=n {
            let a = diagonalize(&ChainSpec::new(n, 0.7, alpha, []).unwrap().coupling()).unwrap();
            let b = diagonalize(&ChainSpec::new(n, 0.7, n + 1 - alpha, []).unwrap().coupling()).unwrap();
            for (x, y) in a.energies().iter().zip(b.energies()) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn eigenstate_correlations_match_dense_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [3, 5, 6] {
        let spec0 = ChainSpec::uniform(n).unwrap();
        let basis = diagonalize(&spec0.coupling()).unwrap();
        let h = dense_hamiltonian(&spec0).unwrap();
        for _ in 0..4 {
            let pattern = OccupationPattern::from_rng(n, &mut rng).unwrap();
            let psi = dense_quasiparticle_state(&spec0, &basis, &pattern).unwrap();
            let energy = psi.expectation(&h).re;
            let expect = basis.ground_state_energy() + pattern.excitation_energy(&basis);
            assert!((energy - expect).abs() < 1e-8);

            let gamma = CorrelationMatrix::eigenstate(&basis, &pattern).unwrap().gamma();
            let err = (gamma - psi.correlation()).map(|z| z.norm()).max();
            assert!(err < 1e-8, "n={n} pattern={pattern}: {err}");
        }
    }
}

#[test]
fn extreme_patterns_hit_spectrum_edges() {
    let spec0 = ChainSpec::uniform(6).unwrap();
    let basis = diagonalize(&spec0.coupling()).unwrap();
    let dense = dense_hamiltonian(&spec0).unwrap().eigenvalues();
    let c = spec0.coupling();
    let vac = CorrelationMatrix::eigenstate(&basis, &OccupationPattern::vacuum(6).unwrap()).unwrap();
    assert!((vac.energy(&c).unwrap() - dense[0]).abs() < 1e-8);
    let full = CorrelationMatrix::eigenstate(&basis, &OccupationPattern::from_decimal(63, 6).unwrap()).unwrap();
    assert!((full.energy(&c).unwrap() - dense[63]).abs() < 1e-8);
}

#[test]
fn quench_correlations_match_dense_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 6;
    let spec = random_spec(&mut rng, n);
    let spec0 = ChainSpec::uniform(n).unwrap();
    let basis0 = diagonalize(&spec0.coupling()).unwrap();
    let basis = diagonalize(&spec.coupling()).unwrap();
    let pattern = OccupationPattern::from_rng(n, &mut rng).unwrap();
    let psi = dense_quasiparticle_state(&spec0, &basis0, &pattern).unwrap();
    let evolver = DenseEvolver::new(&dense_hamiltonian(&spec).unwrap());
    let g0 = CorrelationMatrix::eigenstate(&basis0, &pattern).unwrap();
    for t in [0.5, 2.0, 10.0] {
        let gamma = g0.evolve(&basis.propagator(t).unwrap()).unwrap().gamma();
        let dense = evolver.evolve(&psi, t).unwrap().correlation();
        let err = (gamma - dense).map(|z| z.norm()).max();
        assert!(err < 1e-8, "t={t}: {err}");
    }
}

#[test]
fn reduced_spectra_match_partial_trace() {
    let n = 8;
    let spec0 = ChainSpec::uniform(n).unwrap();
    let basis0 = diagonalize(&spec0.coupling()).unwrap();
    let spec = ChainSpec::new(n, 1.0, 3, []).unwrap();
    let basis = diagonalize(&spec.coupling()).unwrap();
    let evolver = DenseEvolver::new(&dense_hamiltonian(&spec).unwrap());
    for label in [0u128, 37, 200] {
        let pattern = OccupationPattern::from_decimal(label, n).unwrap();
        let psi = dense_quasiparticle_state(&spec0, &basis0, &pattern).unwrap();
        let g0 = CorrelationMatrix::eigenstate(&basis0, &pattern).unwrap();
        for t in [0.0, 1.7] {
            let sub = g0
                .evolve(&basis.propagator(t).unwrap())
                .unwrap()
                .reduce(&left_block(4))
                .unwrap()
                .mode_spectrum()
                .unwrap();
            let mut gaussian = sub.rho_eigenvalues().unwrap();
            gaussian.sort_by(f64::total_cmp);
            let rho = dense_reduced_density(&evolver.evolve(&psi, t).unwrap(), &left_block(4)).unwrap();
            let dense = rho.eigenvalues();
            let err = gaussian
                .iter()
                .zip(&dense)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-8, "label={label} t={t}: {err}");
            assert!((dense_entropy(&rho).unwrap() - sub.entropy()).abs() < 1e-8);
        }
    }
}

#[test]
fn subsystem_entropy_equals_complement() {
    let n = 10;
    let spec0 = ChainSpec::uniform(n).unwrap();
    let basis0 = diagonalize(&spec0.coupling()).unwrap();
    let basis = diagonalize(&ChainSpec::new(n, 1.0, 2, []).unwrap().coupling()).unwrap();
    let g0 = CorrelationMatrix::eigenstate(&basis0, &OccupationPattern::from_decimal(613, n).unwrap()).unwrap();
    for t in [0.0, 3.0, 25.0] {
        let g = g0.evolve(&basis.propagator(t).unwrap()).unwrap();
        for cut in 1..n {
            let left = g.reduce(&left_block(cut)).unwrap().mode_spectrum().unwrap().entropy();
            let right: Vec<usize> = (cut + 1..=n).collect();
            let right = g.reduce(&right).unwrap().mode_spectrum().unwrap().entropy();
            assert!((left - right).abs() < 1e-8);
        }
    }
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = a.amax() * a.nrows() as f64;
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scaled = a / 2f64.powi(squarings);
    let dim = a.nrows();
    let mut term = DMatrix::<f64>::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn propagator_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..3 {
        let spec = random_spec(&mut rng, 4);
        let c = spec.coupling();
        let basis = diagonalize(&c).unwrap();
        let t = 0.7;
        let reference = expm(&(c.generator() * t));
        let err = (basis.propagator(t).unwrap().matrix() - reference).amax();
        assert!(err < 1e-12, "{err}");
    }
}

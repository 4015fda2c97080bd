//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use ctxgeom::analysis::{haar_basis, random_family};
use ctxgeom::scenarios::CorrelatorBounds;
use ctxgeom::{
    ComplexMatrix, DensityMatrix, HermitianOperator, ProjectorFamily, Scenario, ScenarioParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two random complete families on a shared `C^d`, `d` in 2..=6, with
/// member ranks that may exceed one.
pub fn random_pair(seed: u64) -> (ProjectorFamily, ProjectorFamily) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.gen_range(2..=6);
    let left_size = rng.gen_range(1..=d);
    let right_size = rng.gen_range(1..=d);
    (
        random_family(d, left_size, &mut rng).unwrap(),
        random_family(d, right_size, &mut rng).unwrap(),
    )
}

pub fn haar_unitary(d: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = haar_basis(d, &mut rng).unwrap();
    ComplexMatrix::from_fn(d, |i, j| basis[j].amplitudes()[i])
}

/// A 5-cycle of diagonal +-1 observables on `C^4`; every pair commutes.
pub fn all_diagonal_scenario() -> Scenario {
    let signs: [[f64; 4]; 5] = [
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
        [-1.0, 1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
        [-1.0, -1.0, 1.0, 1.0],
    ];
    let obs = signs
        .iter()
        .map(|s| HermitianOperator::diagonal(s))
        .collect();
    Scenario::cycle(
        "diagonal",
        obs,
        None,
        Some(CorrelatorBounds::KCBS),
        ScenarioParams::Custom,
    )
    .unwrap()
}

/// Diagonal density matrix with uniformly drawn, normalized weights.
pub fn random_diagonal_state(d: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    let w: Vec<f64> = w.iter().map(|x| x / total).collect();
    DensityMatrix::new(HermitianOperator::diagonal(&w)).unwrap()
}

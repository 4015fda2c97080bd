//! Randomized invariants of the overlap geometry and the witnesses.

use ctxgeom::analysis::{merge_trial, random_family, s2_total, DEFAULT_DIMS, DEFAULT_FAMILY_SIZES};
use ctxgeom::overlap::{commutator_identity_sides, pair_overlap, principal_angles};
use ctxgeom::witnesses::{
    chaves_fritz, commutator_witness_d, cycle_correlator, joint_distribution, p_star,
    scenario_contextual_fraction,
};
use ctxgeom::{
    build_chsh, build_kcbs, coarse_grain, context_invariants, hermitian_eig, kcbs_mixing_state,
    overlap_matrix, ChshConfig, ComplexMatrix, DensityMatrix, HermitianOperator, StateVector, C64,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

fn random_density(d: usize, seed: u64, real: bool) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = rng.gen_range(1..=d);
    let mut acc = ComplexMatrix::zeros(d);
    let weights: Vec<f64> = (0..terms).map(|_| rng.gen::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let amps: Vec<C64> = (0..d)
            .map(|_| {
                let im = if real { 0.0 } else { rng.gen::<f64>() - 0.5 };
                C64::new(rng.gen::<f64>() - 0.5, im)
            })
            .collect();
        let v = StateVector::new(amps).unwrap();
        acc = &acc + &v.projector().matrix().scale_real(w / total);
    }
    DensityMatrix::new(HermitianOperator::new(acc)).unwrap()
}

fn random_hermitian(d: usize, seed: u64) -> HermitianOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    HermitianOperator::new(ComplexMatrix::from_fn(d, |_, _| {
        C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigendecomposition_reconstructs(d in 1usize..=6, seed in any::<u64>()) {
        let h = random_hermitian(d, seed);
        let eig = hermitian_eig(&h).unwrap();
        let mut rebuilt = ComplexMatrix::zeros(d);
        for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
            rebuilt = &rebuilt + &v.projector().matrix().scale_real(*lambda);
        }
        prop_assert!(rebuilt.hs_distance(h.matrix()) < 1e-10);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let again = hermitian_eig(&h).unwrap();
        prop_assert_eq!(again.values, eig.values);
        prop_assert_eq!(again.vectors, eig.vectors);
    }

    #[test]
    fn energy_bounded_by_mu_constant(seed in any::<u64>()) {
        let (left, right) = common::random_pair(seed);
        let inv = context_invariants(&left, &right).unwrap();
        prop_assert!(inv.e <= inv.c_mu * inv.c_mu + 1e-12);
        prop_assert!(inv.e > 0.0 && inv.e <= 1.0 + 1e-12);
        prop_assert!(inv.s2_bits >= -1e-12);
    }

    #[test]
    fn overlap_matrix_is_unitarily_invariant(seed in any::<u64>(), useed in any::<u64>()) {
        let (left, right) = common::random_pair(seed);
        let u = common::haar_unitary(left.dim(), useed);
        let before = overlap_matrix(&left, &right).unwrap();
        let after = overlap_matrix(&left.conjugated(&u).unwrap(), &right.conjugated(&u).unwrap()).unwrap();
        for (a, b) in before.entries.iter().flatten().zip(after.entries.iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn commutator_identity_holds(seed in any::<u64>()) {
        let (left, right) = common::random_pair(seed);
        let (lhs, rhs) = commutator_identity_sides(&left, &right).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn overlap_row_and_column_sums(seed in any::<u64>()) {
        // Σ_j Tr[(P Q_j)^2] <= Σ_j Tr[P Q_j] = rank P.
        let (left, right) = common::random_pair(seed);
        let t = overlap_matrix(&left, &right).unwrap();
        let d = left.dim() as f64;
        for (row, p) in t.entries.iter().zip(left.members()) {
            prop_assert!(row.iter().sum::<f64>() * d <= p.rank() as f64 + 1e-12);
        }
    }

    #[test]
    fn rank_one_overlap_is_cos4_of_principal_angle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(2..=6);
        let left = random_family(d, d, &mut rng).unwrap();
        let right = random_family(d, d, &mut rng).unwrap();
        for p in left.members() {
            for q in right.members() {
                let theta = principal_angles(p, q)[0];
                let via_angle = theta.cos().powi(4) / d as f64;
                let via_inner = p.basis()[0].inner(&q.basis()[0]).norm_sqr().powi(2) / d as f64;
                let direct = pair_overlap(p, q).unwrap();
                prop_assert!((direct - via_angle).abs() <= 1e-12);
                prop_assert!((direct - via_inner).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn coarse_graining_keeps_completeness_and_raises_energy(seed in any::<u64>()) {
        let (left, right) = common::random_pair(seed);
        prop_assume!(left.len() >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let i = rng.gen_range(0..left.len());
        let j = (i + rng.gen_range(1..left.len())) % left.len();
        let merged = coarse_grain(&left, i, j).unwrap();
        prop_assert_eq!(merged.len(), left.len() - 1);
        prop_assert!(merged.sum().hs_distance(&ComplexMatrix::identity(left.dim())) < 1e-10);
        prop_assert_eq!(merged.ranks().iter().sum::<usize>(), left.dim());
        let before = overlap_matrix(&left, &right).unwrap().total();
        let after = overlap_matrix(&merged, &right).unwrap().total();
        prop_assert!(after - before >= -1e-12);
    }

    #[test]
    fn merge_delta_equals_cross_term(trial in any::<u64>(), seed in any::<u64>()) {
        let r = merge_trial(trial, &DEFAULT_DIMS, &DEFAULT_FAMILY_SIZES, seed).unwrap();
        prop_assert!(r.delta_e >= -1e-12);
        prop_assert!((r.delta_e - r.cross_term).abs() <= 1e-12);
    }

    #[test]
    fn joint_distributions_are_normalized(seed in any::<u64>(), a in 0usize..5) {
        let s = build_kcbs().unwrap();
        let rho = random_density(3, seed, false);
        let obs = s.observables();
        let dist = joint_distribution(&obs[a], &obs[(a + 1) % 5], &rho).unwrap();
        prop_assert!((dist.total() - 1.0).abs() <= 1e-10);
        prop_assert!(dist.outcomes.iter().all(|(_, p)| *p >= 0.0));
    }

    #[test]
    fn commutator_witness_is_nonnegative_and_silent_on_real_states(seed in any::<u64>()) {
        let kcbs = build_kcbs().unwrap();
        let (per, total) = commutator_witness_d(&kcbs, &random_density(3, seed, false)).unwrap();
        prop_assert!(per.iter().all(|&x| x >= 0.0) && total >= 0.0);
        // All CHSH observables are entrywise real; so is the state.
        let chsh = build_chsh(ChshConfig::entropic_optimal()).unwrap();
        let (_, total) = commutator_witness_d(&chsh, &random_density(4, seed, true)).unwrap();
        prop_assert_eq!(total, 0.0);
    }

    #[test]
    fn diagonal_scenario_is_silent(seed in any::<u64>()) {
        let s = common::all_diagonal_scenario();
        prop_assert!(s2_total(&s).unwrap().abs() <= 1e-12);
        let rho = common::random_diagonal_state(s.dim(), seed);
        let report = ctxgeom::witness_report(&s, &rho).unwrap();
        prop_assert!(report.chi.unwrap() >= -3.0 - 1e-12);
        prop_assert_eq!(report.cf, Some(0.0));
        prop_assert!(report.bc_max <= 1e-12);
        prop_assert_eq!(report.d_total, 0.0);
    }
}

#[test]
fn kcbs_correlator_is_affine_in_p() {
    let s = build_kcbs().unwrap();
    let chi = |p: f64| cycle_correlator(&s, &kcbs_mixing_state(p).unwrap()).unwrap();
    let (c0, c1) = (chi(0.0), chi(1.0));
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        assert!((chi(p) - (p * c1 + (1.0 - p) * c0)).abs() <= 1e-10);
    }
}

#[test]
fn contextual_fraction_onset_matches_threshold() {
    let s = build_kcbs().unwrap();
    let ps = p_star();
    for offset in [-0.05, -0.01, -1e-4, 1e-4, 0.01, 0.05] {
        let rho = kcbs_mixing_state(ps + offset).unwrap();
        let cf = scenario_contextual_fraction(&s, &rho).unwrap();
        let chi = cycle_correlator(&s, &rho).unwrap();
        assert_eq!(cf > 0.0, chi < -3.0, "offset {offset}");
        assert_eq!(cf > 0.0, offset > 0.0);
    }
}

#[test]
fn chaves_fritz_is_cyclically_symmetric_on_the_mixing_family() {
    let s = build_kcbs().unwrap();
    for i in 0..=10 {
        let rho = kcbs_mixing_state(i as f64 / 10.0).unwrap();
        let values: Vec<f64> = (0..5).map(|k| chaves_fritz(&s, &rho, k).unwrap()).collect();
        assert!(
            values.iter().all(|v| (v - values[0]).abs() <= 1e-10),
            "{values:?}"
        );
    }
}

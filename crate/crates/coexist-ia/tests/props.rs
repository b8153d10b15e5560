//! Property tests over randomized instances.

use coexist_ia::channel::{LinkSet, NoiseSpec, TargetKind, TargetModel};
use coexist_ia::linalg::CMat;
use coexist_ia::rng::complex_normal;
use coexist_ia::scenario::{Scenario, UserSpec};
use coexist_ia::signal::{build_modulation_matrix, CarrierGrid};
use coexist_ia::solver::{leakage, swap_reciprocal, Solution};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_solution(seed: u64, n_sc: usize, dofs: &[usize]) -> (Solution, LinkSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users: Vec<UserSpec> = dofs
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if i == dofs.len() - 1 {
                UserSpec::radar(n_sc, d)
            } else {
                UserSpec::comm(n_sc, d, true)
            }
        })
        .collect();
    let scenario = Scenario::new(n_sc, users, NoiseSpec::new(1.0)).unwrap();
    let model = TargetModel::new(TargetKind::SwerlingII, 1.0);
    let links = scenario.draw_links(&model, &mut rng);
    let mats = |rng: &mut ChaCha8Rng| -> Vec<CMat> {
        dofs.iter()
            .map(|&d| {
                let mut m = CMat::from_fn(n_sc, d, |_, _| complex_normal(rng, 1.0));
                m.normalize_columns();
                m
            })
            .collect()
    };
    let p = mats(&mut rng);
    let q = mats(&mut rng);
    (Solution::from_parts(p, q), links)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ofdm_unitarity_holds_for_any_size(n in 1usize..=64) {
        let grid = CarrierGrid::ofdm(n, 15_000.0, 1);
        let b = build_modulation_matrix(&grid).unwrap();
        let defect = b.mat().adjoint().mul(b.mat()).sub(&CMat::identity(n)).frob_norm();
        prop_assert!(defect <= 1e-12);
    }

    #[test]
    fn reciprocity_swap_involutes_and_preserves_leakage(
        seed in 0u64..1_000,
        n_sc in 2usize..=8,
    ) {
        let dofs = [1usize, 1, n_sc.min(3)];
        let (sol, links) = random_solution(seed, n_sc, &dofs);
        let (swapped, rlinks) = swap_reciprocal(&sol, &links);
        let (back, blinks) = swap_reciprocal(&swapped, &rlinks);
        prop_assert_eq!(&back, &sol);
        prop_assert_eq!(&blinks, &links);
        let l0 = leakage(&sol, &links);
        let l1 = leakage(&swapped, &rlinks);
        prop_assert!((l0 - l1).abs() <= 1e-12 * l0.max(1.0));
    }

    #[test]
    fn random_cross_links_always_leak(seed in 0u64..1_000) {
        // generic position: exact alignment has probability zero
        let (sol, links) = random_solution(seed, 4, &[1, 1, 2]);
        prop_assert!(leakage(&sol, &links) > 0.0);
    }
}

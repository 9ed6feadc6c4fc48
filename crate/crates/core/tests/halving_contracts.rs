mod common;

use common::contracts::{check_query, dense_instance};
use common::*;
use motorcycle_graph::halving::{
    plain_min_length, COrientedHalving, CountingHalving, Halving, HalvingMode, HalvingStrategy, MidpointHalving,
};
use motorcycle_graph::io::generate::GenKind;
use motorcycle_graph::scalar::Exact;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn counting_halves_within_half(seed in any::<u64>(), n in 3usize..24) {
        let riders = dense_instance(seed, GenKind::UniformRandom, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = rng.gen_range(1..=n);
        if let Some((p, q)) = random_segment(&mut rng, &riders, i) {
            check_query(&CountingHalving, &riders, i, &p, &q).map_err(TestCaseError::fail)?;
        }
    }

    #[test]
    fn coriented_halves_within_three_quarters(seed in any::<u64>(), n in 3usize..24, c in 2usize..9) {
        let riders = dense_instance(seed, GenKind::COriented { c }, n);
        let strategy = COrientedHalving::new(&riders);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = rng.gen_range(1..=n);
        if let Some((p, q)) = random_segment(&mut rng, &riders, i) {
            check_query(&strategy, &riders, i, &p, &q).map_err(TestCaseError::fail)?;
        }
    }

    #[test]
    fn midpoint_splits_avoid_crossings(seed in any::<u64>(), n in 3usize..24) {
        let riders = dense_instance(seed, GenKind::UniformRandom, n);
        let strategy = MidpointHalving { min_length: plain_min_length::<Exact>(11) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = rng.gen_range(1..=n);
        if let Some((p, q)) = random_segment(&mut rng, &riders, i) {
            match strategy.halve(&riders, i, &p, &q).unwrap() {
                Halving::Split(h) => prop_assert!(!is_crossing(&riders, i, &h)),
                Halving::TooShort => prop_assert!(size(&riders, i, &p, &q) <= 1),
            }
        }
    }
}

#[test]
fn nested_midpoints_terminate_within_the_length_bound() {
    // Length 1, floor 2^(-2w+1): a piece is split while it is at least the
    // floor, so at most 2w nested halvings.
    let w = 8;
    let floor = plain_min_length::<Exact>(w);
    let riders = vec![rider(1, (0, 0), (1, 0)), rider(2, (0, 1), (0, 1))];
    let strategy = MidpointHalving { min_length: floor };
    let (mut p, q) = (pt(0, 0), pt(1, 0));
    let mut steps = 0;
    loop {
        match strategy.halve(&riders, 1, &p, &q).unwrap() {
            Halving::Split(h) => {
                p = h;
                steps += 1;
            }
            Halving::TooShort => break,
        }
        assert!(steps <= 2 * w as usize, "too many halvings");
    }
    assert_eq!(steps, 2 * w as usize);
    assert_eq!(HalvingMode::Midpoint.rho(), (1, 2));
}

mod common;

use motorcycle_graph::geom::{prepare, Instance, Motorcycle, Point2, Vec2};
use motorcycle_graph::halving::HalvingMode;
use motorcycle_graph::io::generate::{generate, GenKind};
use motorcycle_graph::oracle::{simulate, Outcome};
use motorcycle_graph::rayshoot::ShooterKind;
use motorcycle_graph::scalar::{Exact, Scalar};
use motorcycle_graph::solver::{compute_motorcycle_graph, Solver, SolverConfig};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mode() -> impl Strategy<Value = HalvingMode> {
    prop_oneof![Just(HalvingMode::Counting), Just(HalvingMode::Midpoint), Just(HalvingMode::COriented)]
}

fn shooter() -> impl Strategy<Value = ShooterKind> {
    prop_oneof![Just(ShooterKind::Linear), Just(ShooterKind::Grid)]
}

fn kind() -> impl Strategy<Value = GenKind> {
    prop_oneof![
        Just(GenKind::UniformRandom),
        (2usize..6).prop_map(|c| GenKind::COriented { c }),
        Just(GenKind::CollinearStress),
    ]
}

fn map_points(inst: &Instance<Exact>, f: impl Fn(&Point2<Exact>) -> Point2<Exact>) -> Instance<Exact> {
    let ms = inst
        .motorcycles
        .iter()
        .map(|m| {
            let mut out = Motorcycle::new(m.id, f(&m.start), m.velocity.clone());
            out.dest = m.dest.as_ref().map(&f);
            out.dest_kind = m.dest_kind;
            out
        })
        .collect();
    Instance::new(ms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tentative_tracks_never_cross(seed in any::<u64>(), n in 2usize..20, kind in kind(), mode in mode(), shooter in shooter()) {
        let inst = generate::<Exact>(kind, n, seed);
        let cfg = SolverConfig::new(mode).with_shooter(shooter);
        let mut s = Solver::new(&inst, cfg, None).unwrap();
        while s.step().unwrap() {
            let v = s.verify_state();
            prop_assert!(v.is_empty(), "{:?}", v);
        }
    }

    #[test]
    fn confirmed_prefixes_are_final(seed in any::<u64>(), n in 2usize..20, kind in kind(), mode in mode()) {
        let inst = generate::<Exact>(kind, n, seed);
        let want = simulate(&prepare(&inst).unwrap()).unwrap();
        let mut s = Solver::new(&inst, SolverConfig::new(mode), None).unwrap();
        while s.step().unwrap() {
            // Every confirmed point lies on the rider's final track.
            for m in s.riders() {
                let st = s.state(m.id);
                if !st.started {
                    continue;
                }
                let end = &want.rider(m.id).kappa;
                prop_assert!(m.param(&st.c) <= m.param(end), "rider {} confirmed past its end", m.id);
            }
        }
    }

    #[test]
    fn solver_equals_oracle(seed in any::<u64>(), n in 2usize..24, kind in kind(), mode in mode(), shooter in shooter()) {
        let inst = generate::<Exact>(kind, n, seed);
        let want = simulate(&prepare(&inst).unwrap()).unwrap();
        let got = compute_motorcycle_graph(&inst, SolverConfig::new(mode).with_shooter(shooter)).unwrap().result;
        prop_assert_eq!(got.first_difference(&want), None);
    }

    #[test]
    fn translation_and_scaling_commute_with_the_graph(seed in any::<u64>(), n in 2usize..16, k in 1i64..5, dx in -50i64..50, dy in -50i64..50) {
        let inst = generate::<Exact>(GenKind::UniformRandom, n, seed);
        let inst = prepare(&inst).unwrap();
        let k = Exact::from_i64(k);
        let shift = Vec2::from_i64(dx, dy);
        let f = |p: &Point2<Exact>| p.scale(&k) + shift.clone();
        let moved = map_points(&inst, f);
        // Velocities are not scaled, so times scale by k as well.
        let a = compute_motorcycle_graph(&inst, SolverConfig::default()).unwrap().result;
        let b = compute_motorcycle_graph(&moved, SolverConfig::default()).unwrap().result;
        for (ra, rb) in a.riders.iter().zip(&b.riders) {
            prop_assert_eq!(&f(&ra.kappa), &rb.kappa);
            prop_assert_eq!(&ra.outcome, &rb.outcome);
            prop_assert_eq!(ra.t_final.clone() * k.clone(), rb.t_final.clone());
        }
    }

    #[test]
    fn start_order_does_not_matter(seed in any::<u64>(), n in 2usize..16, kind in kind(), mode in mode()) {
        let inst = prepare(&generate::<Exact>(kind, n, seed)).unwrap();
        // New id of old rider k + 1 is perm[k] + 1.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
        let mut ms = inst.motorcycles.clone();
        for (k, m) in ms.iter_mut().enumerate() {
            m.id = perm[k] + 1;
        }
        ms.sort_by_key(|m| m.id);
        let relabelled = Instance::new(ms);
        let a = compute_motorcycle_graph(&inst, SolverConfig::new(mode)).unwrap().result;
        let b = compute_motorcycle_graph(&relabelled, SolverConfig::new(mode)).unwrap().result;
        for k in 0..n {
            let (ra, rb) = (a.rider(k + 1), b.rider(perm[k] + 1));
            prop_assert_eq!(&ra.kappa, &rb.kappa);
            prop_assert_eq!(&ra.t_final, &rb.t_final);
            let mapped = match ra.outcome {
                Outcome::CrashedInto(j) => Outcome::CrashedInto(perm[j - 1] + 1),
                o => o,
            };
            prop_assert_eq!(mapped, rb.outcome);
        }
    }
}

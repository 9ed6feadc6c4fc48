//! Seeded instance generators. The same kind, size and seed always give the
//! same instance.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{Instance, Motorcycle, Point2, Vec2};
use crate::scalar::Scalar;

/// Directions for c-oriented instances, pairwise non-parallel.
pub const DIRECTIONS: [(i64, i64); 12] = [
    (1, 0),
    (0, 1),
    (1, 1),
    (1, -1),
    (2, 1),
    (1, 2),
    (2, -1),
    (1, -2),
    (3, 1),
    (1, 3),
    (3, -1),
    (1, -3),
];

/// Bit width declared by the integer generators.
pub const INTEGER_BITS: u32 = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    /// Integer starts in [-1000, 1000]², velocities in [-10, 10]².
    UniformRandom,
    /// Velocities are positive multiples of the first `c` entries of
    /// [`DIRECTIONS`]; every direction is used once `n >= c`.
    COriented { c: usize },
    /// Most riders share a handful of lines, driving towards and after
    /// each other.
    CollinearStress,
    /// The stack-growth family for halving with spawns; `n = 1 + 2k` for
    /// `k` levels.
    NestedFig8,
}

impl GenKind {
    pub fn parse(s: &str, c: usize) -> Option<Self> {
        match s {
            "uniform-random" => Some(GenKind::UniformRandom),
            "c-oriented" => Some(GenKind::COriented { c }),
            "collinear-stress" => Some(GenKind::CollinearStress),
            "nested-fig8" => Some(GenKind::NestedFig8),
            _ => None,
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenKind::UniformRandom => f.write_str("uniform-random"),
            GenKind::COriented { .. } => f.write_str("c-oriented"),
            GenKind::CollinearStress => f.write_str("collinear-stress"),
            GenKind::NestedFig8 => f.write_str("nested-fig8"),
        }
    }
}

pub fn generate<S: Scalar>(kind: GenKind, n: usize, seed: u64) -> Instance<S> {
    let n = n.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = match kind {
        GenKind::UniformRandom => uniform(&mut rng, n, 1000, 10),
        GenKind::COriented { c } => c_oriented(&mut rng, n, c),
        GenKind::CollinearStress => collinear_stress(&mut rng, n),
        GenKind::NestedFig8 => nested_fig8(n.saturating_sub(1) / 2),
    };
    if kind != GenKind::NestedFig8 {
        // Every coordinate is an integer of magnitude at most 1000.
        inst.bit_width = Some(INTEGER_BITS);
    }
    inst
}

fn distinct_start(rng: &mut ChaCha8Rng, used: &mut HashSet<(i64, i64)>, r: i64) -> (i64, i64) {
    loop {
        let p = (rng.gen_range(-r..=r), rng.gen_range(-r..=r));
        if used.insert(p) {
            return p;
        }
    }
}

/// Random instance with distinct integer starts.
pub fn uniform<S: Scalar>(rng: &mut ChaCha8Rng, n: usize, range: i64, vrange: i64) -> Instance<S> {
    let mut used = HashSet::new();
    let ms = (1..=n)
        .map(|id| {
            let (x, y) = distinct_start(rng, &mut used, range);
            let v = loop {
                let v = (rng.gen_range(-vrange..=vrange), rng.gen_range(-vrange..=vrange));
                if v != (0, 0) {
                    break v;
                }
            };
            Motorcycle::new(id, Point2::from_i64(x, y), Vec2::from_i64(v.0, v.1))
        })
        .collect();
    Instance::new(ms)
}

fn c_oriented<S: Scalar>(rng: &mut ChaCha8Rng, n: usize, c: usize) -> Instance<S> {
    let c = c.clamp(1, DIRECTIONS.len());
    let mut used = HashSet::new();
    let ms = (1..=n)
        .map(|id| {
            let (x, y) = distinct_start(rng, &mut used, 1000);
            let k = if id <= c { id - 1 } else { rng.gen_range(0..c) };
            let speed = rng.gen_range(1..=3);
            let (dx, dy) = DIRECTIONS[k];
            Motorcycle::new(id, Point2::from_i64(x, y), Vec2::from_i64(speed * dx, speed * dy))
        })
        .collect();
    Instance::new(ms)
}

fn collinear_stress<S: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Instance<S> {
    let lines = (n / 4).max(1);
    let bases: Vec<((i64, i64), (i64, i64))> = (0..lines)
        .map(|_| {
            let base = (rng.gen_range(-200..=200), rng.gen_range(-200..=200));
            let dir = *DIRECTIONS.choose(rng).expect("non-empty");
            (base, dir)
        })
        .collect();
    let mut used = HashSet::new();
    let ms = (1..=n)
        .map(|id| {
            // One rider in five is free to cut across the lines.
            if rng.gen_ratio(1, 5) {
                let (x, y) = distinct_start(rng, &mut used, 200);
                let (dx, dy) = *DIRECTIONS.choose(rng).expect("non-empty");
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                return Motorcycle::new(id, Point2::from_i64(x, y), Vec2::from_i64(sign * dx, sign * dy));
            }
            let ((bx, by), (dx, dy)) = bases[rng.gen_range(0..lines)];
            let start = loop {
                let k = rng.gen_range(-40..=40);
                let p = (bx + k * dx, by + k * dy);
                if used.insert(p) {
                    break p;
                }
            };
            let speed = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
            Motorcycle::new(
                id,
                Point2::from_i64(start.0, start.1),
                Vec2::from_i64(speed * dx, speed * dy),
            )
        })
        .collect();
    Instance::new(ms)
}

/// Rider 1 drives slowly along the x-axis. Level `m` has two parents that
/// meet head-on above the axis at time `m`; with velocity-sum spawning the
/// child drives straight down and crosses rider 1's track, so the crossings
/// appear from the far end inwards, one per level.
pub fn nested_fig8<S: Scalar>(k: usize) -> Instance<S> {
    let k = k as i64;
    let x = |m: i64| 2 * (k + 1) * 3i64.pow((k - m) as u32);
    let x1 = if k > 0 { x(1) } else { 2 };
    let y = x1 + 2;
    let mut ms = vec![Motorcycle::new(1, Point2::from_i64(0, 0), Vec2::new(S::one() / S::from_i64(y), S::zero()))
        .with_dest(Point2::from_i64(x1 + 1, 0))];
    for m in 1..=k {
        let id = ms.len() + 1;
        ms.push(Motorcycle::new(id, Point2::from_i64(x(m) - m, y + m), Vec2::from_i64(1, -1)));
        ms.push(Motorcycle::new(id + 1, Point2::from_i64(x(m) + m, y + m), Vec2::from_i64(-1, -1)));
    }
    Instance::new(ms)
}

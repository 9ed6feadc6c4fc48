//! Helpers shared by the integration tests and the acceptance runner. The
//! brute-force counts here are written from scratch rather than reusing the
//! library's own crossing routines.

#![allow(dead_code)]

use motorcycle_graph::geom::{Motorcycle, Point2, Vec2};
use motorcycle_graph::scalar::{parse_rational, Exact, Scalar};
use num_traits::{Signed, Zero};
use rand::Rng;

pub fn q(s: &str) -> Exact {
    parse_rational(s).expect("valid literal")
}

pub fn pt(x: i64, y: i64) -> Point2<Exact> {
    Vec2::from_i64(x, y)
}

pub fn rider(id: usize, s: (i64, i64), v: (i64, i64)) -> Motorcycle<Exact> {
    Motorcycle::new(id, pt(s.0, s.1), pt(v.0, v.1))
}

/// Meeting point of the lines `a + s u` and `b + t w` by Cramer's rule.
pub fn meet(a: &Point2<Exact>, u: &Point2<Exact>, b: &Point2<Exact>, w: &Point2<Exact>) -> Option<Point2<Exact>> {
    let det = u.y.clone() * w.x.clone() - u.x.clone() * w.y.clone();
    if det.is_zero() {
        return None;
    }
    let (dx, dy) = (b.x.clone() - a.x.clone(), b.y.clone() - a.y.clone());
    let s = (dy.clone() * w.x.clone() - dx.clone() * w.y.clone()) / det;
    Some(Vec2::new(a.x.clone() + s.clone() * u.x.clone(), a.y.clone() + s * u.y.clone()))
}

/// Distinct crossings of rider `i`'s line with the other lines on the
/// closed segment `pq`.
pub fn brute_crossings(riders: &[Motorcycle<Exact>], i: usize, p: &Point2<Exact>, q: &Point2<Exact>) -> Vec<Point2<Exact>> {
    let me = &riders[i - 1];
    let d = Vec2::new(q.x.clone() - p.x.clone(), q.y.clone() - p.y.clone());
    let len2 = d.x.clone() * d.x.clone() + d.y.clone() * d.y.clone();
    let mut out: Vec<(Exact, Point2<Exact>)> = Vec::new();
    for o in riders.iter().filter(|o| o.id != i) {
        let Some(c) = meet(&me.start, &me.velocity, &o.start, &o.velocity) else {
            continue;
        };
        let t = ((c.x.clone() - p.x.clone()) * d.x.clone() + (c.y.clone() - p.y.clone()) * d.y.clone()) / len2.clone();
        let on_line = ((c.x.clone() - p.x.clone()) * d.y.clone() - (c.y.clone() - p.y.clone()) * d.x.clone()).is_zero();
        if on_line && !t.is_negative() && t <= Exact::from_i64(1) && !out.iter().any(|(_, x)| *x == c) {
            out.push((t, c));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, c)| c).collect()
}

pub fn size(riders: &[Motorcycle<Exact>], i: usize, p: &Point2<Exact>, q: &Point2<Exact>) -> usize {
    brute_crossings(riders, i, p, q).len()
}

/// Whether some other non-parallel line passes through `h`.
pub fn is_crossing(riders: &[Motorcycle<Exact>], i: usize, h: &Point2<Exact>) -> bool {
    let me = &riders[i - 1];
    riders.iter().filter(|o| o.id != i).any(|o| {
        let par = (me.velocity.x.clone() * o.velocity.y.clone() - me.velocity.y.clone() * o.velocity.x.clone()).is_zero();
        let on = ((h.x.clone() - o.start.x.clone()) * o.velocity.y.clone()
            - (h.y.clone() - o.start.y.clone()) * o.velocity.x.clone())
        .is_zero();
        !par && on
    })
}

/// `ceil(num * k / den)`.
pub fn ceil_ratio(num: u32, den: u32, k: usize) -> usize {
    (num as usize * k).div_ceil(den as usize)
}

/// A random segment `pq` on rider `i`'s line holding at least one crossing,
/// with ends at random rational parameters.
pub fn random_segment<R: Rng>(rng: &mut R, riders: &[Motorcycle<Exact>], i: usize) -> Option<(Point2<Exact>, Point2<Exact>)> {
    let me = &riders[i - 1];
    for _ in 0..20 {
        let a = Exact::new(rng.gen_range(-400..400).into(), rng.gen_range(1..8).into());
        let b = a.clone() + Exact::new(rng.gen_range(1..600).into(), rng.gen_range(1..8).into());
        let p = Vec2::new(me.start.x.clone() + a.clone() * me.velocity.x.clone(), me.start.y.clone() + a * me.velocity.y.clone());
        let q = Vec2::new(me.start.x.clone() + b.clone() * me.velocity.x.clone(), me.start.y.clone() + b * me.velocity.y.clone());
        if size(riders, i, &p, &q) > 0 {
            return Some((p, q));
        }
    }
    None
}

pub mod cases;
pub mod contracts;
pub mod induced;

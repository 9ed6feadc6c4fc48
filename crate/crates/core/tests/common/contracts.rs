//! The split-ratio contract of a halving strategy, checked by brute force.

use motorcycle_graph::geom::{Motorcycle, Point2};
use motorcycle_graph::halving::{Halving, HalvingStrategy};
use motorcycle_graph::io::generate::{generate, GenKind};
use motorcycle_graph::scalar::{Exact, Scalar};

use super::{ceil_ratio, is_crossing, size};

/// A generated instance with coordinates divided by 100 and rounded, so
/// crossings are dense and often coincide.
pub fn dense_instance(seed: u64, kind: GenKind, n: usize) -> Vec<Motorcycle<Exact>> {
    let mut inst = generate::<Exact>(kind, n, seed);
    let hundred = Exact::from_i64(100);
    for m in &mut inst.motorcycles {
        m.start.x = (m.start.x.clone() / hundred.clone()).round();
        m.start.y = (m.start.y.clone() / hundred.clone()).round();
    }
    inst.motorcycles
}

/// `|ph|, |hq| <= ceil(rho |pq|)`, `h` not a crossing, and progress when
/// `|pq| >= 2`.
pub fn check_query(
    strategy: &dyn HalvingStrategy<Exact>,
    riders: &[Motorcycle<Exact>],
    i: usize,
    p: &Point2<Exact>,
    q: &Point2<Exact>,
) -> Result<(), String> {
    let (num, den) = strategy.mode().rho();
    let k = size(riders, i, p, q);
    let h = match strategy.halve(riders, i, p, q).map_err(|e| e.to_string())? {
        Halving::Split(h) => h,
        Halving::TooShort => return Err(format!("no split of a segment holding {k} crossings")),
    };
    let (ph, hq) = (size(riders, i, p, &h), size(riders, i, &h, q));
    let bound = ceil_ratio(num, den, k);
    if is_crossing(riders, i, &h) {
        return Err("h is a crossing".into());
    }
    if ph > bound || hq > bound {
        return Err(format!("|ph| = {ph}, |hq| = {hq}, |pq| = {k}, bound {bound}"));
    }
    if k >= 2 && (ph >= k || hq >= k) {
        return Err(format!("no progress: {ph} and {hq} of {k}"));
    }
    Ok(())
}

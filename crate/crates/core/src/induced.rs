//! Motorcycle graphs induced by polygons: one rider per reflex vertex,
//! moving like that vertex when the polygon shrinks, walled in by the edges.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geom::{
    in_open_segment, on_closed_segment, orient, BBox, DestKind, Instance, Motorcycle, Point2,
    Vector2, Wall,
};
use crate::scalar::Scalar;
use crate::spawn::SpawnPolicy;

/// Outer ring counterclockwise, holes clockwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon<S> {
    pub outer: Vec<Point2<S>>,
    pub holes: Vec<Vec<Point2<S>>>,
}

/// Edge `k` of ring `r` runs from vertex `k` to vertex `k + 1`. Edge ids are
/// 1-based and count through the outer ring first, then each hole.
impl<S: Scalar> Polygon<S> {
    pub fn new(outer: Vec<Point2<S>>) -> Self {
        Polygon {
            outer,
            holes: Vec::new(),
        }
    }

    pub fn rings(&self) -> impl Iterator<Item = &Vec<Point2<S>>> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    /// All edges in id order.
    pub fn edges(&self) -> Vec<(Point2<S>, Point2<S>)> {
        let mut out = Vec::new();
        for ring in self.rings() {
            for k in 0..ring.len() {
                out.push((ring[k].clone(), ring[(k + 1) % ring.len()].clone()));
            }
        }
        out
    }

    fn edge_id(&self, ring: usize, k: usize) -> usize {
        let before: usize = self.rings().take(ring).map(|r| r.len()).sum();
        let len = self.rings().nth(ring).map_or(0, |r| r.len());
        before + (k % len) + 1
    }

    pub fn validate(&self) -> Result<()> {
        for (r, ring) in self.rings().enumerate() {
            if ring.len() < 3 {
                return Err(Error::InvalidInput(format!("ring {r} has fewer than 3 vertices")));
            }
            for k in 0..ring.len() {
                if ring[k].approx_eq(&ring[(k + 1) % ring.len()]) {
                    return Err(Error::InvalidInput(format!(
                        "ring {r} has a zero-length edge at vertex {k}"
                    )));
                }
            }
            let area = signed_area2(ring);
            let want = if r == 0 { Ordering::Greater } else { Ordering::Less };
            if area.sign() != want {
                return Err(Error::InvalidInput(format!(
                    "ring {r} must be {}",
                    if r == 0 { "counterclockwise" } else { "clockwise" }
                )));
            }
        }
        let edges = self.edges();
        for a in 0..edges.len() {
            for b in a + 1..edges.len() {
                if edges_conflict(&edges[a], &edges[b]) {
                    return Err(Error::InvalidInput(format!(
                        "edges {} and {} intersect",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        for (h, hole) in self.holes.iter().enumerate() {
            if !point_in_ring(&hole[0], &self.outer) {
                return Err(Error::InvalidInput(format!("hole {h} is outside the outer ring")));
            }
        }
        Ok(())
    }

    /// Whether `p` lies in the closed polygon.
    pub fn contains(&self, p: &Point2<S>) -> bool {
        if self
            .edges()
            .iter()
            .any(|(a, b)| on_closed_segment(p, a, b))
        {
            return true;
        }
        point_in_ring(p, &self.outer) && !self.holes.iter().any(|h| point_in_ring(p, h))
    }

    /// Whether the closed segment `pq` lies in the closed polygon.
    pub fn contains_segment(&self, p: &Point2<S>, q: &Point2<S>) -> bool {
        if !self.contains(p) || !self.contains(q) {
            return false;
        }
        // Split at every edge crossing and vertex on the segment, then test
        // the middle of each piece.
        let mut cuts: Vec<S> = vec![S::zero(), S::one()];
        let d = q.clone() - p.clone();
        let d2 = d.norm2();
        if d2.is_approx_zero() {
            return true;
        }
        for (a, b) in self.edges() {
            for v in [&a, &b] {
                if on_closed_segment(v, p, q) {
                    cuts.push((v.clone() - p.clone()).dot(&d) / d2.clone());
                }
            }
            let e = b.clone() - a.clone();
            let den = d.cross(&e);
            if den.is_approx_zero() {
                continue;
            }
            let ap = a.clone() - p.clone();
            let t = ap.cross(&e) / den.clone();
            let u = ap.cross(&d) / den;
            let inside = |x: &S| x.sign() != Ordering::Less && x.approx_cmp(&S::one()) != Ordering::Greater;
            if inside(&t) && inside(&u) {
                cuts.push(t);
            }
        }
        cuts.sort();
        cuts.windows(2).all(|w| {
            if w[0].approx_eq(&w[1]) {
                return true;
            }
            let mid = (w[0].clone() + w[1].clone()).half();
            self.contains(&p.lerp(q, &mid))
        })
    }
}

fn signed_area2<S: Scalar>(ring: &[Point2<S>]) -> S {
    let mut a = S::zero();
    for k in 0..ring.len() {
        a = a + ring[k].cross(&ring[(k + 1) % ring.len()]);
    }
    a
}

fn edges_conflict<S: Scalar>(e: &(Point2<S>, Point2<S>), f: &(Point2<S>, Point2<S>)) -> bool {
    let shared = [(&e.0, &f.0), (&e.0, &f.1), (&e.1, &f.0), (&e.1, &f.1)]
        .iter()
        .filter(|(a, b)| a.approx_eq(b))
        .count();
    let (o1, o2) = (orient(&e.0, &e.1, &f.0), orient(&e.0, &e.1, &f.1));
    if o1 == Ordering::Equal && o2 == Ordering::Equal {
        // Collinear neighbours may only share their common vertex.
        return in_open_segment(&f.0, &e.0, &e.1)
            || in_open_segment(&f.1, &e.0, &e.1)
            || in_open_segment(&e.0, &f.0, &f.1)
            || in_open_segment(&e.1, &f.0, &f.1)
            || shared == 2;
    }
    if shared == 1 {
        return false;
    }
    let (o3, o4) = (orient(&f.0, &f.1, &e.0), orient(&f.0, &f.1, &e.1));
    if o1 != o2 && o3 != o4 {
        return true;
    }
    in_open_segment(&f.0, &e.0, &e.1)
        || in_open_segment(&f.1, &e.0, &e.1)
        || in_open_segment(&e.0, &f.0, &f.1)
        || in_open_segment(&e.1, &f.0, &f.1)
        || shared > 0 && o1 == Ordering::Equal && o2 == Ordering::Equal
}

/// Even-odd test; points on the boundary give an unspecified answer.
fn point_in_ring<S: Scalar>(p: &Point2<S>, ring: &[Point2<S>]) -> bool {
    let mut inside = false;
    for k in 0..ring.len() {
        let a = &ring[k];
        let b = &ring[(k + 1) % ring.len()];
        let above_a = a.y > p.y;
        let above_b = b.y > p.y;
        if above_a == above_b {
            continue;
        }
        // x of the edge at height p.y, compared without division.
        let lhs = (p.x.clone() - a.x.clone()) * (b.y.clone() - a.y.clone());
        let rhs = (b.x.clone() - a.x.clone()) * (p.y.clone() - a.y.clone());
        let left_of_edge = if b.y > a.y { lhs < rhs } else { lhs > rhs };
        if left_of_edge {
            inside = !inside;
        }
    }
    inside
}

/// `(ring, index)` of every vertex with an interior angle above π.
pub fn find_reflex_vertices<S: Scalar>(poly: &Polygon<S>) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (r, ring) in poly.rings().enumerate() {
        let n = ring.len();
        for k in 0..n {
            let prev = &ring[(k + n - 1) % n];
            let next = &ring[(k + 1) % n];
            if prev.approx_eq(&ring[k]) || next.approx_eq(&ring[k]) {
                return Err(Error::InvalidInput(format!(
                    "ring {r} has a zero-length edge at vertex {k}"
                )));
            }
            let din = ring[k].clone() - prev.clone();
            let dout = next.clone() - ring[k].clone();
            if din.cross(&dout).sign() == Ordering::Less {
                out.push((r, k));
            }
        }
    }
    Ok(out)
}

/// Unit normal pointing to the left of `dir`, which is the interior side of
/// every edge of a correctly oriented polygon.
pub fn inward_normal<S: Scalar>(dir: &Vector2<S>) -> Result<Vector2<S>> {
    let len = dir.norm2().sqrt().ok_or_else(|| {
        Error::InvalidInput(format!(
            "edge direction ({}, {}) has an irrational length; use the float backend",
            dir.x, dir.y
        ))
    })?;
    if len.is_approx_zero() {
        return Err(Error::InvalidInput("zero-length edge".into()));
    }
    Ok(Vector2::new(-dir.y.clone() / len.clone(), dir.x.clone() / len))
}

/// Velocity of the vertex between an edge with direction `prev_dir` and
/// the next one with direction `next_dir` when both move inward at unit
/// speed: the `v` with `n1·v = n2·v = 1`.
pub fn reflex_velocity<S: Scalar>(prev_dir: &Vector2<S>, next_dir: &Vector2<S>) -> Result<Vector2<S>> {
    let n1 = inward_normal(prev_dir)?;
    let n2 = inward_normal(next_dir)?;
    let den = S::one() + n1.dot(&n2);
    if den.is_approx_zero() {
        return Err(Error::InvalidInput("antiparallel edges meet at a needle vertex".into()));
    }
    Ok((n1 + n2).scale(&(S::one() / den)))
}

/// One rider per reflex vertex, the edges as walls, destinations unset.
pub fn induced_instance<S: Scalar>(poly: &Polygon<S>) -> Result<Instance<S>> {
    poly.validate()?;
    let rings: Vec<&Vec<Point2<S>>> = poly.rings().collect();
    let mut riders = Vec::new();
    for (r, k) in find_reflex_vertices(poly)? {
        let ring = rings[r];
        let n = ring.len();
        let prev = &ring[(k + n - 1) % n];
        let next = &ring[(k + 1) % n];
        let v = reflex_velocity(&(ring[k].clone() - prev.clone()), &(next.clone() - ring[k].clone()))?;
        let mut m = Motorcycle::new(riders.len() + 1, ring[k].clone(), v);
        m.edges = Some((poly.edge_id(r, k + n - 1), poly.edge_id(r, k)));
        riders.push(m);
    }
    let walls = poly
        .edges()
        .into_iter()
        .map(|(a, b)| Wall::new(a, b))
        .collect();
    Ok(Instance::new(riders).with_walls(walls))
}

/// Spawns the rider for the reflex vertex that appears when two riders
/// meet head on: its edges are the outer edges of the pair.
#[derive(Clone, Debug)]
pub struct InducedSpawn<S> {
    pub edges: Vec<(Point2<S>, Point2<S>)>,
    pub bounds: BBox<S>,
}

impl<S: Scalar> InducedSpawn<S> {
    pub fn new(poly: &Polygon<S>) -> Self {
        let edges = poly.edges();
        let bounds = BBox::around(edges.iter().map(|e| &e.0))
            .expect("validated polygons have vertices")
            .inflated();
        InducedSpawn { edges, bounds }
    }

    fn dir(&self, e: usize) -> Vector2<S> {
        let (a, b) = &self.edges[e - 1];
        b.clone() - a.clone()
    }
}

impl<S: Scalar> SpawnPolicy<S> for InducedSpawn<S> {
    fn spawn(
        &self,
        point: &Point2<S>,
        time: &S,
        a: &Motorcycle<S>,
        b: &Motorcycle<S>,
    ) -> Result<Vec<Motorcycle<S>>> {
        let (Some((pa, na)), Some((pb, nb))) = (a.edges, b.edges) else {
            return Ok(Vec::new());
        };
        let heading = a.velocity.clone() + b.velocity.clone();
        for (prev, next) in [(pa, nb), (pb, na)] {
            let (dp, dn) = (self.dir(prev), self.dir(next));
            if dp.cross(&dn).sign() != Ordering::Less {
                continue;
            }
            let v = reflex_velocity(&dp, &dn)?;
            if v.dot(&heading).sign() != Ordering::Greater {
                continue;
            }
            let mut m = Motorcycle::new(0, point.clone(), v).with_t0(time.clone());
            m.dest = Some(self.bounds.exit_point(point, &m.velocity));
            m.dest_kind = DestKind::Box;
            m.edges = Some((prev, next));
            return Ok(vec![m]);
        }
        Ok(Vec::new())
    }
}

/// Random rectilinear polygons and their slope-rational variants.
pub mod random {
    use super::*;
    use rand::Rng;

    /// A polygon made of `cols` unit-width columns with random bottoms and
    /// tops, scaled by 2 so every coordinate is an even integer.
    pub fn histogram<S: Scalar, R: Rng>(rng: &mut R, cols: usize, height: i64) -> Polygon<S> {
        let cols = cols.max(1);
        let height = height.max(3);
        let mut bot: Vec<i64> = Vec::with_capacity(cols);
        let mut top: Vec<i64> = Vec::with_capacity(cols);
        for c in 0..cols {
            loop {
                let b = rng.gen_range(0..height - 1);
                let t = rng.gen_range(b + 1..=height);
                let ok = c == 0 || b.max(bot[c - 1]) < t.min(top[c - 1]);
                if ok {
                    bot.push(b);
                    top.push(t);
                    break;
                }
            }
        }
        let mut ring: Vec<(i64, i64)> = Vec::new();
        ring.push((0, bot[0]));
        for c in 0..cols {
            ring.push((c as i64 + 1, bot[c]));
            if c + 1 < cols {
                ring.push((c as i64 + 1, bot[c + 1]));
            }
        }
        for c in (0..cols).rev() {
            ring.push((c as i64 + 1, top[c]));
            ring.push((c as i64, top[c]));
            if c > 0 {
                ring.push((c as i64, top[c - 1]));
            }
        }
        let ring = simplify(ring);
        Polygon::new(
            ring.into_iter()
                .map(|(x, y)| Point2::from_i64(2 * x, 2 * y))
                .collect(),
        )
    }

    /// Drop repeated and straight-through vertices.
    fn simplify(mut ring: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
        ring.dedup();
        while ring.len() > 1 && ring.first() == ring.last() {
            ring.pop();
        }
        loop {
            let n = ring.len();
            let straight = (0..n).find(|&k| {
                let (a, b, c) = (ring[(k + n - 1) % n], ring[k], ring[(k + 1) % n]);
                (b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0) == 0
            });
            match straight {
                Some(k) => {
                    ring.remove(k);
                }
                None => return ring,
            }
        }
    }

    /// Rotate by the angle with cosine 3/5 and sine 4/5.
    pub fn rotate_345<S: Scalar>(poly: &Polygon<S>) -> Polygon<S> {
        let (c, s) = (S::from_i64(3) / S::from_i64(5), S::from_i64(4) / S::from_i64(5));
        let rot = |p: &Point2<S>| {
            Point2::new(
                c.clone() * p.x.clone() - s.clone() * p.y.clone(),
                s.clone() * p.x.clone() + c.clone() * p.y.clone(),
            )
        };
        Polygon {
            outer: poly.outer.iter().map(rot).collect(),
            holes: poly.holes.iter().map(|h| h.iter().map(rot).collect()).collect(),
        }
    }

    /// Replace some convex corners by a short cut whose direction has
    /// length 5, keeping unit normals rational. Needs edges of length at
    /// least 2 along the axes, as produced by [`histogram`].
    pub fn cut_corners<S: Scalar, R: Rng>(rng: &mut R, poly: &Polygon<S>) -> Polygon<S> {
        let ring = &poly.outer;
        let n = ring.len();
        let unit = S::one() / S::from_i64(5);
        let mut out = Vec::with_capacity(2 * n);
        for k in 0..n {
            let prev = &ring[(k + n - 1) % n];
            let next = &ring[(k + 1) % n];
            let din = ring[k].clone() - prev.clone();
            let dout = next.clone() - ring[k].clone();
            if din.cross(&dout).sign() == Ordering::Greater && rng.gen_bool(0.5) {
                let lin = din.norm2().sqrt().expect("axis-aligned edges");
                let lout = dout.norm2().sqrt().expect("axis-aligned edges");
                let (a, b) = if rng.gen_bool(0.5) { (3, 4) } else { (4, 3) };
                let back = din.scale(&(unit.clone() * S::from_i64(a) / lin));
                let ahead = dout.scale(&(unit.clone() * S::from_i64(b) / lout));
                out.push(ring[k].clone() - back);
                out.push(ring[k].clone() + ahead);
            } else {
                out.push(ring[k].clone());
            }
        }
        Polygon::new(out)
    }
}

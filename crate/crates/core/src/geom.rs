//! Points, riders, walls and the static preprocessing of an instance.

use std::cmp::Ordering;
use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

pub type Point2<S> = Vec2<S>;
pub type Vector2<S> = Vec2<S>;

impl<S: Scalar> Vec2<S> {
    pub fn new(x: S, y: S) -> Self {
        Vec2 { x, y }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        Vec2::new(S::from_i64(x), S::from_i64(y))
    }

    pub fn zero() -> Self {
        Vec2::new(S::zero(), S::zero())
    }

    pub fn scale(&self, k: &S) -> Self {
        Vec2::new(self.x.clone() * k.clone(), self.y.clone() * k.clone())
    }

    pub fn dot(&self, o: &Self) -> S {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone()
    }

    pub fn cross(&self, o: &Self) -> S {
        self.x.clone() * o.y.clone() - self.y.clone() * o.x.clone()
    }

    pub fn norm2(&self) -> S {
        self.dot(self)
    }

    pub fn neg(&self) -> Self {
        Vec2::new(-self.x.clone(), -self.y.clone())
    }

    pub fn midpoint(&self, o: &Self) -> Self {
        Vec2::new(
            (self.x.clone() + o.x.clone()).half(),
            (self.y.clone() + o.y.clone()).half(),
        )
    }

    /// `self + t (o - self)`.
    pub fn lerp(&self, o: &Self, t: &S) -> Self {
        self.clone() + (o.clone() - self.clone()).scale(t)
    }

    pub fn approx_eq(&self, o: &Self) -> bool {
        self.x.approx_eq(&o.x) && self.y.approx_eq(&o.y)
    }

    pub fn is_approx_zero(&self) -> bool {
        self.x.is_approx_zero() && self.y.is_approx_zero()
    }

    /// Lexicographic order under the tolerance predicate.
    pub fn approx_cmp(&self, o: &Self) -> Ordering {
        self.x.approx_cmp(&o.x).then_with(|| self.y.approx_cmp(&o.y))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl<S: Scalar> Add for Vec2<S> {
    type Output = Vec2<S>;
    fn add(self, o: Vec2<S>) -> Vec2<S> {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Scalar> Sub for Vec2<S> {
    type Output = Vec2<S>;
    fn sub(self, o: Vec2<S>) -> Vec2<S> {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

/// Sign of `a*b - c*d` under the tolerance predicate, comparing the two
/// products so the tolerance scales with their magnitude.
pub fn sign_of_difference<S: Scalar>(ab: S, cd: S) -> Ordering {
    ab.approx_cmp(&cd)
}

/// Orientation of `c` relative to the directed line `a -> b`.
pub fn orient<S: Scalar>(a: &Point2<S>, b: &Point2<S>, c: &Point2<S>) -> Ordering {
    let u = b.clone() - a.clone();
    let w = c.clone() - a.clone();
    sign_of_difference(u.x * w.y, u.y * w.x)
}

/// Whether two direction vectors are parallel.
pub fn parallel<S: Scalar>(u: &Vector2<S>, w: &Vector2<S>) -> bool {
    sign_of_difference(u.x.clone() * w.y.clone(), u.y.clone() * w.x.clone()) == Ordering::Equal
}

/// Where a rider's destination came from. Decides the outcome tag when the
/// rider stops there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DestKind {
    Given,
    Wall,
    Box,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Motorcycle<S> {
    pub id: usize,
    pub start: Point2<S>,
    pub velocity: Vector2<S>,
    /// `None` until the bounding box assigns one.
    pub dest: Option<Point2<S>>,
    pub dest_kind: DestKind,
    pub t0: S,
    /// Defining polygon edges, induced instances only.
    pub edges: Option<(usize, usize)>,
}

impl<S: Scalar> Motorcycle<S> {
    pub fn new(id: usize, start: Point2<S>, velocity: Vector2<S>) -> Self {
        Motorcycle {
            id,
            start,
            velocity,
            dest: None,
            dest_kind: DestKind::Given,
            t0: S::zero(),
            edges: None,
        }
    }

    pub fn with_dest(mut self, dest: Point2<S>) -> Self {
        self.dest = Some(dest);
        self.dest_kind = DestKind::Given;
        self
    }

    pub fn with_t0(mut self, t0: S) -> Self {
        self.t0 = t0;
        self
    }

    /// Destination, which must have been assigned.
    pub fn d(&self) -> &Point2<S> {
        self.dest
            .as_ref()
            .expect("destination assigned by preprocessing")
    }

    /// Ray parameter of `p`, i.e. the `λ` with `p = s + λ v`. Does not check
    /// that `p` is on the line.
    pub fn param(&self, p: &Point2<S>) -> S {
        (p.clone() - self.start.clone()).dot(&self.velocity) / self.velocity.norm2()
    }

    pub fn point_at(&self, lambda: &S) -> Point2<S> {
        self.start.clone() + self.velocity.scale(lambda)
    }

    /// Whether `p` lies on the supporting line.
    pub fn on_line(&self, p: &Point2<S>) -> bool {
        let w = p.clone() - self.start.clone();
        sign_of_difference(w.x * self.velocity.y.clone(), w.y * self.velocity.x.clone())
            == Ordering::Equal
    }

    /// Whether `p` lies on the closed segment from the start to the destination.
    pub fn on_segment(&self, p: &Point2<S>) -> bool {
        if !self.on_line(p) {
            return false;
        }
        let l = self.param(p);
        l.sign() != Ordering::Less && l.approx_cmp(&self.param(self.d())) != Ordering::Greater
    }

    pub fn supporting_line_eq(&self, other: &Self) -> bool {
        parallel(&self.velocity, &other.velocity) && self.on_line(&other.start)
    }
}

/// Time at which `m` reaches `p`.
pub fn tau<S: Scalar>(m: &Motorcycle<S>, p: &Point2<S>) -> Result<S> {
    let l = m.param(p);
    if l.sign() == Ordering::Less || !m.point_at(&l).approx_eq(p) {
        return Err(Error::OffRay { rider: m.id });
    }
    Ok(m.t0.clone() + l)
}

/// `tau` without the on-ray check, for points already known to be on the ray.
pub fn tau_unchecked<S: Scalar>(m: &Motorcycle<S>, p: &Point2<S>) -> S {
    m.t0.clone() + m.param(p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall<S> {
    pub a: Point2<S>,
    pub b: Point2<S>,
}

impl<S: Scalar> Wall<S> {
    pub fn new(a: Point2<S>, b: Point2<S>) -> Self {
        Wall { a, b }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance<S> {
    pub motorcycles: Vec<Motorcycle<S>>,
    pub walls: Vec<Wall<S>>,
    /// Bit width `w` of the input coordinates in bounded-precision mode.
    pub bit_width: Option<u32>,
}

impl<S: Scalar> Instance<S> {
    pub fn new(motorcycles: Vec<Motorcycle<S>>) -> Self {
        Instance {
            motorcycles,
            walls: Vec::new(),
            bit_width: None,
        }
    }

    pub fn with_walls(mut self, walls: Vec<Wall<S>>) -> Self {
        self.walls = walls;
        self
    }

    pub fn rider(&self, id: usize) -> &Motorcycle<S> {
        &self.motorcycles[id - 1]
    }

    pub fn len(&self) -> usize {
        self.motorcycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.motorcycles.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for (k, m) in self.motorcycles.iter().enumerate() {
            if m.id != k + 1 {
                return Err(Error::InvalidInput(format!(
                    "rider ids must be 1..n in order, found {} at position {}",
                    m.id,
                    k + 1
                )));
            }
            if m.velocity.is_approx_zero() {
                return Err(Error::InvalidInput(format!("rider {} has zero velocity", m.id)));
            }
            if m.t0.sign() == Ordering::Less {
                return Err(Error::InvalidInput(format!("rider {} starts before time 0", m.id)));
            }
            if let Some(d) = &m.dest {
                tau(m, d).map_err(|_| {
                    Error::InvalidInput(format!("destination of rider {} is not on its ray", m.id))
                })?;
                if d.approx_eq(&m.start) {
                    return Err(Error::InvalidInput(format!(
                        "rider {} has its destination at its start",
                        m.id
                    )));
                }
            }
        }
        self.check_shared_starts()?;
        for (k, w) in self.walls.iter().enumerate() {
            if w.a.approx_eq(&w.b) {
                return Err(Error::InvalidInput(format!("wall {} has zero length", k + 1)));
            }
        }
        if let Some(w) = self.bit_width {
            self.check_bit_width(w)?;
        }
        Ok(())
    }

    /// Two riders leaving the same point in the same direction would drive
    /// on top of each other.
    fn check_shared_starts(&self) -> Result<()> {
        let mut order: Vec<&Motorcycle<S>> = self.motorcycles.iter().collect();
        order.sort_by(|a, b| a.start.cmp(&b.start));
        for (k, a) in order.iter().enumerate() {
            for b in &order[k + 1..] {
                if !b.start.approx_eq(&a.start) {
                    if b.start.x.approx_cmp(&a.start.x) == Ordering::Greater {
                        break;
                    }
                    continue;
                }
                if parallel(&a.velocity, &b.velocity)
                    && a.velocity.dot(&b.velocity).sign() == Ordering::Greater
                {
                    return Err(Error::InvalidInput(format!(
                        "riders {} and {} leave the same start in the same direction",
                        a.id, b.id
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_bit_width(&self, w: u32) -> Result<()> {
        let mut coords: Vec<(&str, usize, &S)> = Vec::new();
        for m in &self.motorcycles {
            for c in [&m.start.x, &m.start.y, &m.velocity.x, &m.velocity.y] {
                coords.push(("rider", m.id, c));
            }
        }
        for (k, wall) in self.walls.iter().enumerate() {
            for c in [&wall.a.x, &wall.a.y, &wall.b.x, &wall.b.y] {
                coords.push(("wall", k + 1, c));
            }
        }
        for (what, id, c) in coords {
            if let Some(bits) = c.bit_width() {
                if bits > u64::from(w) {
                    return Err(Error::InvalidInput(format!(
                        "{what} {id} has a coordinate {c} wider than {w} bits"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Result of intersecting two supporting lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineMeet<S> {
    Point(Point2<S>),
    Parallel,
}

/// The crossing point of the supporting lines of `i` and `j`.
pub fn line_intersection<S: Scalar>(
    i: &Motorcycle<S>,
    j: &Motorcycle<S>,
) -> Result<LineMeet<S>> {
    let (a, b) = if i.id <= j.id { (i, j) } else { (j, i) };
    if parallel(&a.velocity, &b.velocity) {
        if a.on_line(&b.start) {
            return Err(Error::Collinear { a: a.id, b: b.id });
        }
        return Ok(LineMeet::Parallel);
    }
    let den = a.velocity.cross(&b.velocity);
    let lambda = (b.start.clone() - a.start.clone()).cross(&b.velocity) / den;
    Ok(LineMeet::Point(a.point_at(&lambda)))
}

/// Crossing point of two riders, `None` for parallel or collinear lines.
pub fn crossing<S: Scalar>(i: &Motorcycle<S>, j: &Motorcycle<S>) -> Option<Point2<S>> {
    match line_intersection(i, j) {
        Ok(LineMeet::Point(p)) => Some(p),
        _ => None,
    }
}

/// Distinct crossings of `ℓ_i` with the other supporting lines on the closed
/// segment `pq`, ordered from `p`.
pub fn crossings_on_segment<S: Scalar>(
    riders: &[Motorcycle<S>],
    i: usize,
    p: &Point2<S>,
    q: &Point2<S>,
) -> Vec<Point2<S>> {
    crossings_with(&riders[i - 1], riders, p, q)
}

/// As [`crossings_on_segment`], against the lines of `others` only. `others`
/// must hold every rider whose line may cross `pq`.
pub fn crossings_with<'a, S: Scalar + 'a>(
    me: &Motorcycle<S>,
    others: impl IntoIterator<Item = &'a Motorcycle<S>>,
    p: &Point2<S>,
    q: &Point2<S>,
) -> Vec<Point2<S>> {
    let i = me.id;
    let dir = q.clone() - p.clone();
    let len2 = dir.norm2();
    let mut found: Vec<(S, Point2<S>)> = Vec::new();
    let (pf, qf) = (p.to_f64(), q.to_f64());
    for other in others {
        if other.id == i || clearly_one_side(other, pf, qf) {
            continue;
        }
        let Some(c) = crossing(me, other) else {
            continue;
        };
        let t = if len2.is_approx_zero() {
            if !c.approx_eq(p) {
                continue;
            }
            S::zero()
        } else {
            (c.clone() - p.clone()).dot(&dir) / len2.clone()
        };
        if t.sign() == Ordering::Less || t.approx_cmp(&S::one()) == Ordering::Greater {
            continue;
        }
        found.push((t, c));
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<Point2<S>> = Vec::with_capacity(found.len());
    for (_, c) in found {
        if out.last().is_none_or(|l| !l.approx_eq(&c)) {
            out.push(c);
        }
    }
    out
}

/// Cheap filter: `p` and `q` lie strictly on one side of `other`'s line,
/// by a margin far above both rounding error and the float tolerance.
fn clearly_one_side<S: Scalar>(other: &Motorcycle<S>, p: (f64, f64), q: (f64, f64)) -> bool {
    let (sx, sy) = other.start.to_f64();
    let (vx, vy) = other.velocity.to_f64();
    let side = |(x, y): (f64, f64)| {
        let (dx, dy) = (x - sx, y - sy);
        let c = vx * dy - vy * dx;
        let scale = (vx.abs() + vy.abs()) * (dx.abs() + dy.abs());
        if c > 1e-6 * scale {
            1
        } else if c < -1e-6 * scale {
            -1
        } else {
            0
        }
    };
    let (a, b) = (side(p), side(q));
    a != 0 && a == b
}

/// `|pq|`: the number of distinct crossings on the closed segment.
pub fn segment_size<S: Scalar>(
    i: usize,
    p: &Point2<S>,
    q: &Point2<S>,
    inst: &Instance<S>,
) -> usize {
    crossings_on_segment(&inst.motorcycles, i, p, q).len()
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BBox<S> {
    pub lo: Point2<S>,
    pub hi: Point2<S>,
}

impl<S: Scalar> BBox<S> {
    pub fn around<'a, I: IntoIterator<Item = &'a Point2<S>>>(pts: I) -> Option<Self> {
        let mut it = pts.into_iter();
        let first = it.next()?.clone();
        let mut bb = BBox {
            lo: first.clone(),
            hi: first,
        };
        for p in it {
            bb.include(p);
        }
        Some(bb)
    }

    pub fn include(&mut self, p: &Point2<S>) {
        if p.x < self.lo.x {
            self.lo.x = p.x.clone();
        }
        if p.y < self.lo.y {
            self.lo.y = p.y.clone();
        }
        if p.x > self.hi.x {
            self.hi.x = p.x.clone();
        }
        if p.y > self.hi.y {
            self.hi.y = p.y.clone();
        }
    }

    /// Scale about the centre by 2; a zero extent becomes 2.
    pub fn inflated(&self) -> Self {
        let grow = |lo: &S, hi: &S| {
            let w = hi.clone() - lo.clone();
            let pad = if w.is_approx_zero() { S::one() } else { w.half() };
            (lo.clone() - pad.clone(), hi.clone() + pad)
        };
        let (lx, hx) = grow(&self.lo.x, &self.hi.x);
        let (ly, hy) = grow(&self.lo.y, &self.hi.y);
        BBox {
            lo: Vec2::new(lx, ly),
            hi: Vec2::new(hx, hy),
        }
    }

    pub fn contains(&self, p: &Point2<S>) -> bool {
        p.x.approx_cmp(&self.lo.x) != Ordering::Less
            && p.x.approx_cmp(&self.hi.x) != Ordering::Greater
            && p.y.approx_cmp(&self.lo.y) != Ordering::Less
            && p.y.approx_cmp(&self.hi.y) != Ordering::Greater
    }

    pub fn strictly_contains(&self, p: &Point2<S>) -> bool {
        p.x.approx_cmp(&self.lo.x) == Ordering::Greater
            && p.x.approx_cmp(&self.hi.x) == Ordering::Less
            && p.y.approx_cmp(&self.lo.y) == Ordering::Greater
            && p.y.approx_cmp(&self.hi.y) == Ordering::Less
    }

    /// Where the ray from `s` (inside the box) along `v` leaves it.
    pub fn exit_point(&self, s: &Point2<S>, v: &Vector2<S>) -> Point2<S> {
        let mut best: Option<S> = None;
        for (sc, vc, lo, hi) in [
            (&s.x, &v.x, &self.lo.x, &self.hi.x),
            (&s.y, &v.y, &self.lo.y, &self.hi.y),
        ] {
            let bound = match vc.sign() {
                Ordering::Greater => hi,
                Ordering::Less => lo,
                Ordering::Equal => continue,
            };
            let l = (bound.clone() - sc.clone()) / vc.clone();
            if best.as_ref().is_none_or(|b| l < *b) {
                best = Some(l);
            }
        }
        let l = best.expect("nonzero velocity");
        s.clone() + v.scale(&l)
    }
}

/// Direction key for sorting lines by angle modulo π: the half-plane bit
/// followed by an exact comparison through the cross product.
pub(crate) fn angle_cmp<S: Scalar>(a: &Vector2<S>, b: &Vector2<S>) -> Ordering {
    fn canon<S: Scalar>(v: &Vector2<S>) -> Vector2<S> {
        let flip = v.y.sign() == Ordering::Less
            || (v.y.sign() == Ordering::Equal && v.x.sign() == Ordering::Less);
        if flip {
            v.neg()
        } else {
            v.clone()
        }
    }
    let (a, b) = (canon(a), canon(b));
    // Both lie in [0, π); a precedes b iff b is counterclockwise from a.
    match sign_of_difference(a.x.clone() * b.y.clone(), a.y.clone() * b.x.clone()) {
        Ordering::Greater => Ordering::Less,
        Ordering::Less => Ordering::Greater,
        Ordering::Equal => Ordering::Equal,
    }
}

/// The box used for riders without a destination: it contains every start
/// and every vertex of the line arrangement, scaled by 2 about its centre.
pub fn arrangement_box<S: Scalar>(riders: &[Motorcycle<S>]) -> Option<BBox<S>> {
    let mut bb = BBox::around(riders.iter().map(|m| &m.start))?;
    let mut order: Vec<&Motorcycle<S>> = riders.iter().collect();
    order.sort_by(|a, b| angle_cmp(&a.velocity, &b.velocity));
    // Parallel classes in angular order.
    let mut classes: Vec<Vec<&Motorcycle<S>>> = Vec::new();
    for m in order {
        match classes.last_mut() {
            Some(c) if angle_cmp(&c[0].velocity, &m.velocity) == Ordering::Equal => c.push(m),
            _ => classes.push(vec![m]),
        }
    }
    if classes.len() >= 2 {
        // Within a class, the extreme lines by offset bound every crossing
        // with an adjacent class.
        let extremes: Vec<[&Motorcycle<S>; 2]> = classes
            .iter()
            .map(|c| {
                let dir = &c[0].velocity;
                let key = |m: &&Motorcycle<S>| dir.cross(&m.start);
                let lo = *c.iter().min_by(|a, b| key(a).cmp(&key(b))).unwrap();
                let hi = *c.iter().max_by(|a, b| key(a).cmp(&key(b))).unwrap();
                [lo, hi]
            })
            .collect();
        let k = extremes.len();
        let pairs = if k == 2 { 1 } else { k };
        for a in 0..pairs {
            let b = (a + 1) % k;
            for p in &extremes[a] {
                for q in &extremes[b] {
                    if let Some(c) = crossing(p, q) {
                        bb.include(&c);
                    }
                }
            }
        }
    }
    Some(bb.inflated())
}

/// Assign a box-exit destination to every rider that has none.
pub fn compute_bounding_destinations<S: Scalar>(inst: &Instance<S>) -> Instance<S> {
    let mut out = inst.clone();
    if out.motorcycles.iter().all(|m| m.dest.is_some()) {
        return out;
    }
    let bb = arrangement_box(&inst.motorcycles).expect("non-empty instance");
    for m in out.motorcycles.iter_mut().filter(|m| m.dest.is_none()) {
        m.dest = Some(bb.exit_point(&m.start, &m.velocity));
        m.dest_kind = DestKind::Box;
    }
    out
}

/// Validate, give every rider a destination and clip against the walls.
pub fn prepare<S: Scalar>(inst: &Instance<S>) -> Result<Instance<S>> {
    inst.validate()?;
    if inst.is_empty() {
        return Ok(inst.clone());
    }
    let out = clip_destinations_to_walls(&compute_bounding_destinations(inst))?;
    out.validate()?;
    Ok(out)
}

/// Groups (of two or more rider ids) sharing a supporting line.
pub fn line_groups<S: Scalar>(riders: &[Motorcycle<S>]) -> Vec<Vec<usize>> {
    let mut order: Vec<&Motorcycle<S>> = riders.iter().collect();
    order.sort_by(|a, b| angle_cmp(&a.velocity, &b.velocity));
    let mut out = Vec::new();
    let mut k = 0;
    while k < order.len() {
        let mut e = k + 1;
        while e < order.len() && angle_cmp(&order[k].velocity, &order[e].velocity) == Ordering::Equal {
            e += 1;
        }
        let dir = order[k].velocity.clone();
        let mut class: Vec<(S, usize)> = order[k..e].iter().map(|m| (dir.cross(&m.start), m.id)).collect();
        class.sort();
        let mut a = 0;
        while a < class.len() {
            let mut b = a + 1;
            while b < class.len() && class[b].0.approx_eq(&class[a].0) {
                b += 1;
            }
            if b - a >= 2 {
                let mut ids: Vec<usize> = class[a..b].iter().map(|c| c.1).collect();
                ids.sort_unstable();
                out.push(ids);
            }
            a = b;
        }
        k = e;
    }
    out
}

/// First point where the ray `origin + λ dir`, `λ > 0`, meets the closed
/// segment `ab`. Returns `(λ, point)`. A zero-length segment is hit when
/// its point is on the ray; a collinear overlap yields its nearest endpoint
/// ahead of the origin.
pub fn ray_segment_hit<S: Scalar>(
    origin: &Point2<S>,
    dir: &Vector2<S>,
    a: &Point2<S>,
    b: &Point2<S>,
) -> Option<(S, Point2<S>)> {
    let ao = a.clone() - origin.clone();
    if a.approx_eq(b) {
        if !parallel(dir, &ao) {
            return None;
        }
        let l = ao.dot(dir) / dir.norm2();
        return (l.sign() == Ordering::Greater).then(|| (l, a.clone()));
    }
    let e = b.clone() - a.clone();
    if parallel(dir, &e) {
        if !parallel(dir, &ao) {
            return None;
        }
        let n2 = dir.norm2();
        let la = ao.dot(dir) / n2.clone();
        let lb = (b.clone() - origin.clone()).dot(dir) / n2;
        let (l, p) = if la <= lb { (la, a) } else { (lb, b) };
        return (l.sign() == Ordering::Greater).then(|| (l, p.clone()));
    }
    let den = dir.cross(&e);
    let lambda = ao.cross(&e) / den.clone();
    let mu = ao.cross(dir) / den;
    if lambda.sign() != Ordering::Greater
        || mu.sign() == Ordering::Less
        || mu.approx_cmp(&S::one()) == Ordering::Greater
    {
        return None;
    }
    let p = if mu.is_approx_zero() {
        a.clone()
    } else if mu.approx_eq(&S::one()) {
        b.clone()
    } else {
        origin.clone() + dir.scale(&lambda)
    };
    Some((lambda, p))
}

/// Whether `p` lies in the relative interior of segment `ab`.
pub fn in_open_segment<S: Scalar>(p: &Point2<S>, a: &Point2<S>, b: &Point2<S>) -> bool {
    if orient(a, b, p) != Ordering::Equal || p.approx_eq(a) || p.approx_eq(b) {
        return false;
    }
    let e = b.clone() - a.clone();
    let t = (p.clone() - a.clone()).dot(&e);
    t.sign() == Ordering::Greater && t.approx_cmp(&e.norm2()) == Ordering::Less
}

/// Whether `p` lies on the closed segment `ab`.
pub fn on_closed_segment<S: Scalar>(p: &Point2<S>, a: &Point2<S>, b: &Point2<S>) -> bool {
    p.approx_eq(a) || p.approx_eq(b) || in_open_segment(p, a, b)
}

/// Replace each destination by the nearest wall hit on the way there.
pub fn clip_destinations_to_walls<S: Scalar>(inst: &Instance<S>) -> Result<Instance<S>> {
    let mut out = inst.clone();
    for m in out.motorcycles.iter_mut() {
        clip_one(m, &inst.walls)?;
    }
    Ok(out)
}

/// Clip a single rider against the walls, as done for spawned riders.
pub fn clip_one<S: Scalar>(m: &mut Motorcycle<S>, walls: &[Wall<S>]) -> Result<()> {
    let d = m
        .dest
        .clone()
        .ok_or_else(|| Error::Contract(format!("rider {} has no destination", m.id)))?;
    let ld = m.param(&d);
    let mut best: Option<(S, Point2<S>)> = None;
    for (k, w) in walls.iter().enumerate() {
        if in_open_segment(&m.start, &w.a, &w.b) {
            return Err(Error::InvalidInput(format!(
                "rider {} starts in the interior of wall {}",
                m.id,
                k + 1
            )));
        }
        if let Some((l, p)) = ray_segment_hit(&m.start, &m.velocity, &w.a, &w.b) {
            if l.approx_cmp(&ld) != Ordering::Greater
                && best.as_ref().is_none_or(|(bl, _)| l.approx_cmp(bl) == Ordering::Less)
            {
                best = Some((l, p));
            }
        }
    }
    if let Some((_, p)) = best {
        m.dest = Some(p);
        m.dest_kind = DestKind::Wall;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_rational, Exact, F64};

    fn q(s: &str) -> Exact {
        parse_rational(s).unwrap()
    }

    fn pt(x: &str, y: &str) -> Point2<Exact> {
        Vec2::new(q(x), q(y))
    }

    fn rider(id: usize, s: (&str, &str), v: (&str, &str)) -> Motorcycle<Exact> {
        Motorcycle::new(id, pt(s.0, s.1), pt(v.0, v.1))
    }

    #[test]
    fn tau_at_start_is_t0() {
        let m = rider(1, ("1", "2"), ("3", "-1")).with_t0(q("5/2"));
        assert_eq!(tau(&m, &m.start).unwrap(), q("5/2"));
        let p = m.start.clone() + m.velocity.clone();
        assert_eq!(tau(&m, &p).unwrap(), q("7/2"));
    }

    #[test]
    fn tau_rejects_off_ray_points() {
        let m = rider(1, ("0", "0"), ("1", "0"));
        assert!(tau(&m, &pt("1", "1")).is_err());
        assert!(tau(&m, &pt("-1", "0")).is_err());
    }

    #[test]
    fn axes_cross_at_origin() {
        let a = rider(1, ("-3", "0"), ("1", "0"));
        let b = rider(2, ("0", "-5"), ("0", "2"));
        assert_eq!(line_intersection(&a, &b).unwrap(), LineMeet::Point(pt("0", "0")));
    }

    #[test]
    fn equal_velocities_are_parallel() {
        let a = rider(1, ("0", "0"), ("1", "2"));
        let b = rider(2, ("1", "0"), ("1", "2"));
        assert_eq!(line_intersection(&a, &b).unwrap(), LineMeet::Parallel);
        let c = rider(3, ("1", "2"), ("-2", "-4"));
        assert_eq!(line_intersection(&a, &c), Err(Error::Collinear { a: 1, b: 3 }));
    }

    #[test]
    fn float_intersection_is_symmetric() {
        let a = Motorcycle::new(1, Vec2::new(F64(0.1), F64(0.7)), Vec2::new(F64(0.3), F64(-0.2)));
        let b = Motorcycle::new(2, Vec2::new(F64(1.3), F64(-0.4)), Vec2::new(F64(-0.1), F64(0.9)));
        assert_eq!(line_intersection(&a, &b).unwrap(), line_intersection(&b, &a).unwrap());
    }

    #[test]
    fn segment_size_counts_closed_segment() {
        let base = rider(1, ("0", "0"), ("1", "0"));
        let t = |id, x: &str| rider(id, (x, "-1"), ("0", "1"));
        let inst = Instance::new(vec![base, t(2, "1"), t(3, "2"), t(4, "4")]);
        assert_eq!(segment_size(1, &pt("1", "0"), &pt("4", "0"), &inst), 3);
        assert_eq!(segment_size(1, &pt("4", "0"), &pt("1", "0"), &inst), 3);
        assert_eq!(segment_size(1, &pt("3/2", "0"), &pt("3", "0"), &inst), 1);
        assert_eq!(segment_size(1, &pt("5", "0"), &pt("6", "0"), &inst), 0);
    }

    #[test]
    fn concurrent_lines_count_once() {
        let base = rider(1, ("0", "0"), ("1", "0"));
        let a = rider(2, ("1", "-1"), ("0", "1"));
        let b = rider(3, ("0", "-1"), ("1", "1"));
        let inst = Instance::new(vec![base, a, b]);
        assert_eq!(segment_size(1, &pt("0", "0"), &pt("2", "0"), &inst), 1);
    }

    #[test]
    fn bounding_destinations_leave_finite_ones_alone() {
        let m = rider(1, ("0", "0"), ("1", "0")).with_dest(pt("3", "0"));
        let inst = Instance::new(vec![m]);
        assert_eq!(compute_bounding_destinations(&inst), inst);
    }

    #[test]
    fn single_rider_box() {
        let inst = Instance::new(vec![rider(1, ("0", "0"), ("1", "1"))]);
        let out = compute_bounding_destinations(&inst);
        assert_eq!(out.motorcycles[0].d(), &pt("1", "1"));
        assert_eq!(out.motorcycles[0].dest_kind, DestKind::Box);
    }

    #[test]
    fn ray_hits_and_misses() {
        let o = pt("0", "0");
        let d = pt("1", "0");
        let hit = ray_segment_hit(&o, &d, &pt("2", "-1"), &pt("2", "1")).unwrap();
        assert_eq!(hit, (q("2"), pt("2", "0")));
        assert!(ray_segment_hit(&o, &d, &pt("-2", "-1"), &pt("-2", "1")).is_none());
        assert!(ray_segment_hit(&o, &d, &pt("2", "1"), &pt("2", "1")).is_none());
        // Collinear ahead: nearest endpoint.
        let hit = ray_segment_hit(&o, &d, &pt("5", "0"), &pt("3", "0")).unwrap();
        assert_eq!(hit.1, pt("3", "0"));
        // Endpoint touch.
        let hit = ray_segment_hit(&o, &d, &pt("2", "0"), &pt("2", "3")).unwrap();
        assert_eq!(hit.1, pt("2", "0"));
    }

    #[test]
    fn wall_clips_at_midpoint() {
        let m = rider(1, ("0", "0"), ("1", "0")).with_dest(pt("4", "0"));
        let inst = Instance::new(vec![m]).with_walls(vec![Wall::new(pt("2", "-1"), pt("2", "1"))]);
        let out = clip_destinations_to_walls(&inst).unwrap();
        assert_eq!(out.motorcycles[0].d(), &pt("2", "0"));
        assert_eq!(out.motorcycles[0].dest_kind, DestKind::Wall);
    }

    #[test]
    fn start_inside_wall_is_rejected() {
        let m = rider(1, ("0", "0"), ("1", "0")).with_dest(pt("4", "0"));
        let inst = Instance::new(vec![m]).with_walls(vec![Wall::new(pt("0", "-1"), pt("0", "1"))]);
        assert!(matches!(clip_destinations_to_walls(&inst), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn validate_checks_ids_and_destinations() {
        let ok = Instance::new(vec![rider(1, ("0", "0"), ("1", "0")).with_dest(pt("2", "0"))]);
        assert!(ok.validate().is_ok());
        let bad_id = Instance::new(vec![rider(2, ("0", "0"), ("1", "0"))]);
        assert!(bad_id.validate().is_err());
        let bad_d = Instance::new(vec![rider(1, ("0", "0"), ("1", "0")).with_dest(pt("2", "1"))]);
        assert!(bad_d.validate().is_err());
        let zero_v = Instance::new(vec![rider(1, ("0", "0"), ("0", "0"))]);
        assert!(zero_v.validate().is_err());
    }

    #[test]
    fn bit_width_is_enforced() {
        let mut inst = Instance::new(vec![rider(1, ("0", "0"), ("1000", "1"))]);
        inst.bit_width = Some(8);
        assert!(inst.validate().is_err());
        inst.bit_width = Some(16);
        assert!(inst.validate().is_ok());
    }
}

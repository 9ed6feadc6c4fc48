//! Ray shooting among tracks and walls.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geom::{ray_segment_hit, BBox, Point2, Vector2};
use crate::scalar::Scalar;

/// Track owner. Riders order before walls, so a rider wins a tie.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OwnerId {
    Rider(usize),
    Wall(usize),
}

impl fmt::Display for OwnerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OwnerId::Rider(i) => write!(f, "rider {i}"),
            OwnerId::Wall(w) => write!(f, "wall {w}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrackKind {
    Tentative,
    ConfirmedFinal,
    Wall,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackSegment<S> {
    pub owner: OwnerId,
    pub a: Point2<S>,
    pub b: Point2<S>,
    pub kind: TrackKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit<S> {
    pub owner: OwnerId,
    pub point: Point2<S>,
    /// Ray parameter of the hit, in units of the query direction.
    pub distance: S,
}

pub trait RayShooter<S: Scalar> {
    fn insert(&mut self, seg: TrackSegment<S>) -> Result<()>;

    fn remove(&mut self, owner: OwnerId) -> Result<TrackSegment<S>>;

    /// Replace an existing segment, possibly changing its kind.
    fn update(&mut self, seg: TrackSegment<S>) -> Result<()> {
        if let OwnerId::Wall(_) = seg.owner {
            return Err(Error::Contract(format!("{} is immutable", seg.owner)));
        }
        self.remove(seg.owner)?;
        self.insert(seg)
    }

    fn update_endpoint(&mut self, owner: OwnerId, b: Point2<S>) -> Result<()> {
        let mut seg = self
            .get(owner)
            .cloned()
            .ok_or_else(|| Error::NotFound(owner.to_string()))?;
        seg.b = b;
        self.update(seg)
    }

    fn get(&self, owner: OwnerId) -> Option<&TrackSegment<S>>;

    /// All hits at the smallest positive distance, ordered by owner, skipping
    /// tracks of rider `exclude`.
    fn shoot_all_nearest(
        &self,
        origin: &Point2<S>,
        dir: &Vector2<S>,
        exclude: Option<usize>,
    ) -> Vec<Hit<S>>;

    /// The nearest hits if they lie within `limit`, else nothing.
    fn shoot_within(
        &self,
        origin: &Point2<S>,
        dir: &Vector2<S>,
        exclude: Option<usize>,
        limit: &S,
    ) -> Vec<Hit<S>> {
        let mut hits = self.shoot_all_nearest(origin, dir, exclude);
        hits.retain(|h| h.distance.approx_cmp(limit) != Ordering::Greater);
        hits
    }

    fn shoot(&self, origin: &Point2<S>, dir: &Vector2<S>, exclude: Option<usize>) -> Option<Hit<S>> {
        self.shoot_all_nearest(origin, dir, exclude).into_iter().next()
    }

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShooterKind {
    Linear,
    Grid,
}

impl ShooterKind {
    pub fn name(self) -> &'static str {
        match self {
            ShooterKind::Linear => "linear",
            ShooterKind::Grid => "grid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(ShooterKind::Linear),
            "grid" => Some(ShooterKind::Grid),
            _ => None,
        }
    }
}

impl fmt::Display for ShooterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn excluded(owner: OwnerId, exclude: Option<usize>) -> bool {
    matches!((owner, exclude), (OwnerId::Rider(i), Some(e)) if i == e)
}

/// Keep the hits at the minimal distance.
fn collect_nearest<S: Scalar>(best: &mut Vec<Hit<S>>, hit: Hit<S>) {
    match best.first().map(|b| hit.distance.approx_cmp(&b.distance)) {
        None | Some(Ordering::Equal) => best.push(hit),
        Some(Ordering::Less) => {
            best.clear();
            best.push(hit);
        }
        Some(Ordering::Greater) => {}
    }
}

type Ray64 = ((f64, f64), (f64, f64));

/// Cheap filter: the segment lies clearly on one side of the ray's line, or
/// clearly behind its origin, with a margin far above rounding error.
fn clearly_missed(((ox, oy), (dx, dy)): Ray64, a: (f64, f64), b: (f64, f64)) -> bool {
    let classify = |(x, y): (f64, f64)| {
        let (px, py) = (x - ox, y - oy);
        let scale = 1e-6 * (dx.abs() + dy.abs()) * (px.abs() + py.abs());
        let side = dx * py - dy * px;
        let ahead = dx * px + dy * py;
        let s = if side > scale {
            1
        } else if side < -scale {
            -1
        } else {
            0
        };
        (s, ahead < -scale)
    };
    let ((sa, behind_a), (sb, behind_b)) = (classify(a), classify(b));
    (sa != 0 && sa == sb) || (behind_a && behind_b)
}

fn test_segment<S: Scalar>(
    seg: &TrackSegment<S>,
    origin: &Point2<S>,
    dir: &Vector2<S>,
    ray: Ray64,
) -> Option<Hit<S>> {
    if clearly_missed(ray, seg.a.to_f64(), seg.b.to_f64()) {
        return None;
    }
    ray_segment_hit(origin, dir, &seg.a, &seg.b).map(|(distance, point)| Hit {
        owner: seg.owner,
        point,
        distance,
    })
}

fn insert_checked<S: Scalar>(
    map: &mut BTreeMap<OwnerId, TrackSegment<S>>,
    seg: TrackSegment<S>,
) -> Result<()> {
    if map.contains_key(&seg.owner) {
        return Err(Error::Contract(format!("{} is already present", seg.owner)));
    }
    map.insert(seg.owner, seg);
    Ok(())
}

/// Scans every segment.
#[derive(Clone, Debug, Default)]
pub struct LinearShooter<S> {
    segs: BTreeMap<OwnerId, TrackSegment<S>>,
}

impl<S: Scalar> LinearShooter<S> {
    pub fn new() -> Self {
        LinearShooter {
            segs: BTreeMap::new(),
        }
    }
}

impl<S: Scalar> RayShooter<S> for LinearShooter<S> {
    fn insert(&mut self, seg: TrackSegment<S>) -> Result<()> {
        insert_checked(&mut self.segs, seg)
    }

    fn remove(&mut self, owner: OwnerId) -> Result<TrackSegment<S>> {
        if let OwnerId::Wall(_) = owner {
            return Err(Error::Contract(format!("{owner} cannot be removed")));
        }
        self.segs
            .remove(&owner)
            .ok_or_else(|| Error::NotFound(owner.to_string()))
    }

    fn get(&self, owner: OwnerId) -> Option<&TrackSegment<S>> {
        self.segs.get(&owner)
    }

    fn shoot_all_nearest(
        &self,
        origin: &Point2<S>,
        dir: &Vector2<S>,
        exclude: Option<usize>,
    ) -> Vec<Hit<S>> {
        let mut best = Vec::new();
        let ray = (origin.to_f64(), dir.to_f64());
        for seg in self.segs.values() {
            if excluded(seg.owner, exclude) {
                continue;
            }
            if let Some(h) = test_segment(seg, origin, dir, ray) {
                collect_nearest(&mut best, h);
            }
        }
        best.sort_by_key(|h| h.owner);
        best
    }

    fn len(&self) -> usize {
        self.segs.len()
    }
}

/// Uniform grid of `⌈√N⌉ × ⌈√N⌉` cells over a fixed rectangle. Cell
/// registration and the ray walk use `f64` with a safety margin; hit tests
/// and comparisons use the backend's own arithmetic.
///
/// Segments may leave the rectangle. Their inside part is registered in the
/// cells and the whole segment is also kept on an outside list, which a ray
/// scans once it is outside the rectangle.
///
/// Cells are cleaned lazily: an entry is live while its stamp matches the
/// owner's current placement, and a cell is compacted once stale entries
/// outnumber live ones.
#[derive(Clone, Debug)]
pub struct GridShooter<S> {
    slots: Vec<Option<TrackSegment<S>>>,
    stamps: Vec<u32>,
    covers: Vec<Vec<u32>>,
    cells: Vec<Vec<(u32, u32)>>,
    live: Vec<u32>,
    outside: Vec<(u32, u32)>,
    outside_live: usize,
    is_outside: Vec<bool>,
    count: usize,
    side: usize,
    x0: f64,
    y0: f64,
    cw: f64,
    ch: f64,
}

fn slot_of(owner: OwnerId) -> usize {
    match owner {
        OwnerId::Rider(i) => 2 * i,
        OwnerId::Wall(w) => 2 * w + 1,
    }
}

impl<S: Scalar> GridShooter<S> {
    /// Grid over `bounds` sized for `n` segments.
    pub fn new(bounds: &BBox<S>, n: usize) -> Self {
        let side = ((n.max(1) as f64).sqrt().ceil() as usize).max(1);
        let (x0, y0) = bounds.lo.to_f64();
        let (x1, y1) = bounds.hi.to_f64();
        let span = |a: f64, b: f64| if b - a > 0.0 { (b - a) / side as f64 } else { 1.0 };
        GridShooter {
            slots: Vec::new(),
            stamps: Vec::new(),
            covers: Vec::new(),
            cells: vec![Vec::new(); side * side],
            live: vec![0; side * side],
            outside: Vec::new(),
            outside_live: 0,
            is_outside: Vec::new(),
            count: 0,
            side,
            x0,
            y0,
            cw: span(x0, x1),
            ch: span(y0, y1),
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    fn extent(&self) -> (f64, f64) {
        (
            self.x0 + self.cw * self.side as f64,
            self.y0 + self.ch * self.side as f64,
        )
    }

    fn inside(&self, x: f64, y: f64) -> bool {
        let (x1, y1) = self.extent();
        x >= self.x0 && x <= x1 && y >= self.y0 && y <= y1
    }

    fn col(&self, x: f64) -> usize {
        (((x - self.x0) / self.cw).floor().max(0.0) as usize).min(self.side - 1)
    }

    fn row(&self, y: f64) -> usize {
        (((y - self.y0) / self.ch).floor().max(0.0) as usize).min(self.side - 1)
    }

    fn margin(&self) -> f64 {
        1e-6 * (self.cw + self.ch)
    }

    /// Every cell the segment may touch, with a margin on all sides.
    fn cover(&self, a: (f64, f64), b: (f64, f64)) -> Vec<u32> {
        let m = self.margin();
        let ((ax, ay), (bx, by)) = if a.0 <= b.0 { (a, b) } else { (b, a) };
        let mut out = Vec::new();
        for c in self.col(ax - m)..=self.col(bx + m) {
            let cl = (self.x0 + c as f64 * self.cw - m).max(ax);
            let cr = (self.x0 + (c + 1) as f64 * self.cw + m).min(bx);
            let (ylo, yhi) = if bx - ax <= 0.0 {
                (ay.min(by), ay.max(by))
            } else {
                let y_at = |x: f64| ay + (by - ay) * ((x - ax) / (bx - ax));
                let (u, v) = (y_at(cl), y_at(cr));
                (u.min(v), u.max(v))
            };
            for r in self.row(ylo - m)..=self.row(yhi + m) {
                out.push((r * self.side + c) as u32);
            }
        }
        out
    }

    fn is_live(&self, key: u32, stamp: u32) -> bool {
        let k = key as usize;
        self.slots[k].is_some() && self.stamps[k] == stamp
    }

    /// Parameters `t0 <= t1` within `[0, t_max]` where `a + t d` lies in
    /// the rectangle grown by the margin.
    fn clip_param(&self, a: (f64, f64), d: (f64, f64), t_max: f64) -> Option<(f64, f64)> {
        let m = self.margin();
        let (x1, y1) = self.extent();
        let (mut t0, mut t1) = (0.0f64, t_max);
        for (p, q) in [
            (-d.0, a.0 - (self.x0 - m)),
            (d.0, x1 + m - a.0),
            (-d.1, a.1 - (self.y0 - m)),
            (d.1, y1 + m - a.1),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else if p < 0.0 {
                t0 = t0.max(q / p);
            } else {
                t1 = t1.min(q / p);
            }
        }
        (t0 <= t1).then_some((t0, t1))
    }

    /// The part of `[a, b]` inside the grown rectangle.
    fn clip(&self, a: (f64, f64), b: (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
        let d = (b.0 - a.0, b.1 - a.1);
        let (t0, t1) = self.clip_param(a, d, 1.0)?;
        let at = |t: f64| (a.0 + t * d.0, a.1 + t * d.1);
        Some((at(t0), at(t1)))
    }

    fn place(&mut self, key: usize) {
        let seg = self.slots[key].as_ref().expect("placed segments exist");
        let (a, b) = (seg.a.to_f64(), seg.b.to_f64());
        self.stamps[key] = self.stamps[key].wrapping_add(1);
        let stamp = self.stamps[key];
        let contained = self.inside(a.0, a.1) && self.inside(b.0, b.1);
        if !contained {
            self.outside_live += 1;
            if self.outside.len() > 2 * self.outside_live + 16 {
                let mut list = std::mem::take(&mut self.outside);
                list.retain(|&(k, st)| self.is_live(k, st));
                self.outside = list;
            }
            self.outside.push((key as u32, stamp));
            self.is_outside[key] = true;
        }
        let cells = match self.clip(a, b) {
            Some((a, b)) => self.cover(a, b),
            None => Vec::new(),
        };
        for &c in &cells {
            let c = c as usize;
            self.live[c] += 1;
            if self.cells[c].len() > 2 * self.live[c] as usize + 16 {
                let mut cell = std::mem::take(&mut self.cells[c]);
                cell.retain(|&(k, st)| self.is_live(k, st));
                self.cells[c] = cell;
            }
            self.cells[c].push((key as u32, stamp));
        }
        self.covers[key] = cells;
    }

    fn unplace(&mut self, key: usize) {
        for c in std::mem::take(&mut self.covers[key]) {
            self.live[c as usize] -= 1;
        }
        if std::mem::take(&mut self.is_outside[key]) {
            self.outside_live -= 1;
        }
    }

    fn test(
        &self,
        key: u32,
        origin: &Point2<S>,
        dir: &Vector2<S>,
        ray: Ray64,
        exclude: Option<usize>,
        best: &mut Vec<Hit<S>>,
    ) {
        let seg = self.slots[key as usize].as_ref().expect("live entries have segments");
        if excluded(seg.owner, exclude) || best.iter().any(|h| h.owner == seg.owner) {
            return;
        }
        if let Some(h) = test_segment(seg, origin, dir, ray) {
            collect_nearest(best, h);
        }
    }

    fn walk(
        &self,
        origin: &Point2<S>,
        dir: &Vector2<S>,
        exclude: Option<usize>,
        limit: Option<f64>,
    ) -> Vec<Hit<S>> {
        let mut best: Vec<Hit<S>> = Vec::new();
        let (ox, oy) = origin.to_f64();
        let (dx, dy) = dir.to_f64();
        let ray = ((ox, oy), (dx, dy));
        let scan_outside = |best: &mut Vec<Hit<S>>| {
            for &(k, st) in &self.outside {
                if self.is_live(k, st) {
                    self.test(k, origin, dir, ray, exclude, best);
                }
            }
        };
        // Where the walk starts: the origin, or where the ray enters.
        let (sx, sy) = if self.inside(ox, oy) {
            (ox, oy)
        } else {
            scan_outside(&mut best);
            match self.clip_param((ox, oy), (dx, dy), f64::INFINITY) {
                Some((t, _)) if limit.is_none_or(|l| t <= l + 1e-7 * (l.abs() + 1.0)) => {
                    (ox + t * dx, oy + t * dy)
                }
                _ => {
                    best.sort_by_key(|h| h.owner);
                    return best;
                }
            }
        };
        let (mut cx, mut cy) = (self.col(sx) as i64, self.row(sy) as i64);
        let step_x: i64 = if dx > 0.0 { 1 } else { -1 };
        let step_y: i64 = if dy > 0.0 { 1 } else { -1 };
        let boundary = |c: i64, step: i64, lo: f64, w: f64| lo + w * (c + i64::from(step > 0)) as f64;
        let t_at = |b: f64, o: f64, d: f64| if d != 0.0 { (b - o) / d } else { f64::INFINITY };
        let mut t_max_x = t_at(boundary(cx, step_x, self.x0, self.cw), ox, dx);
        let mut t_max_y = t_at(boundary(cy, step_y, self.y0, self.ch), oy, dy);
        let t_dx = if dx != 0.0 { self.cw / dx.abs() } else { f64::INFINITY };
        let t_dy = if dy != 0.0 { self.ch / dy.abs() } else { f64::INFINITY };
        // Ray parameter of a cell-width margin.
        let slack = {
            let speed = dx.abs().max(dy.abs()).max(f64::MIN_POSITIVE);
            self.margin() / speed
        };
        let n = self.side as i64;
        let mut entry = 0.0f64;
        let mut left_grid = false;
        loop {
            let cell = (cy * n + cx) as usize;
            for &(k, st) in &self.cells[cell] {
                if self.is_live(k, st) {
                    self.test(k, origin, dir, ray, exclude, &mut best);
                }
            }
            let exit = t_max_x.min(t_max_y);
            if let Some(b) = best.first() {
                let bd = b.distance.to_f64();
                if bd < exit - slack - 1e-7 * (exit.abs() + 1.0) {
                    break;
                }
            }
            if !exit.is_finite() {
                left_grid = true;
                break;
            }
            if let Some(l) = limit {
                if entry > l + slack + 1e-7 * (l.abs() + 1.0) {
                    break;
                }
            }
            entry = exit;
            if t_max_x < t_max_y {
                cx += step_x;
                t_max_x += t_dx;
            } else {
                cy += step_y;
                t_max_y += t_dy;
            }
            if cx < 0 || cy < 0 || cx >= n || cy >= n {
                left_grid = true;
                break;
            }
        }
        if left_grid && self.inside(ox, oy) {
            scan_outside(&mut best);
        }
        best.sort_by_key(|h| h.owner);
        best
    }
}

impl<S: Scalar> RayShooter<S> for GridShooter<S> {
    fn insert(&mut self, seg: TrackSegment<S>) -> Result<()> {
        let key = slot_of(seg.owner);
        if key >= self.slots.len() {
            self.slots.resize(key + 1, None);
            self.stamps.resize(key + 1, 0);
            self.covers.resize(key + 1, Vec::new());
            self.is_outside.resize(key + 1, false);
        }
        if self.slots[key].is_some() {
            return Err(Error::Contract(format!("{} is already present", seg.owner)));
        }
        self.slots[key] = Some(seg);
        self.count += 1;
        self.place(key);
        Ok(())
    }

    fn remove(&mut self, owner: OwnerId) -> Result<TrackSegment<S>> {
        if let OwnerId::Wall(_) = owner {
            return Err(Error::Contract(format!("{owner} cannot be removed")));
        }
        let key = slot_of(owner);
        let seg = self
            .slots
            .get_mut(key)
            .and_then(Option::take)
            .ok_or_else(|| Error::NotFound(owner.to_string()))?;
        self.count -= 1;
        self.unplace(key);
        Ok(seg)
    }

    fn get(&self, owner: OwnerId) -> Option<&TrackSegment<S>> {
        self.slots.get(slot_of(owner)).and_then(Option::as_ref)
    }

    fn shoot_all_nearest(
        &self,
        origin: &Point2<S>,
        dir: &Vector2<S>,
        exclude: Option<usize>,
    ) -> Vec<Hit<S>> {
        self.walk(origin, dir, exclude, None)
    }

    fn shoot_within(
        &self,
        origin: &Point2<S>,
        dir: &Vector2<S>,
        exclude: Option<usize>,
        limit: &S,
    ) -> Vec<Hit<S>> {
        let mut hits = self.walk(origin, dir, exclude, Some(limit.to_f64()));
        hits.retain(|h| h.distance.approx_cmp(limit) != Ordering::Greater);
        hits
    }

    fn len(&self) -> usize {
        self.count
    }
}

/// Either backend behind one type, chosen at run time.
pub fn make_shooter<S: Scalar>(
    kind: ShooterKind,
    bounds: &BBox<S>,
    n: usize,
) -> Box<dyn RayShooter<S>> {
    match kind {
        ShooterKind::Linear => Box::new(LinearShooter::new()),
        ShooterKind::Grid => Box::new(GridShooter::new(bounds, n)),
    }
}

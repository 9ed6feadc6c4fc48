//! Halving queries: a point of `pq` that is not a crossing and splits the
//! crossings of `pq` into two roughly equal parts.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::geom::{crossing, crossings_on_segment, crossings_with, parallel, Motorcycle, Point2, Vector2};
use crate::lines::LineIndex;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HalvingMode {
    Counting,
    Midpoint,
    COriented,
}

impl HalvingMode {
    pub fn name(self) -> &'static str {
        match self {
            HalvingMode::Counting => "counting",
            HalvingMode::Midpoint => "midpoint",
            HalvingMode::COriented => "coriented",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "counting" => Some(HalvingMode::Counting),
            "midpoint" => Some(HalvingMode::Midpoint),
            "coriented" | "c-oriented" => Some(HalvingMode::COriented),
            _ => None,
        }
    }

    /// Split ratio guaranteed by the strategy, as `(numerator, denominator)`.
    pub fn rho(self) -> (u32, u32) {
        match self {
            HalvingMode::Counting | HalvingMode::Midpoint => (1, 2),
            HalvingMode::COriented => (3, 4),
        }
    }
}

impl fmt::Display for HalvingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Halving<S> {
    Split(Point2<S>),
    /// The segment is shorter than the separation floor; it holds at most
    /// one crossing and is not subdivided.
    TooShort,
}

pub trait HalvingStrategy<S: Scalar> {
    fn mode(&self) -> HalvingMode;

    /// Halve `pq`, a segment of rider `i`'s supporting line, against the
    /// arrangement of `riders`.
    fn halve(
        &self,
        riders: &[Motorcycle<S>],
        i: usize,
        p: &Point2<S>,
        q: &Point2<S>,
    ) -> Result<Halving<S>>;
}

/// Midpoint of the median crossing and the next one.
#[derive(Clone, Copy, Debug, Default)]
pub struct CountingHalving;

impl<S: Scalar> HalvingStrategy<S> for CountingHalving {
    fn mode(&self) -> HalvingMode {
        HalvingMode::Counting
    }

    fn halve(
        &self,
        riders: &[Motorcycle<S>],
        i: usize,
        p: &Point2<S>,
        q: &Point2<S>,
    ) -> Result<Halving<S>> {
        split_counted(crossings_on_segment(riders, i, p, q), i, p, q)
    }
}

/// [`CountingHalving`] that looks crossings up in a [`LineIndex`] built over
/// the initial riders.
#[derive(Clone, Debug)]
pub struct IndexedCountingHalving {
    index: LineIndex,
}

impl IndexedCountingHalving {
    pub fn new<S: Scalar>(riders: &[Motorcycle<S>]) -> Self {
        IndexedCountingHalving { index: LineIndex::new(riders) }
    }
}

impl<S: Scalar> HalvingStrategy<S> for IndexedCountingHalving {
    fn mode(&self) -> HalvingMode {
        HalvingMode::Counting
    }

    fn halve(
        &self,
        riders: &[Motorcycle<S>],
        i: usize,
        p: &Point2<S>,
        q: &Point2<S>,
    ) -> Result<Halving<S>> {
        let cs = match self.index.candidates(riders, p, q) {
            Some(ids) => crossings_with(&riders[i - 1], ids.iter().map(|&k| &riders[k - 1]), p, q),
            None => crossings_on_segment(riders, i, p, q),
        };
        split_counted(cs, i, p, q)
    }
}

fn split_counted<S: Scalar>(
    cs: Vec<Point2<S>>,
    i: usize,
    p: &Point2<S>,
    q: &Point2<S>,
) -> Result<Halving<S>> {
    let k = cs.len();
    let h = match k {
        0 => return Err(Error::Contract(format!("halving an empty segment of rider {i}"))),
        1 if !cs[0].approx_eq(p) => p.midpoint(&cs[0]),
        1 if !cs[0].approx_eq(q) => cs[0].midpoint(q),
        1 => return Err(Error::Contract(format!("halving a point segment of rider {i}"))),
        _ => {
            let m = k.div_ceil(2);
            cs[m - 1].midpoint(&cs[m])
        }
    };
    Ok(Halving::Split(h))
}

/// Euclidean midpoint with a length floor.
#[derive(Clone, Debug)]
pub struct MidpointHalving<S> {
    pub min_length: S,
}

/// Floor for plain bounded-precision input: `2^(-2w+1)`.
pub fn plain_min_length<S: Scalar>(w: u32) -> S {
    S::pow2(1 - 2 * w as i32)
}

/// Exponent `W` of the floor used for induced instances.
pub fn induced_exponent(w: u32) -> u64 {
    64 * (80 * u64::from(w) + 105) + 1
}

/// Floor for induced instances: `2^(-W)`.
pub fn induced_min_length<S: Scalar>(w: u32) -> S {
    let e = i32::try_from(induced_exponent(w)).expect("exponent fits in i32");
    S::pow2(-e)
}

fn is_crossing<S: Scalar>(riders: &[Motorcycle<S>], i: usize, h: &Point2<S>) -> bool {
    let me = &riders[i - 1];
    riders
        .iter()
        .any(|o| o.id != i && !parallel(&o.velocity, &me.velocity) && o.on_line(h))
}

impl<S: Scalar> HalvingStrategy<S> for MidpointHalving<S> {
    fn mode(&self) -> HalvingMode {
        HalvingMode::Midpoint
    }

    fn halve(
        &self,
        riders: &[Motorcycle<S>],
        i: usize,
        p: &Point2<S>,
        q: &Point2<S>,
    ) -> Result<Halving<S>> {
        let len2 = (q.clone() - p.clone()).norm2();
        let floor2 = self.min_length.clone() * self.min_length.clone();
        if len2.approx_cmp(&floor2) == Ordering::Less || len2.is_approx_zero() {
            return Ok(Halving::TooShort);
        }
        let h = p.midpoint(q);
        if !is_crossing(riders, i, &h) {
            return Ok(Halving::Split(h));
        }
        // The midpoint sits on another line: try dyadic points nearest the
        // middle until one is free. Finitely many lines, so this ends.
        for level in 2..64u32 {
            let den = 1u64 << level;
            let mut odd: Vec<u64> = (1..den).step_by(2).collect();
            odd.sort_by_key(|&a| (2 * a).abs_diff(den));
            for a in odd {
                let t = S::from_i64(a as i64) / S::from_i64(den as i64);
                let h = p.lerp(q, &t);
                if !is_crossing(riders, i, &h) {
                    return Ok(Halving::Split(h));
                }
            }
        }
        Err(Error::Internal("no free point found near the midpoint".into()))
    }
}

/// Riders grouped by line direction, each group sorted by the offset of its
/// supporting line.
#[derive(Clone, Debug)]
pub struct DirectionTable<S> {
    pub groups: Vec<DirectionGroup<S>>,
}

#[derive(Clone, Debug)]
pub struct DirectionGroup<S> {
    pub dir: Vector2<S>,
    /// `(offset, rider id)` sorted by offset; `offset = dir × s`.
    pub lines: Vec<(S, usize)>,
}

impl<S: Scalar> DirectionTable<S> {
    pub fn build(riders: &[Motorcycle<S>]) -> Self {
        let mut groups: Vec<DirectionGroup<S>> = Vec::new();
        for m in riders {
            let g = match groups.iter_mut().position(|g| parallel(&g.dir, &m.velocity)) {
                Some(k) => &mut groups[k],
                None => {
                    groups.push(DirectionGroup {
                        dir: m.velocity.clone(),
                        lines: Vec::new(),
                    });
                    groups.last_mut().unwrap()
                }
            };
            let off = g.dir.cross(&m.start);
            g.lines.push((off, m.id));
        }
        for g in &mut groups {
            g.lines.sort();
        }
        DirectionTable { groups }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    fn group_of(&self, v: &Vector2<S>) -> Option<usize> {
        self.groups.iter().position(|g| parallel(&g.dir, v))
    }
}

/// Index range of `lines` with offsets in the closed interval `[lo, hi]`.
fn offset_range<S: Scalar>(lines: &[(S, usize)], lo: &S, hi: &S) -> (usize, usize) {
    let a = lines.partition_point(|(o, _)| o.approx_cmp(lo) == Ordering::Less);
    let b = lines.partition_point(|(o, _)| o.approx_cmp(hi) != Ordering::Greater);
    (a, b.max(a))
}

/// Weighted median of per-direction medians.
#[derive(Clone, Debug)]
pub struct COrientedHalving<S> {
    pub table: DirectionTable<S>,
}

impl<S: Scalar> COrientedHalving<S> {
    pub fn new(riders: &[Motorcycle<S>]) -> Self {
        COrientedHalving {
            table: DirectionTable::build(riders),
        }
    }
}

impl<S: Scalar> HalvingStrategy<S> for COrientedHalving<S> {
    fn mode(&self) -> HalvingMode {
        HalvingMode::COriented
    }

    fn halve(
        &self,
        riders: &[Motorcycle<S>],
        i: usize,
        p: &Point2<S>,
        q: &Point2<S>,
    ) -> Result<Halving<S>> {
        let me = &riders[i - 1];
        let own = self.table.group_of(&me.velocity).ok_or_else(|| {
            Error::InvalidInput(format!("direction of rider {i} is not in the direction table"))
        })?;
        let dir = q.clone() - p.clone();
        let len2 = dir.norm2();
        if len2.is_approx_zero() {
            return Err(Error::Contract(format!("halving a point segment of rider {i}")));
        }
        // Position of a point along pq, 0 at p and 1 at q.
        let pos = |x: &Point2<S>| (x.clone() - p.clone()).dot(&dir) / len2.clone();
        let line_point = |id: usize| crossing(me, &riders[id - 1]).expect("non-parallel lines");

        // Per direction: the contiguous run of lines crossing pq and its
        // median, deduplicating equal offsets (same line).
        let mut medians: Vec<(S, usize, Point2<S>)> = Vec::new();
        let mut runs: Vec<(usize, usize, usize)> = Vec::new();
        for (g, group) in self.table.groups.iter().enumerate() {
            if g == own {
                continue;
            }
            let (op, oq) = (group.dir.cross(p), group.dir.cross(q));
            let desc = op > oq;
            let (lo, hi) = if desc { (oq, op) } else { (op, oq) };
            let (a, b) = offset_range(&group.lines, &lo, &hi);
            if a == b {
                continue;
            }
            let mut distinct: Vec<usize> = (a..b)
                .filter(|&k| k == a || !group.lines[k].0.approx_eq(&group.lines[k - 1].0))
                .collect();
            // Order the run from p towards q.
            if desc {
                distinct.reverse();
            }
            let mid = distinct[distinct.len().div_ceil(2) - 1];
            let c = line_point(group.lines[mid].1);
            medians.push((pos(&c), distinct.len(), c));
            runs.push((g, a, b));
        }
        if medians.is_empty() {
            return Err(Error::Contract(format!("halving an empty segment of rider {i}")));
        }
        medians.sort_by(|x, y| x.0.cmp(&y.0));
        let total: usize = medians.iter().map(|m| m.1).sum();
        let mut acc = 0;
        let mut star = medians.len() - 1;
        for (k, m) in medians.iter().enumerate() {
            acc += m.1;
            if 2 * acc >= total {
                star = k;
                break;
            }
        }
        let (t_star, _, m_star) = medians[star].clone();

        // Nearest crossing strictly after (or before) the weighted median.
        let neighbour = |after: bool| -> Option<(S, Point2<S>)> {
            let mut best: Option<(S, Point2<S>)> = None;
            for &(g, a, b) in &runs {
                let lines = &self.table.groups[g].lines[a..b];
                // Lines in a run are sorted by offset, hence monotone in
                // position along pq; binary search for the boundary.
                let first_pos = pos(&line_point(lines[0].1));
                let last_pos = pos(&line_point(lines[lines.len() - 1].1));
                let ascending = first_pos <= last_pos;
                let beyond = |k: usize| {
                    let t = pos(&line_point(lines[k].1));
                    let c = t.approx_cmp(&t_star);
                    if after {
                        c == Ordering::Greater
                    } else {
                        c == Ordering::Less
                    }
                };
                let idx = if ascending == after {
                    let mut lo = 0;
                    let mut hi = lines.len();
                    while lo < hi {
                        let mid = (lo + hi) / 2;
                        if beyond(mid) {
                            hi = mid;
                        } else {
                            lo = mid + 1;
                        }
                    }
                    (lo < lines.len()).then_some(lo)
                } else {
                    let mut lo = 0;
                    let mut hi = lines.len();
                    while lo < hi {
                        let mid = (lo + hi) / 2;
                        if beyond(mid) {
                            lo = mid + 1;
                        } else {
                            hi = mid;
                        }
                    }
                    (lo > 0).then(|| lo - 1)
                };
                if let Some(k) = idx {
                    let c = line_point(lines[k].1);
                    let t = pos(&c);
                    let closer = best.as_ref().is_none_or(|(bt, _)| {
                        if after {
                            t < *bt
                        } else {
                            t > *bt
                        }
                    });
                    if closer {
                        best = Some((t, c));
                    }
                }
            }
            best
        };

        // Weights count lines, not points: when lines of several directions
        // meet at one point the median can be the last crossing, and then
        // only a split before it makes progress.
        let h = if let Some((_, next)) = neighbour(true) {
            m_star.midpoint(&next)
        } else if let Some((_, prev)) = neighbour(false) {
            prev.midpoint(&m_star)
        } else if !m_star.approx_eq(q) {
            m_star.midpoint(q)
        } else {
            p.midpoint(&m_star)
        };
        Ok(Halving::Split(h))
    }
}

/// Halving configuration as read from an instance file.
#[derive(Clone, Debug)]
pub struct HalvingConfig<S> {
    pub mode: HalvingMode,
    /// Floor for midpoint halving; defaults from the bit width.
    pub min_length: Option<S>,
}

impl<S: Scalar> HalvingConfig<S> {
    pub fn new(mode: HalvingMode) -> Self {
        HalvingConfig {
            mode,
            min_length: None,
        }
    }

    /// Build the strategy. Midpoint mode needs either an explicit floor or
    /// a bit width.
    pub fn strategy(
        &self,
        riders: &[Motorcycle<S>],
        bit_width: Option<u32>,
    ) -> Result<Box<dyn HalvingStrategy<S>>> {
        Ok(match self.mode {
            HalvingMode::Counting => Box::new(IndexedCountingHalving::new(riders)),
            HalvingMode::COriented => Box::new(COrientedHalving::new(riders)),
            HalvingMode::Midpoint => {
                let min_length = match (&self.min_length, bit_width) {
                    (Some(m), _) => m.clone(),
                    (None, Some(w)) => plain_min_length(w),
                    (None, None) => {
                        return Err(Error::InvalidInput(
                            "midpoint halving needs a bit width or an explicit floor".into(),
                        ))
                    }
                };
                if min_length.sign() != Ordering::Greater {
                    return Err(Error::InvalidInput("midpoint floor must be positive".into()));
                }
                Box::new(MidpointHalving { min_length })
            }
        })
    }
}

/// Smallest bit width that holds every start, velocity and destination
/// coordinate of the riders, if the backend reports widths.
pub fn inferred_bit_width<S: Scalar>(riders: &[Motorcycle<S>]) -> Option<u32> {
    let mut w = 2u64;
    for m in riders {
        for c in [&m.start.x, &m.start.y, &m.velocity.x, &m.velocity.y] {
            w = w.max(c.bit_width()?);
        }
    }
    Some(w as u32)
}

//! The tentative-track algorithm.
//!
//! Every rider owns a stack of targets on its ray. The top of the stack is
//! the end of its tentative track; everything up to `c_i` is confirmed.
//! Events are processed in order of the time a rider would reach its top
//! target, and ray shooting against the current tracks decides whether the
//! tentative track can grow or has to be cut back by halving.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::geom::{
    crossing, line_groups, orient, parallel, prepare, tau_unchecked, BBox, Instance, Motorcycle,
    Point2, Wall,
};
use crate::halving::{inferred_bit_width, Halving, HalvingConfig, HalvingMode, HalvingStrategy};
use crate::oracle::{MgResult, Outcome, RiderResult};
use crate::rayshoot::{make_shooter, OwnerId, RayShooter, ShooterKind, TrackKind, TrackSegment};
use crate::scalar::Scalar;
use crate::spawn::{admit_spawned, check_spawn_site, SpawnPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetKind {
    Start,
    Dest,
    /// A point where the ray met another track.
    Chi,
    /// A point produced by halving.
    Halving,
    /// Meeting point of two collinear riders heading at each other.
    Meet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target<S> {
    pub point: Point2<S>,
    pub record: usize,
    pub kind: TargetKind,
}

/// Shared bookkeeping for one target point.
#[derive(Clone, Debug)]
pub struct TargetRecord<S> {
    pub point: Point2<S>,
    /// Riders holding the point in their stack, ordered by arrival time.
    members: BTreeSet<(S, usize)>,
    /// Riders whose event at this point has been processed.
    pub arrivals: Vec<usize>,
    /// Owners of tracks that a ray hit at this point.
    pub partners: Vec<usize>,
}

impl<S: Scalar> TargetRecord<S> {
    fn new(point: Point2<S>) -> Self {
        TargetRecord {
            point,
            members: BTreeSet::new(),
            arrivals: Vec::new(),
            partners: Vec::new(),
        }
    }

    pub fn blocked(&self) -> bool {
        !self.arrivals.is_empty()
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|m| m.1)
    }

    pub fn contains(&self, rider: &Motorcycle<S>) -> bool {
        self.members
            .contains(&(tau_unchecked(rider, &self.point), rider.id))
    }

    /// The two members that would get here first.
    pub fn earliest_two(&self) -> [Option<usize>; 2] {
        let mut it = self.members.iter().map(|m| m.1);
        [it.next(), it.next()]
    }

    fn add_member(&mut self, rider: &Motorcycle<S>) {
        self.members
            .insert((tau_unchecked(rider, &self.point), rider.id));
    }

    fn remove_member(&mut self, rider: &Motorcycle<S>) {
        self.members
            .remove(&(tau_unchecked(rider, &self.point), rider.id));
    }

    fn add_partner(&mut self, j: usize) {
        if !self.partners.contains(&j) {
            self.partners.push(j);
        }
    }
}

#[derive(Clone, Debug)]
pub struct RiderState<S> {
    /// End of the confirmed track.
    pub c: Point2<S>,
    /// End of the tentative track.
    pub t: Point2<S>,
    /// Targets, top at the end.
    pub stack: Vec<Target<S>>,
    pub alive: bool,
    pub started: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceCase {
    Stop,
    Crash { into: usize },
    Extend,
    Halve,
}

#[derive(Clone, Debug)]
pub struct TraceRecord<S> {
    pub seq: usize,
    pub rider: usize,
    pub time: S,
    pub point: Point2<S>,
    pub case: TraceCase,
    /// New end of the tentative track and the time to reach it.
    pub tentative: Option<(Point2<S>, S)>,
    /// Targets pushed during the event: rider, point, arrival time.
    pub created: Vec<(usize, Point2<S>, S)>,
}

impl<S: Scalar> TraceRecord<S> {
    /// Every time value mentioned by the record.
    pub fn times(&self) -> Vec<&S> {
        let mut out = vec![&self.time];
        out.extend(self.tentative.iter().map(|t| &t.1));
        out.extend(self.created.iter().map(|c| &c.2));
        out
    }
}

impl<S: Scalar> fmt::Display for TraceRecord<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.point.to_f64();
        write!(
            f,
            "#{} rider {} t={:.6} at ({x:.6}, {y:.6}) ",
            self.seq,
            self.rider,
            self.time.to_f64()
        )?;
        match self.case {
            TraceCase::Stop => write!(f, "stop")?,
            TraceCase::Crash { into } => write!(f, "crash into {into}")?,
            TraceCase::Extend => write!(f, "extend")?,
            TraceCase::Halve => write!(f, "halve")?,
        }
        if let Some((p, t)) = &self.tentative {
            let (x, y) = p.to_f64();
            write!(f, " -> ({x:.6}, {y:.6}) t={:.6}", t.to_f64())?;
        }
        for (r, p, t) in &self.created {
            let (x, y) = p.to_f64();
            write!(f, " [+{r} ({x:.6}, {y:.6}) t={:.6}]", t.to_f64())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub events_processed: u64,
    pub ray_queries: u64,
    pub halving_queries: u64,
    /// Largest number of crossing targets left in one stack at the end.
    pub max_chi_targets_in_any_stack: usize,
    /// Largest number of crossing targets held by one stack at any time.
    pub peak_chi_targets: usize,
    pub spawned_count: usize,
    pub wall_time: Duration,
}

/// Deliberate bugs for checking that the verifier notices.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    SkipBlockedCheck,
}

#[derive(Clone, Debug)]
pub struct SolverConfig<S> {
    pub halving: HalvingConfig<S>,
    pub shooter: ShooterKind,
    /// Allow spawning with a halving mode whose guarantees do not cover
    /// spawned riders.
    pub unchecked_spawns: bool,
    pub record_trace: bool,
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

impl<S: Scalar> SolverConfig<S> {
    pub fn new(mode: HalvingMode) -> Self {
        SolverConfig {
            halving: HalvingConfig::new(mode),
            shooter: ShooterKind::Grid,
            unchecked_spawns: false,
            record_trace: false,
            fault: None,
        }
    }

    pub fn with_shooter(mut self, shooter: ShooterKind) -> Self {
        self.shooter = shooter;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }
}

impl<S: Scalar> Default for SolverConfig<S> {
    fn default() -> Self {
        SolverConfig::new(HalvingMode::Counting)
    }
}

#[derive(Clone, Debug)]
pub struct Solution<S> {
    pub result: MgResult<S>,
    pub stats: Stats,
    pub trace: Vec<TraceRecord<S>>,
}

/// An instance after collinear preprocessing: destinations cut at the next
/// start ahead, plus extra targets per rider (indexed by id - 1).
#[derive(Clone, Debug)]
pub struct Preprocessed<S> {
    pub instance: Instance<S>,
    pub extra: Vec<Vec<Point2<S>>>,
}

/// Resolve riders sharing a supporting line before the main loop: ray
/// shooting cannot tell a collinear track ahead from one behind, so these
/// encounters are turned into ordinary targets up front.
pub fn preprocess_collinear<S: Scalar>(inst: &Instance<S>) -> Result<Preprocessed<S>> {
    let mut riders = inst.motorcycles.clone();
    let mut extra: Vec<Vec<Point2<S>>> = vec![Vec::new(); riders.len()];
    for group in line_groups(&riders) {
        let u = riders[group[0] - 1].velocity.clone();
        let mut pos: Vec<(S, usize)> = group
            .iter()
            .map(|&k| (riders[k - 1].start.dot(&u), k))
            .collect();
        pos.sort();
        let mut levels: Vec<(S, Vec<usize>)> = Vec::new();
        for (x, k) in pos {
            match levels.last_mut() {
                Some((lx, ks)) if lx.approx_eq(&x) => ks.push(k),
                _ => levels.push((x, vec![k])),
            }
        }
        let forward: BTreeMap<usize, bool> = group
            .iter()
            .map(|&k| (k, riders[k - 1].velocity.dot(&u).sign() == Ordering::Greater))
            .collect();

        for li in 0..levels.len() {
            for &k in &levels[li].1 {
                let ahead = if forward[&k] {
                    levels.get(li + 1)
                } else if li > 0 {
                    levels.get(li - 1)
                } else {
                    None
                };
                let Some((_, ks)) = ahead else { continue };
                let sj = riders[ks[0] - 1].start.clone();
                let first_t0 = ks
                    .iter()
                    .map(|&j| riders[j - 1].t0.clone())
                    .min()
                    .expect("non-empty level");
                let m = &riders[k - 1];
                if m.param(&sj).approx_cmp(&m.param(m.d())) != Ordering::Greater
                    && first_t0.approx_cmp(&tau_unchecked(m, &sj)) != Ordering::Greater
                {
                    riders[k - 1].dest = Some(sj);
                }
            }
        }

        for li in 0..levels.len().saturating_sub(1) {
            let i = levels[li].1.iter().copied().find(|k| forward[k]);
            let j = levels[li + 1].1.iter().copied().find(|k| !forward[k]);
            if let (Some(i), Some(j)) = (i, j) {
                head_on(&riders, &u, i, j, &mut extra);
            }
        }
    }
    Ok(Preprocessed {
        instance: Instance {
            motorcycles: riders,
            walls: inst.walls.clone(),
            bit_width: inst.bit_width,
        },
        extra,
    })
}

/// `i` moves along `u`, `j` against it, `j` ahead of `i`.
fn head_on<S: Scalar>(
    riders: &[Motorcycle<S>],
    u: &Point2<S>,
    i: usize,
    j: usize,
    extra: &mut [Vec<Point2<S>>],
) {
    let (ri, rj) = (&riders[i - 1], &riders[j - 1]);
    let gap = rj.start.clone() - ri.start.clone()
        + rj.velocity.scale(&(ri.t0.clone() - rj.t0.clone()));
    let x = gap.dot(u) / (ri.velocity.clone() - rj.velocity.clone()).dot(u);
    let y = x.clone() + ri.t0.clone() - rj.t0.clone();
    if x.sign() != Ordering::Greater || y.sign() != Ordering::Greater {
        return;
    }
    let m = ri.point_at(&x);
    let xi = ri.param(ri.d());
    let yj = rj.param(rj.d());
    let i_short = x.approx_cmp(&xi) == Ordering::Greater;
    let j_short = y.approx_cmp(&yj) == Ordering::Greater;
    let mut add = |k: usize, p: Point2<S>| {
        if !riders[k - 1].d().approx_eq(&p) {
            extra[k - 1].push(p);
        }
    };
    match (i_short, j_short) {
        (false, false) => {
            add(i, m.clone());
            add(j, m);
        }
        (true, false) => {
            if rj.on_segment(ri.d()) {
                add(j, ri.d().clone());
            }
        }
        (false, true) => {
            if ri.on_segment(rj.d()) {
                add(i, rj.d().clone());
            }
        }
        (true, true) => {}
    }
}

/// Records looked up by point under the tolerance predicate.
#[derive(Clone, Debug)]
struct PointIndex<S> {
    by_x: BTreeMap<S, Vec<(Point2<S>, usize)>>,
}

impl<S: Scalar> PointIndex<S> {
    fn new() -> Self {
        PointIndex {
            by_x: BTreeMap::new(),
        }
    }

    fn find(&self, p: &Point2<S>) -> Option<usize> {
        let (lo, hi) = p.x.key_window();
        self.by_x
            .range(lo..=hi)
            .flat_map(|(_, v)| v.iter())
            .find(|(q, _)| q.approx_eq(p))
            .map(|(_, id)| *id)
    }

    fn insert(&mut self, p: Point2<S>, id: usize) {
        self.by_x.entry(p.x.clone()).or_default().push((p, id));
    }
}

/// The algorithm state. Build with [`Solver::new`], then call
/// [`Solver::step`] or [`Solver::run`].
pub struct Solver<S: Scalar> {
    riders: Vec<Motorcycle<S>>,
    walls: Vec<Wall<S>>,
    bit_width: Option<u32>,
    config: SolverConfig<S>,
    st: Vec<RiderState<S>>,
    records: Vec<TargetRecord<S>>,
    index: PointIndex<S>,
    queue: BTreeSet<(S, usize)>,
    keys: Vec<Option<S>>,
    halver: Box<dyn HalvingStrategy<S>>,
    shooter: Box<dyn RayShooter<S>>,
    policy: Option<Box<dyn SpawnPolicy<S>>>,
    results: Vec<Option<RiderResult<S>>>,
    spawned: Vec<Motorcycle<S>>,
    stats: Stats,
    trace: Vec<TraceRecord<S>>,
    seq: usize,
    created: Vec<(usize, Point2<S>, S)>,
}

impl<S: Scalar> Solver<S> {
    pub fn new(
        inst: &Instance<S>,
        config: SolverConfig<S>,
        policy: Option<Box<dyn SpawnPolicy<S>>>,
    ) -> Result<Self> {
        let prepared = prepare(inst)?;
        let pre = preprocess_collinear(&prepared)?;
        let policy = policy.filter(|p| p.active());
        if policy.is_some()
            && config.halving.mode != HalvingMode::Midpoint
            && !config.unchecked_spawns
        {
            return Err(Error::InvalidInput(format!(
                "spawning riders needs midpoint halving, not {}",
                config.halving.mode
            )));
        }
        let riders = pre.instance.motorcycles;
        let bit_width = pre
            .instance
            .bit_width
            .or_else(|| inferred_bit_width(&riders));
        let halver = config.halving.strategy(&riders, bit_width)?;

        let walls = pre.instance.walls;
        let mut pts: Vec<&Point2<S>> = Vec::new();
        // Destinations may lie far out on the arrangement box; the grid
        // covers where the riders start, which is where most tracks meet.
        for m in &riders {
            pts.push(&m.start);
        }
        for w in &walls {
            pts.push(&w.a);
            pts.push(&w.b);
        }
        let bounds = BBox::around(pts).unwrap_or(BBox {
            lo: Point2::zero(),
            hi: Point2::from_i64(1, 1),
        });
        let mut shooter = make_shooter(config.shooter, &bounds, riders.len() + walls.len());
        for (k, w) in walls.iter().enumerate() {
            shooter.insert(TrackSegment {
                owner: OwnerId::Wall(k + 1),
                a: w.a.clone(),
                b: w.b.clone(),
                kind: TrackKind::Wall,
            })?;
        }

        let mut solver = Solver {
            riders: Vec::new(),
            walls,
            bit_width,
            config,
            st: Vec::new(),
            records: Vec::new(),
            index: PointIndex::new(),
            queue: BTreeSet::new(),
            keys: Vec::new(),
            halver,
            shooter,
            policy,
            results: Vec::new(),
            spawned: Vec::new(),
            stats: Stats::default(),
            trace: Vec::new(),
            seq: 0,
            created: Vec::new(),
        };
        for (m, extra) in riders.into_iter().zip(pre.extra) {
            solver.add_rider(m, extra)?;
        }
        Ok(solver)
    }

    pub fn riders(&self) -> &[Motorcycle<S>] {
        &self.riders
    }

    /// Final result of a rider that has stopped.
    pub fn result_of(&self, id: usize) -> Option<&RiderResult<S>> {
        self.results[id - 1].as_ref()
    }

    pub fn walls(&self) -> &[Wall<S>] {
        &self.walls
    }

    pub fn state(&self, id: usize) -> &RiderState<S> {
        &self.st[id - 1]
    }

    pub fn records(&self) -> &[TargetRecord<S>] {
        &self.records
    }

    pub fn record_at(&self, p: &Point2<S>) -> Option<&TargetRecord<S>> {
        self.index.find(p).map(|k| &self.records[k])
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn trace(&self) -> &[TraceRecord<S>] {
        &self.trace
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Next event as `(time, rider)`.
    pub fn peek(&self) -> Option<(&S, usize)> {
        self.queue.first().map(|(t, i)| (t, *i))
    }

    fn rider(&self, id: usize) -> &Motorcycle<S> {
        &self.riders[id - 1]
    }

    fn record_for(&mut self, p: &Point2<S>) -> usize {
        if let Some(k) = self.index.find(p) {
            return k;
        }
        let k = self.records.len();
        self.records.push(TargetRecord::new(p.clone()));
        self.index.insert(p.clone(), k);
        k
    }

    fn add_rider(&mut self, m: Motorcycle<S>, mut extra: Vec<Point2<S>>) -> Result<()> {
        let id = m.id;
        if id != self.riders.len() + 1 {
            return Err(Error::Internal(format!("rider {id} added out of order")));
        }
        extra.sort_by(|a, b| m.param(b).cmp(&m.param(a)));
        extra.dedup_by(|a, b| a.approx_eq(b));
        let start = m.start.clone();
        let dest = m.d().clone();
        self.shooter.insert(TrackSegment {
            owner: OwnerId::Rider(id),
            a: start.clone(),
            b: start.clone(),
            kind: TrackKind::Tentative,
        })?;
        self.riders.push(m);
        self.st.push(RiderState {
            c: start.clone(),
            t: start.clone(),
            stack: Vec::new(),
            alive: true,
            started: false,
        });
        self.results.push(None);
        self.keys.push(None);
        self.push_target(id, dest, TargetKind::Dest, false);
        for p in extra {
            self.push_target(id, p, TargetKind::Meet, false);
        }
        self.push_target(id, start, TargetKind::Start, false);
        self.requeue(id);
        Ok(())
    }

    fn push_target(&mut self, i: usize, p: Point2<S>, kind: TargetKind, log: bool) -> usize {
        let rec = self.record_for(&p);
        let m = &self.riders[i - 1];
        self.records[rec].add_member(m);
        if log {
            self.created.push((i, p.clone(), tau_unchecked(m, &p)));
        }
        let st = &mut self.st[i - 1];
        st.stack.push(Target {
            point: p,
            record: rec,
            kind,
        });
        let chi = st.stack.iter().filter(|t| t.kind == TargetKind::Chi).count();
        self.stats.peak_chi_targets = self.stats.peak_chi_targets.max(chi);
        rec
    }

    fn requeue(&mut self, i: usize) {
        if let Some(k) = self.keys[i - 1].take() {
            self.queue.remove(&(k, i));
        }
        if !self.st[i - 1].alive {
            return;
        }
        if let Some(top) = self.st[i - 1].stack.last() {
            let k = tau_unchecked(&self.riders[i - 1], &top.point);
            self.queue.insert((k.clone(), i));
            self.keys[i - 1] = Some(k);
        }
    }

    /// Make the top target the end of the tentative track.
    fn sync_tentative(&mut self, i: usize) -> Result<()> {
        let t = self.st[i - 1]
            .stack
            .last()
            .map(|t| t.point.clone())
            .ok_or_else(|| Error::Internal(format!("rider {i} has an empty stack")))?;
        self.st[i - 1].t = t.clone();
        self.shooter.update(TrackSegment {
            owner: OwnerId::Rider(i),
            a: self.riders[i - 1].start.clone(),
            b: t,
            kind: TrackKind::Tentative,
        })?;
        self.requeue(i);
        Ok(())
    }

    /// Whether `p` is on the confirmed track of `j`.
    fn confirmed_through(&self, j: usize, p: &Point2<S>) -> bool {
        let st = &self.st[j - 1];
        if !st.started {
            return false;
        }
        let m = &self.riders[j - 1];
        if !m.on_line(p) {
            return false;
        }
        let l = m.param(p);
        l.sign() != Ordering::Less && l.approx_cmp(&m.param(&st.c)) != Ordering::Greater
    }

    fn crash_partner(&self, i: usize, rec: usize, ti: &S) -> Option<usize> {
        if self.config.fault == Some(Fault::SkipBlockedCheck) {
            return None;
        }
        let r = &self.records[rec];
        let mut best: Option<(S, usize)> = None;
        let mut consider = |k: usize| {
            let tk = tau_unchecked(&self.riders[k - 1], &r.point);
            if k == i || tk.approx_cmp(ti) == Ordering::Greater {
                return;
            }
            if best.as_ref().is_none_or(|(bt, bk)| match tk.approx_cmp(bt) {
                Ordering::Less => true,
                Ordering::Equal => k < *bk,
                Ordering::Greater => false,
            }) {
                best = Some((tk, k));
            }
        };
        for &k in &r.arrivals {
            consider(k);
        }
        for &k in &r.partners {
            if self.confirmed_through(k, &r.point) {
                consider(k);
            }
        }
        if let Some(k) = r.earliest_two().into_iter().flatten().find(|&k| k != i) {
            let tk = tau_unchecked(&self.riders[k - 1], &r.point);
            if tk.approx_eq(ti) {
                consider(k);
            }
        }
        best.map(|b| b.1)
    }

    fn kill(&mut self, i: usize, p: Point2<S>, t: S, outcome: Outcome) -> Result<()> {
        let stack = self.st[i - 1].stack.clone();
        for tgt in &stack {
            self.records[tgt.record].remove_member(&self.riders[i - 1]);
        }
        let st = &mut self.st[i - 1];
        st.alive = false;
        st.c = p.clone();
        st.t = p.clone();
        self.requeue(i);
        self.shooter.update(TrackSegment {
            owner: OwnerId::Rider(i),
            a: self.riders[i - 1].start.clone(),
            b: p.clone(),
            kind: TrackKind::ConfirmedFinal,
        })?;
        self.results[i - 1] = Some(RiderResult {
            kappa: p,
            t_final: t,
            outcome,
        });
        Ok(())
    }

    fn halve(&mut self, i: usize, p: &Point2<S>, q: &Point2<S>) -> Result<Halving<S>> {
        self.stats.halving_queries += 1;
        self.halver.halve(&self.riders, i, p, q)
    }

    /// `p` lies inside the tentative track of `j`: make it a target and cut
    /// the tentative track back by halving.
    fn retract(&mut self, j: usize, p: &Point2<S>) -> Result<()> {
        let cj = self.st[j - 1].c.clone();
        self.push_target(j, p.clone(), TargetKind::Chi, true);
        if let Halving::Split(h) = self.halve(j, &cj, p)? {
            self.push_target(j, h, TargetKind::Halving, true);
        }
        self.sync_tentative(j)
    }

    /// Process the next event. Returns `false` once the queue is empty.
    pub fn step(&mut self) -> Result<bool> {
        let Some((_, i)) = self.queue.pop_first() else {
            return Ok(false);
        };
        self.keys[i - 1] = None;
        self.stats.events_processed += 1;
        self.created.clear();
        let top = self.st[i - 1]
            .stack
            .pop()
            .ok_or_else(|| Error::Internal(format!("rider {i} queued with an empty stack")))?;
        let p = top.point;
        let rec = top.record;
        self.records[rec].remove_member(&self.riders[i - 1]);
        let first = !self.st[i - 1].started;
        self.st[i - 1].started = true;
        self.st[i - 1].c = p.clone();
        let ti = tau_unchecked(self.rider(i), &p);

        if !first {
            if let Some(j) = self.crash_partner(i, rec, &ti) {
                self.records[rec].arrivals.push(i);
                self.kill(i, p.clone(), ti.clone(), Outcome::CrashedInto(j))?;
                self.log(i, ti.clone(), p.clone(), TraceCase::Crash { into: j });
                return self.after_crash(i, j, &p, &ti).map(|_| true);
            }
        }
        if p.approx_eq(self.rider(i).d()) {
            self.records[rec].arrivals.push(i);
            let outcome = Outcome::at_destination(self.rider(i).dest_kind);
            self.kill(i, p.clone(), ti.clone(), outcome)?;
            self.log(i, ti, p, TraceCase::Stop);
            return Ok(true);
        }

        let case = self.advance(i, &p)?;
        self.records[rec].arrivals.push(i);
        self.log(i, ti, p, case);
        Ok(true)
    }

    /// Shoot from `p` and grow or cut the tentative track of `i`.
    fn advance(&mut self, i: usize, p: &Point2<S>) -> Result<TraceCase> {
        let me = self.rider(i).clone();
        let top = self.st[i - 1]
            .stack
            .last()
            .cloned()
            .ok_or_else(|| Error::Internal(format!("rider {i} has no target past {p:?}")))?;
        let reach = me.param(&top.point) - me.param(p);
        self.stats.ray_queries += 1;
        let hits = self.shooter.shoot_within(p, &me.velocity, Some(i), &reach);
        let order = hits.first().map(|h| h.distance.approx_cmp(&reach));

        match order {
            None | Some(Ordering::Greater) => {
                self.sync_tentative(i)?;
                Ok(TraceCase::Extend)
            }
            Some(Ordering::Equal) => {
                let q = top.point;
                let owners: Vec<usize> = hits.iter().filter_map(rider_owner).collect();
                for &j in &owners {
                    self.records[top.record].add_partner(j);
                }
                self.sync_tentative(i)?;
                for j in owners {
                    if self.st[j - 1].alive
                        && !self.confirmed_through(j, &q)
                        && !self.records[top.record].contains(self.rider(j))
                    {
                        self.retract(j, &q)?;
                    }
                }
                Ok(TraceCase::Extend)
            }
            Some(Ordering::Less) => {
                if let Some(w) = hits.iter().find(|h| matches!(h.owner, OwnerId::Wall(_))) {
                    return Err(Error::Internal(format!(
                        "rider {i} meets {} before its destination",
                        w.owner
                    )));
                }
                let owners: Vec<usize> = hits.iter().filter_map(rider_owner).collect();
                let crossing_owner = owners
                    .iter()
                    .copied()
                    .find(|&j| !parallel(&me.velocity, &self.rider(j).velocity));
                let hit = match crossing_owner {
                    Some(j) => crossing(&me, self.rider(j))
                        .ok_or_else(|| Error::Internal("crossing vanished".into()))?,
                    None => hits[0].point.clone(),
                };
                let prec = self.push_target(i, hit.clone(), TargetKind::Chi, true);
                for &j in &owners {
                    self.records[prec].add_partner(j);
                }
                if crossing_owner.is_some() {
                    if let Halving::Split(h) = self.halve(i, p, &hit)? {
                        self.push_target(i, h, TargetKind::Halving, true);
                    }
                }
                self.sync_tentative(i)?;
                for j in owners {
                    if self.st[j - 1].alive
                        && !parallel(&me.velocity, &self.rider(j).velocity)
                        && !self.confirmed_through(j, &hit)
                        && !self.records[prec].contains(self.rider(j))
                    {
                        self.retract(j, &hit)?;
                    }
                }
                Ok(TraceCase::Halve)
            }
        }
    }

    fn after_crash(&mut self, i: usize, j: usize, p: &Point2<S>, ti: &S) -> Result<()> {
        if self.policy.is_none() || self.st[j - 1].alive {
            return Ok(());
        }
        let mutual = match &self.results[j - 1] {
            Some(r) => {
                r.outcome == Outcome::CrashedInto(i) && r.kappa.approx_eq(p) && r.t_final.approx_eq(ti)
            }
            None => false,
        };
        if !mutual {
            return Ok(());
        }
        let (a, b) = (i.min(j), i.max(j));
        check_spawn_site(&self.riders, p, ti, a, b)?;
        let produced = self.policy.as_ref().expect("checked above").spawn(
            p,
            ti,
            self.rider(a),
            self.rider(b),
        )?;
        let admitted = admit_spawned(&self.riders, &self.walls, ti, produced)?;
        if admitted.is_empty() {
            return Ok(());
        }
        for m in admitted {
            self.stats.spawned_count += 1;
            self.spawned.push(m.clone());
            self.add_rider(m, Vec::new())?;
        }
        if self.config.halving.mode == HalvingMode::COriented {
            self.halver = self.config.halving.strategy(&self.riders, self.bit_width)?;
        }
        Ok(())
    }

    fn log(&mut self, i: usize, time: S, point: Point2<S>, case: TraceCase) {
        self.seq += 1;
        if !self.config.record_trace {
            return;
        }
        let st = &self.st[i - 1];
        let tentative = st
            .alive
            .then(|| (st.t.clone(), tau_unchecked(&self.riders[i - 1], &st.t)));
        self.trace.push(TraceRecord {
            seq: self.seq,
            rider: i,
            time,
            point,
            case,
            tentative,
            created: std::mem::take(&mut self.created),
        });
    }

    fn event_budget(&self) -> u64 {
        let n = self.riders.len().max(1) as u64;
        let w = self.bit_width.unwrap_or(64) as u64;
        1_000_000 + 64 * n * (w + 2 * (64 - n.leading_zeros() as u64) + 8)
    }

    /// Run to completion.
    pub fn run(mut self) -> Result<Solution<S>> {
        let clock = Instant::now();
        let mut budget = self.event_budget();
        while self.step()? {
            budget = budget.saturating_sub(1);
            if budget == 0 {
                return Err(Error::Internal("event budget exhausted".into()));
            }
            if budget % 4096 == 0 {
                budget = budget.min(self.event_budget());
            }
        }
        self.finish(clock.elapsed())
    }

    fn finish(mut self, elapsed: Duration) -> Result<Solution<S>> {
        self.stats.wall_time = elapsed;
        self.stats.max_chi_targets_in_any_stack = self
            .st
            .iter()
            .map(|s| s.stack.iter().filter(|t| t.kind == TargetKind::Chi).count())
            .max()
            .unwrap_or(0);
        let riders = self
            .results
            .into_iter()
            .enumerate()
            .map(|(k, r)| r.ok_or_else(|| Error::Internal(format!("rider {} never stopped", k + 1))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Solution {
            result: MgResult {
                riders,
                spawned: self.spawned,
            },
            stats: self.stats,
            trace: self.trace,
        })
    }

    /// Invariants of the current state. Empty when everything holds.
    pub fn verify_state(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.riders.len();
        for i in 1..=n {
            let m = self.rider(i);
            let st = &self.st[i - 1];
            let (lc, lt) = (m.param(&st.c), m.param(&st.t));
            if lc.approx_cmp(&lt) == Ordering::Greater {
                out.push(format!("rider {i}: confirmed end beyond tentative end"));
            }
            if lt.approx_cmp(&m.param(m.d())) == Ordering::Greater {
                out.push(format!("rider {i}: tentative end beyond destination"));
            }
            if !st.alive {
                if !st.c.approx_eq(&st.t) {
                    out.push(format!("rider {i}: dead with an open tentative track"));
                }
                continue;
            }
            match st.stack.last() {
                Some(top) if top.point.approx_eq(&st.t) || !st.started => {}
                _ => out.push(format!("rider {i}: tentative end is not the top target")),
            }
            for w in st.stack.windows(2) {
                if m.param(&w[0].point).approx_cmp(&m.param(&w[1].point)) != Ordering::Greater {
                    out.push(format!("rider {i}: stack out of order"));
                }
            }
            if st.started {
                if let Some(top) = st.stack.last() {
                    if m.param(&top.point).approx_cmp(&lc) != Ordering::Greater {
                        out.push(format!("rider {i}: target behind the confirmed end"));
                    }
                }
            }
        }
        for i in 1..=n {
            for j in i + 1..=n {
                if let Some(v) = self.tracks_conflict(i, j) {
                    out.push(format!("riders {i} and {j}: {v}"));
                }
            }
        }
        out
    }

    fn tracks_conflict(&self, i: usize, j: usize) -> Option<&'static str> {
        let (a, b) = (&self.rider(i).start, &self.st[i - 1].t);
        let (c, d) = (&self.rider(j).start, &self.st[j - 1].t);
        if a.approx_eq(b) || c.approx_eq(d) {
            return None;
        }
        let (o1, o2) = (orient(a, b, c), orient(a, b, d));
        let (o3, o4) = (orient(c, d, a), orient(c, d, b));
        if o1 == Ordering::Equal && o2 == Ordering::Equal {
            let m = self.rider(i);
            let (lb, lc, ld) = (m.param(b), m.param(c), m.param(d));
            let (lo, hi) = if lc <= ld { (lc, ld) } else { (ld, lc) };
            let start = S::max_approx(S::zero(), lo);
            let end = S::min_approx(lb, hi);
            return (start.approx_cmp(&end) == Ordering::Less).then_some("collinear overlap");
        }
        let proper = o1 != Ordering::Equal
            && o2 != Ordering::Equal
            && o1 != o2
            && o3 != Ordering::Equal
            && o4 != Ordering::Equal
            && o3 != o4;
        proper.then_some("tracks cross")
    }
}

fn rider_owner<S>(h: &crate::rayshoot::Hit<S>) -> Option<usize> {
    match h.owner {
        OwnerId::Rider(j) => Some(j),
        OwnerId::Wall(_) => None,
    }
}

/// Motorcycle graph of `inst` without spawning.
pub fn compute_motorcycle_graph<S: Scalar>(
    inst: &Instance<S>,
    config: SolverConfig<S>,
) -> Result<Solution<S>> {
    Solver::new(inst, config, None)?.run()
}

/// Motorcycle graph with riders created at mutual crashes.
pub fn compute_with_spawns<S: Scalar>(
    inst: &Instance<S>,
    config: SolverConfig<S>,
    policy: Box<dyn SpawnPolicy<S>>,
) -> Result<Solution<S>> {
    Solver::new(inst, config, Some(policy))?.run()
}

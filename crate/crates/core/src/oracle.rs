//! Brute-force chronological simulation. Ground truth for the solver.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geom::{crossing, tau_unchecked, DestKind, Instance, Motorcycle, Point2};
use crate::scalar::Scalar;
use crate::spawn::{admit_spawned, check_spawn_site, NeverSpawn, SpawnPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    CrashedInto(usize),
    ReachedDestination,
    HitWall,
    Escaped,
}

impl Outcome {
    pub fn at_destination(kind: DestKind) -> Self {
        match kind {
            DestKind::Given => Outcome::ReachedDestination,
            DestKind::Wall => Outcome::HitWall,
            DestKind::Box => Outcome::Escaped,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiderResult<S> {
    pub kappa: Point2<S>,
    pub t_final: S,
    pub outcome: Outcome,
}

/// The motorcycle graph: one entry per rider (input riders first, then
/// spawned ones in creation order) and the spawned riders themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MgResult<S> {
    pub riders: Vec<RiderResult<S>>,
    pub spawned: Vec<Motorcycle<S>>,
}

impl<S: Scalar> MgResult<S> {
    pub fn rider(&self, id: usize) -> &RiderResult<S> {
        &self.riders[id - 1]
    }

    /// First rider (1-based) whose result differs, comparing points and
    /// times with the tolerance predicate.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        let n = self.riders.len().max(other.riders.len());
        (0..n)
            .find(|&k| match (self.riders.get(k), other.riders.get(k)) {
                (Some(a), Some(b)) => {
                    a.outcome != b.outcome
                        || !a.kappa.approx_eq(&b.kappa)
                        || !a.t_final.approx_eq(&b.t_final)
                }
                _ => true,
            })
            .map(|k| k + 1)
    }
}

/// First point beyond `i`'s start that the part of `j`'s track up to ray
/// parameter `yj_max` covers no later than `i` arrives there. `i` and `j`
/// must share their supporting line. Returns `(param_i, point, tau_j)`.
pub fn collinear_catch<S: Scalar>(
    i: &Motorcycle<S>,
    j: &Motorcycle<S>,
    yj_max: &S,
) -> Option<(S, Point2<S>, S)> {
    let vi2 = i.velocity.norm2();
    let beta = j.velocity.dot(&i.velocity) / vi2;
    let b = i.param(&j.start);
    let xi_max = i.param(i.d());
    let c = b.clone() + i.t0.clone() - j.t0.clone();
    let one_minus = S::one() - beta.clone();

    // Bounds on y, the ray parameter of j: (value, strict).
    let mut lo: (S, bool) = (S::zero(), false);
    let mut hi: (S, bool) = (yj_max.clone(), false);
    let tighten_lo = |lo: &mut (S, bool), v: S, strict: bool| match v.approx_cmp(&lo.0) {
        Ordering::Greater => *lo = (v, strict),
        Ordering::Equal => lo.1 |= strict,
        Ordering::Less => {}
    };
    let tighten_hi = |hi: &mut (S, bool), v: S, strict: bool| match v.approx_cmp(&hi.0) {
        Ordering::Less => *hi = (v, strict),
        Ordering::Equal => hi.1 |= strict,
        Ordering::Greater => {}
    };
    let forward = beta.sign() == Ordering::Greater;
    // x = b + beta y > 0
    let y0 = -b.clone() / beta.clone();
    // x <= xi_max
    let y1 = (xi_max - b.clone()) / beta.clone();
    if forward {
        tighten_lo(&mut lo, y0, true);
        tighten_hi(&mut hi, y1, false);
    } else {
        tighten_hi(&mut hi, y0, true);
        tighten_lo(&mut lo, y1, false);
    }
    // (1 - beta) y <= c
    match one_minus.sign() {
        Ordering::Greater => tighten_hi(&mut hi, c / one_minus, false),
        Ordering::Less => tighten_lo(&mut lo, c / one_minus, false),
        Ordering::Equal => {
            if c.sign() == Ordering::Less {
                return None;
            }
        }
    }
    match lo.0.approx_cmp(&hi.0) {
        Ordering::Greater => return None,
        Ordering::Equal if lo.1 || hi.1 => return None,
        _ => {}
    }
    // x is minimised at the low end of y when j moves the same way as i.
    let (y, strict) = if forward { lo } else { hi };
    if strict {
        return None;
    }
    let p = j.point_at(&y);
    let x = i.param(&p);
    Some((x, p, j.t0.clone() + y))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate<S> {
    t: S,
    rider: usize,
    /// 0 for a crash, 1 for reaching the destination.
    kind: u8,
    tau_other: S,
    other: usize,
    point: Point2<S>,
}

struct Sim<'a, S: Scalar> {
    riders: Vec<Motorcycle<S>>,
    walls: &'a [crate::geom::Wall<S>],
    done: Vec<Option<RiderResult<S>>>,
    /// Ray parameter of each finished rider's final point.
    done_param: Vec<Option<S>>,
    heap: BinaryHeap<Reverse<Candidate<S>>>,
    /// Riders crashing at one point at the current instant with a partner
    /// that arrived at that same instant.
    ties: Vec<(Point2<S>, S, Vec<(usize, usize)>)>,
}

impl<S: Scalar> Sim<'_, S> {
    fn push_pair(&mut self, i: usize, j: usize) {
        let (mi, mj) = (&self.riders[i - 1], &self.riders[j - 1]);
        if mi.supporting_line_eq(mj) {
            let y = mj.param(mj.d());
            if let Some((_, p, tj)) = collinear_catch(mi, mj, &y) {
                self.push_crash(i, j, p, tj);
            }
            return;
        }
        let Some(p) = crossing(mi, mj) else {
            return;
        };
        if !mi.on_segment(&p) || !mj.on_segment(&p) || mi.param(&p).sign() != Ordering::Greater {
            return;
        }
        let ti = tau_unchecked(mi, &p);
        let tj = tau_unchecked(mj, &p);
        if tj.approx_cmp(&ti) != Ordering::Greater {
            self.push_crash(i, j, p, tj);
        }
    }

    fn push_crash(&mut self, i: usize, j: usize, p: Point2<S>, tj: S) {
        let t = tau_unchecked(&self.riders[i - 1], &p);
        self.heap.push(Reverse(Candidate {
            t,
            rider: i,
            kind: 0,
            tau_other: tj,
            other: j,
            point: p,
        }));
    }

    fn push_dest(&mut self, i: usize) {
        let m = &self.riders[i - 1];
        let d = m.d().clone();
        self.heap.push(Reverse(Candidate {
            t: tau_unchecked(m, &d),
            rider: i,
            kind: 1,
            tau_other: S::zero(),
            other: 0,
            point: d,
        }));
    }

    fn add_rider(&mut self, m: Motorcycle<S>) {
        let id = m.id;
        self.riders.push(m);
        self.done.push(None);
        self.done_param.push(None);
        self.push_dest(id);
        for other in 1..id {
            if self.done[other - 1].is_none() {
                self.push_pair(other, id);
            }
            self.push_pair(id, other);
        }
    }

    fn finish(&mut self, c: &Candidate<S>, outcome: Outcome) {
        let m = &self.riders[c.rider - 1];
        self.done_param[c.rider - 1] = Some(m.param(&c.point));
        self.done[c.rider - 1] = Some(RiderResult {
            kappa: c.point.clone(),
            t_final: c.t.clone(),
            outcome,
        });
    }

    fn step(&mut self, c: Candidate<S>) {
        let i = c.rider;
        if self.done[i - 1].is_some() {
            return;
        }
        if c.kind == 1 {
            let kind = self.riders[i - 1].dest_kind;
            self.finish(&c, Outcome::at_destination(kind));
            return;
        }
        let j = c.other;
        if let Some(yj) = &self.done_param[j - 1] {
            let mj = &self.riders[j - 1];
            if mj.param(&c.point).approx_cmp(yj) == Ordering::Greater {
                // j stopped short of the point. On a shared line a later
                // point of j's shorter track may still catch i.
                let mi = &self.riders[i - 1];
                if mi.supporting_line_eq(mj) {
                    if let Some((_, p, tj)) = collinear_catch(mi, mj, &yj.clone()) {
                        self.push_crash(i, j, p, tj);
                    }
                }
                return;
            }
        }
        self.finish(&c, Outcome::CrashedInto(j));
        if c.tau_other.approx_eq(&c.t) {
            match self
                .ties
                .iter_mut()
                .find(|(p, t, _)| p.approx_eq(&c.point) && t.approx_eq(&c.t))
            {
                Some((_, _, g)) => g.push((i, j)),
                None => self.ties.push((c.point.clone(), c.t.clone(), vec![(i, j)])),
            }
        }
    }

    fn flush_ties<P: SpawnPolicy<S> + ?Sized>(&mut self, policy: &P) -> Result<()> {
        for (p, t, group) in std::mem::take(&mut self.ties) {
            let [(a, pa), (b, pb)] = group[..] else {
                if group.len() > 2 && policy.active() {
                    return Err(Error::Degenerate(format!(
                        "{} riders collide at one instant",
                        group.len()
                    )));
                }
                continue;
            };
            if pa != b || pb != a {
                continue;
            }
            let (a, b) = (a.min(b), a.max(b));
            check_spawn_site(&self.riders, &p, &t, a, b)?;
            let produced = policy.spawn(&p, &t, &self.riders[a - 1], &self.riders[b - 1])?;
            for m in admit_spawned(&self.riders, self.walls, &t, produced)? {
                self.add_rider(m);
            }
        }
        Ok(())
    }
}

fn require_prepared<S: Scalar>(inst: &Instance<S>) -> Result<()> {
    inst.validate()?;
    if let Some(m) = inst.motorcycles.iter().find(|m| m.dest.is_none()) {
        return Err(Error::Contract(format!(
            "rider {} has no destination; prepare the instance first",
            m.id
        )));
    }
    Ok(())
}

/// Chronological simulation without spawning.
pub fn simulate<S: Scalar>(inst: &Instance<S>) -> Result<MgResult<S>> {
    simulate_with_spawns(inst, &NeverSpawn)
}

/// Chronological simulation; mutual crashes may create riders via `policy`.
pub fn simulate_with_spawns<S: Scalar, P: SpawnPolicy<S> + ?Sized>(
    inst: &Instance<S>,
    policy: &P,
) -> Result<MgResult<S>> {
    require_prepared(inst)?;
    let n = inst.len();
    let mut sim = Sim {
        riders: Vec::with_capacity(n),
        walls: &inst.walls,
        done: Vec::with_capacity(n),
        done_param: Vec::with_capacity(n),
        heap: BinaryHeap::new(),
        ties: Vec::new(),
    };
    sim.riders = inst.motorcycles.clone();
    sim.done = vec![None; n];
    sim.done_param = vec![None; n];
    for i in 1..=n {
        sim.push_dest(i);
        for j in 1..=n {
            if i != j {
                sim.push_pair(i, j);
            }
        }
    }
    loop {
        let next_t = sim.heap.peek().map(|Reverse(c)| c.t.clone());
        if let Some((_, t, _)) = sim.ties.first() {
            let later = next_t
                .as_ref()
                .is_none_or(|nt| nt.approx_cmp(t) == Ordering::Greater);
            if later {
                if policy.active() {
                    sim.flush_ties(policy)?;
                } else {
                    sim.ties.clear();
                }
                continue;
            }
        }
        let Some(Reverse(c)) = sim.heap.pop() else {
            break;
        };
        sim.step(c);
    }
    let spawned = sim.riders[n..].to_vec();
    let riders = sim
        .done
        .into_iter()
        .enumerate()
        .map(|(k, r)| r.ok_or_else(|| Error::Internal(format!("rider {} never finished", k + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(MgResult { riders, spawned })
}

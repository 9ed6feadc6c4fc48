//! Riders created when two riders crash into each other at the same instant.
//!
//! Both the oracle and the solver call into the helpers here so that they
//! accept and reject exactly the same spawn sites.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geom::{clip_one, tau_unchecked, BBox, Motorcycle, Point2, Wall};
use crate::scalar::Scalar;

pub trait SpawnPolicy<S: Scalar> {
    /// New riders for a mutual crash of `a` and `b` (in id order) at `point`
    /// and `time`. Ids are assigned by the caller.
    fn spawn(
        &self,
        point: &Point2<S>,
        time: &S,
        a: &Motorcycle<S>,
        b: &Motorcycle<S>,
    ) -> Result<Vec<Motorcycle<S>>>;

    /// Whether the policy can ever emit riders. Inactive policies skip the
    /// spawn-site checks entirely.
    fn active(&self) -> bool {
        true
    }
}

/// Never creates riders.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeverSpawn;

impl<S: Scalar> SpawnPolicy<S> for NeverSpawn {
    fn spawn(
        &self,
        _: &Point2<S>,
        _: &S,
        _: &Motorcycle<S>,
        _: &Motorcycle<S>,
    ) -> Result<Vec<Motorcycle<S>>> {
        Ok(Vec::new())
    }

    fn active(&self) -> bool {
        false
    }
}

/// Emits one rider moving with the sum of the two velocities, heading for
/// the boundary of `bounds`. A zero sum emits nothing.
#[derive(Clone, Debug)]
pub struct VelocitySumSpawn<S> {
    pub bounds: BBox<S>,
}

impl<S: Scalar> SpawnPolicy<S> for VelocitySumSpawn<S> {
    fn spawn(
        &self,
        point: &Point2<S>,
        time: &S,
        a: &Motorcycle<S>,
        b: &Motorcycle<S>,
    ) -> Result<Vec<Motorcycle<S>>> {
        let v = a.velocity.clone() + b.velocity.clone();
        if v.is_approx_zero() || !self.bounds.strictly_contains(point) {
            return Ok(Vec::new());
        }
        let mut m = Motorcycle::new(0, point.clone(), v).with_t0(time.clone());
        m.dest = Some(self.bounds.exit_point(point, &m.velocity));
        m.dest_kind = crate::geom::DestKind::Box;
        Ok(vec![m])
    }
}

/// Rejects a spawn site that a third rider reaches at the same instant. The
/// test is static (whole segments, not final tracks) so the oracle and the
/// solver agree regardless of processing order.
pub fn check_spawn_site<S: Scalar>(
    riders: &[Motorcycle<S>],
    point: &Point2<S>,
    time: &S,
    a: usize,
    b: usize,
) -> Result<()> {
    for r in riders {
        if r.id == a || r.id == b || !r.on_segment(point) {
            continue;
        }
        if tau_unchecked(r, point).approx_eq(time) {
            return Err(Error::Degenerate(format!(
                "riders {a}, {b} and {} meet at the same instant",
                r.id
            )));
        }
    }
    Ok(())
}

/// Validate and finish the riders produced by a policy: ids, start time,
/// wall clipping and the same-line restriction.
pub fn admit_spawned<S: Scalar>(
    existing: &[Motorcycle<S>],
    walls: &[Wall<S>],
    time: &S,
    produced: Vec<Motorcycle<S>>,
) -> Result<Vec<Motorcycle<S>>> {
    let mut out: Vec<Motorcycle<S>> = Vec::new();
    for mut m in produced {
        m.id = existing.len() + out.len() + 1;
        if m.t0.approx_cmp(time) == Ordering::Less {
            return Err(Error::Contract(format!(
                "spawned rider {} starts at {} before the crash at {}",
                m.id, m.t0, time
            )));
        }
        if m.velocity.is_approx_zero() {
            return Err(Error::Contract(format!("spawned rider {} has zero velocity", m.id)));
        }
        if m.dest.is_none() {
            return Err(Error::Contract(format!("spawned rider {} has no destination", m.id)));
        }
        clip_one(&mut m, walls)?;
        if let Some(o) = existing
            .iter()
            .chain(out.iter())
            .find(|o| o.supporting_line_eq(&m))
        {
            return Err(Error::Degenerate(format!(
                "spawned rider {} shares a supporting line with rider {}",
                m.id, o.id
            )));
        }
        out.push(m);
    }
    Ok(out)
}

//! Checks on graphs induced by random polygons.

use motorcycle_graph::halving::HalvingMode;
use motorcycle_graph::induced::{induced_instance, inward_normal, random, Polygon};
use motorcycle_graph::io::format::{FileConfig, Scenario, SpawnKind};
use motorcycle_graph::error::Error;
use motorcycle_graph::io::report::{oracle, run_verify, solve, solver_config};
use motorcycle_graph::scalar::{Exact, Scalar};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One of the three random families: rectilinear, rotated, or with cut
/// corners and rotated.
pub fn random_polygon(rng: &mut ChaCha8Rng) -> Polygon<Exact> {
    let cols = rng.gen_range(2..=6);
    let base = random::histogram(rng, cols, 6);
    match rng.gen_range(0..3) {
        0 => base,
        1 => random::rotate_345(&base),
        _ => random::rotate_345(&random::cut_corners(rng, &base)),
    }
}

pub fn induced_scenario(poly: Polygon<Exact>) -> Scenario<Exact> {
    Scenario {
        instance: induced_instance(&poly).expect("valid polygon"),
        polygon: Some(poly),
        config: FileConfig {
            halving: HalvingMode::Midpoint,
            spawn: SpawnKind::Induced,
            ..FileConfig::default()
        },
    }
}

pub enum PolygonCheck {
    Passed,
    /// Three or more riders collide at once, which both the solver and the
    /// oracle refuse.
    Rejected(String),
    Failed(String),
}

/// Offset equations, containment and oracle agreement for one polygon.
pub fn check_polygon(poly: Polygon<Exact>) -> PolygonCheck {
    let sc = induced_scenario(poly);
    let solved = solver_config(&sc).and_then(|cfg| solve(&sc, cfg));
    let expected = oracle(&sc);
    match (&solved, &expected) {
        (Err(Error::Degenerate(a)), Err(Error::Degenerate(_))) => return PolygonCheck::Rejected(a.clone()),
        (Err(e), _) | (_, Err(e)) => return PolygonCheck::Failed(e.to_string()),
        _ => {}
    }
    match verify(&sc) {
        Ok(()) => PolygonCheck::Passed,
        Err(e) => PolygonCheck::Failed(e),
    }
}

fn verify(sc: &Scenario<Exact>) -> Result<(), String> {
    let poly = sc.polygon.as_ref().expect("polygon");
    let edges = poly.edges();
    let rep = run_verify(sc, solver_config(&sc).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if !rep.passed() {
        return Err(rep.summary());
    }
    let res = &rep.solution.result;
    let riders = sc.instance.motorcycles.iter().chain(&res.spawned);
    for m in riders {
        let (e1, e2) = m.edges.ok_or_else(|| format!("rider {} has no edges", m.id))?;
        for e in [e1, e2] {
            let (a, b) = &edges[e - 1];
            let n = inward_normal(&(b.clone() - a.clone())).map_err(|e| e.to_string())?;
            if n.dot(&m.velocity) != Exact::one() {
                return Err(format!("rider {} breaks the offset equation of edge {e}", m.id));
            }
        }
        let end = &res.rider(m.id).kappa;
        if !poly.contains_segment(&m.start, end) {
            return Err(format!("rider {} leaves the polygon", m.id));
        }
    }
    Ok(())
}

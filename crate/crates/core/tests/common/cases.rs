//! Named instances for the degenerate suite.

use motorcycle_graph::geom::{Instance, Motorcycle, Point2, Vec2};
use motorcycle_graph::halving::HalvingMode;
use motorcycle_graph::induced::{induced_instance, Polygon};
use motorcycle_graph::io::format::{FileConfig, Scenario, SpawnKind};
use motorcycle_graph::io::generate::nested_fig8;
use motorcycle_graph::scalar::Exact;

use super::{pt, rider};

fn plain(riders: Vec<Motorcycle<Exact>>) -> Scenario<Exact> {
    Scenario {
        instance: Instance::new(riders),
        polygon: None,
        config: FileConfig::default(),
    }
}

fn to(m: Motorcycle<Exact>, x: i64, y: i64) -> Motorcycle<Exact> {
    m.with_dest(pt(x, y))
}

/// Three lines through the origin, reached at different times.
pub fn three_concurrent_staggered() -> Scenario<Exact> {
    plain(vec![
        to(rider(1, (-4, 0), (1, 0)), 6, 0),
        to(rider(2, (0, -3), (0, 1)), 0, 6),
        to(rider(3, (-2, -2), (1, 1)), 5, 5),
    ])
}

/// Three lines through the origin, all reached at time 2.
pub fn three_concurrent_simultaneous() -> Scenario<Exact> {
    plain(vec![
        to(rider(1, (-2, 0), (1, 0)), 6, 0),
        to(rider(2, (0, -2), (0, 1)), 0, 6),
        to(rider(3, (-2, -2), (1, 1)), 5, 5),
    ])
}

/// Two riders reach a crossing together; a third arrives at another
/// rider's destination the moment that rider stops there.
pub fn simultaneous_arrivals() -> Scenario<Exact> {
    plain(vec![
        to(rider(1, (-3, 0), (1, 0)), 8, 0),
        to(rider(2, (0, -3), (0, 1)), 0, 8),
        to(rider(3, (10, -2), (0, 1)), 10, 4),
        to(rider(4, (6, 4), (2, 0)), 14, 4),
    ])
}

pub fn collinear_head_on() -> Scenario<Exact> {
    plain(vec![
        to(rider(1, (0, 0), (1, 0)), 20, 0),
        to(rider(2, (10, 0), (-1, 0)), -10, 0),
        to(rider(3, (4, -6), (0, 1)), 4, 6),
    ])
}

/// The fast rider catches the slow one after it has stopped.
pub fn collinear_chasing() -> Scenario<Exact> {
    plain(vec![
        to(rider(1, (0, 0), (2, 0)), 20, 0),
        to(rider(2, (5, 0), (1, 0)), 8, 0),
        to(rider(3, (1, 1), (1, 1)), 9, 9),
    ])
}

pub fn degenerate_suite() -> Vec<(&'static str, Scenario<Exact>)> {
    vec![
        ("three concurrent lines, staggered", three_concurrent_staggered()),
        ("three concurrent lines, simultaneous", three_concurrent_simultaneous()),
        ("simultaneous arrivals", simultaneous_arrivals()),
        ("collinear head-on", collinear_head_on()),
        ("collinear chasing", collinear_chasing()),
        ("symmetric spawn", symmetric_spawn()),
    ]
}

/// A polygon with two mirrored reflex vertices whose riders meet head-on
/// on the axis and spawn a rider that drives up into the top wall.
pub fn symmetric_spawn_polygon() -> Polygon<Exact> {
    let ring = [(-8, 0), (-4, 3), (-4, -1), (4, -1), (4, 3), (8, 0), (8, 12), (-8, 12)];
    Polygon::new(ring.iter().map(|&(x, y)| Vec2::from_i64(x, y)).collect())
}

pub fn symmetric_spawn() -> Scenario<Exact> {
    let poly = symmetric_spawn_polygon();
    Scenario {
        instance: induced_instance(&poly).expect("valid polygon"),
        polygon: Some(poly),
        config: FileConfig {
            halving: HalvingMode::Midpoint,
            spawn: SpawnKind::Induced,
            bit_width: Some(5),
            ..FileConfig::default()
        },
    }
}

/// The stack-growth family with `k` levels.
pub fn fig8(k: usize, halving: HalvingMode) -> Scenario<Exact> {
    Scenario {
        instance: nested_fig8(k),
        polygon: None,
        config: FileConfig {
            halving,
            spawn: SpawnKind::VelocitySum,
            unchecked_spawns: true,
            ..FileConfig::default()
        },
    }
}

/// The meeting point of the symmetric spawn instance.
pub fn symmetric_meet() -> Point2<Exact> {
    pt(0, 11)
}

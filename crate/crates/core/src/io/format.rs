//! The TOML instance format and the result writer.
//!
//! ```toml
//! [config]
//! backend = "exact"      # exact | float
//! w = 16                 # bit width of the input coordinates
//! halving = "counting"   # counting | midpoint | coriented
//! shooter = "grid"       # linear | grid
//! spawn = "none"         # none | velocity-sum | induced
//! unchecked_spawns = false
//!
//! [[motorcycle]]
//! s = ["0.8", "3.3"]
//! v = ["1/2", -1]
//! d = ["5.8", "0.8"]     # optional
//! t0 = "0"               # optional
//!
//! [[wall]]
//! a = [0, 0]
//! b = [10, 0]
//!
//! [polygon]              # replaces the motorcycle list
//! outer = [[0, 0], [4, 0], [4, 4], [0, 4], [0, 0]]
//! holes = []
//! ```
//!
//! Numbers are integers or strings holding a decimal or `p/q` literal.
//! Float literals are accepted on the float backend only. Rings must be
//! closed: the last point repeats the first.

use std::fmt::Write as _;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::geom::{DestKind, Instance, Motorcycle, Point2, Wall};
use crate::halving::HalvingMode;
use crate::induced::{induced_instance, Polygon};
use crate::oracle::{MgResult, Outcome};
use crate::rayshoot::ShooterKind;
use crate::scalar::{format_rational, parse_rational, Scalar};
use crate::solver::Stats;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(Backend::Exact),
            "float" => Some(Backend::Float),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpawnKind {
    None,
    VelocitySum,
    Induced,
}

impl SpawnKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(SpawnKind::None),
            "velocity-sum" => Some(SpawnKind::VelocitySum),
            "induced" => Some(SpawnKind::Induced),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpawnKind::None => "none",
            SpawnKind::VelocitySum => "velocity-sum",
            SpawnKind::Induced => "induced",
        }
    }
}

/// Run settings from the `[config]` section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileConfig {
    pub backend: Backend,
    pub bit_width: Option<u32>,
    pub halving: HalvingMode,
    pub shooter: ShooterKind,
    pub spawn: SpawnKind,
    /// Midpoint floor as a literal.
    pub min_length: Option<String>,
    /// Spawn even when the halving mode does not cover spawned riders.
    pub unchecked_spawns: bool,
}

impl Default for FileConfig {
    fn default() -> Self {
        FileConfig {
            backend: Backend::Exact,
            bit_width: None,
            halving: HalvingMode::Counting,
            shooter: ShooterKind::Grid,
            spawn: SpawnKind::None,
            min_length: None,
            unchecked_spawns: false,
        }
    }
}

/// A parsed file: the instance (induced when a polygon is given) and the
/// settings.
#[derive(Clone, Debug)]
pub struct Scenario<S> {
    pub instance: Instance<S>,
    pub polygon: Option<Polygon<S>>,
    pub config: FileConfig,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

type Pair = [Spanned<Num>; 2];

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    backend: Option<Spanned<String>>,
    w: Option<u32>,
    halving: Option<Spanned<String>>,
    shooter: Option<Spanned<String>>,
    spawn: Option<Spanned<String>>,
    rho: Option<Spanned<Num>>,
    min_length: Option<Spanned<Num>>,
    unchecked_spawns: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRider {
    id: Option<Spanned<usize>>,
    s: Pair,
    v: Pair,
    d: Option<Pair>,
    t0: Option<Spanned<Num>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWall {
    a: Pair,
    b: Pair,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolygon {
    outer: Spanned<Vec<Pair>>,
    #[serde(default)]
    holes: Vec<Spanned<Vec<Pair>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    config: RawConfig,
    #[serde(default)]
    motorcycle: Vec<RawRider>,
    #[serde(default)]
    wall: Vec<RawWall>,
    polygon: Option<RawPolygon>,
}

/// The parsed text of an instance file, before numbers are converted for a
/// backend. Lets callers read the config first and pick the backend.
pub struct InstanceFile<'a> {
    text: &'a str,
    raw: RawFile,
    pub config: FileConfig,
}

fn position(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |k| k + 1) + 1;
    format!("line {line}, column {col}")
}

fn bad<T>(text: &str, span: std::ops::Range<usize>, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::InvalidInput(format!("{}: {msg}", position(text, span.start))))
}

fn keyword<T>(
    text: &str,
    field: &Option<Spanned<String>>,
    parse: impl Fn(&str) -> Option<T>,
    default: T,
    what: &str,
) -> Result<T> {
    match field {
        None => Ok(default),
        Some(s) => match parse(s.get_ref()) {
            Some(v) => Ok(v),
            None => bad(text, s.span(), format!("unknown {what} `{}`", s.get_ref())),
        },
    }
}

impl<'a> InstanceFile<'a> {
    pub fn parse(text: &'a str) -> Result<Self> {
        let raw: RawFile =
            toml::from_str(text).map_err(|e| Error::InvalidInput(e.to_string().trim().to_string()))?;
        let c = &raw.config;
        let halving = keyword(text, &c.halving, HalvingMode::parse, HalvingMode::Counting, "halving mode")?;
        let config = FileConfig {
            backend: keyword(text, &c.backend, Backend::parse, Backend::Exact, "backend")?,
            bit_width: c.w,
            halving,
            shooter: keyword(text, &c.shooter, ShooterKind::parse, ShooterKind::Grid, "shooter")?,
            spawn: keyword(text, &c.spawn, SpawnKind::parse, SpawnKind::None, "spawn policy")?,
            min_length: match &c.min_length {
                None => None,
                Some(n) => Some(literal(text, n, false)?),
            },
            unchecked_spawns: c.unchecked_spawns.unwrap_or(false),
        };
        if let Some(rho) = &c.rho {
            let lit = literal(text, rho, false)?;
            let (a, b) = halving.rho();
            let want = num_rational::BigRational::new(a.into(), b.into());
            if parse_rational(&lit) != Some(want) {
                return bad(
                    text,
                    rho.span(),
                    format!("rho {lit} does not match {halving} halving, which guarantees {a}/{b}"),
                );
            }
        }
        if raw.polygon.is_some() && !raw.motorcycle.is_empty() {
            return Err(Error::InvalidInput(
                "a file holds either motorcycles or a polygon, not both".into(),
            ));
        }
        Ok(InstanceFile { text, raw, config })
    }

    /// Convert the numbers for backend `S`.
    pub fn build<S: Scalar>(&self) -> Result<Scenario<S>> {
        let text = self.text;
        let float_ok = !S::EXACT;
        let num = |n: &Spanned<Num>| -> Result<S> {
            let lit = literal(text, n, float_ok)?;
            match parse_rational(&lit) {
                Some(r) => Ok(S::from_rational(&r)),
                None => bad(text, n.span(), format!("malformed number `{lit}`")),
            }
        };
        let point = |p: &Pair| -> Result<Point2<S>> { Ok(Point2::new(num(&p[0])?, num(&p[1])?)) };

        if let Some(poly) = &self.raw.polygon {
            let ring = |r: &Spanned<Vec<Pair>>| -> Result<Vec<Point2<S>>> {
                let mut pts = r.get_ref().iter().map(point).collect::<Result<Vec<_>>>()?;
                if pts.len() < 2 || !pts[0].approx_eq(pts.last().expect("non-empty")) {
                    return bad(text, r.span(), "polygon ring is not closed");
                }
                pts.pop();
                Ok(pts)
            };
            let polygon = Polygon {
                outer: ring(&poly.outer)?,
                holes: poly.holes.iter().map(ring).collect::<Result<_>>()?,
            };
            let mut instance = induced_instance(&polygon)?;
            instance.bit_width = self.config.bit_width;
            return Ok(Scenario {
                instance,
                polygon: Some(polygon),
                config: self.config.clone(),
            });
        }

        let n = self.raw.motorcycle.len();
        let mut slots: Vec<Option<Motorcycle<S>>> = vec![None; n];
        for (k, r) in self.raw.motorcycle.iter().enumerate() {
            let id = match &r.id {
                None => k + 1,
                Some(id) => {
                    let v = *id.get_ref();
                    if v == 0 || v > n {
                        return bad(text, id.span(), format!("id {v} is outside 1..{n}"));
                    }
                    if slots[v - 1].is_some() {
                        return bad(text, id.span(), format!("duplicate id {v}"));
                    }
                    v
                }
            };
            if slots[id - 1].is_some() {
                return bad(text, r.s[0].span(), format!("duplicate id {id}"));
            }
            let mut m = Motorcycle::new(id, point(&r.s)?, point(&r.v)?);
            if let Some(d) = &r.d {
                m = m.with_dest(point(d)?);
            }
            if let Some(t0) = &r.t0 {
                m.t0 = num(t0)?;
            }
            slots[id - 1] = Some(m);
        }
        let motorcycles = slots.into_iter().map(|m| m.expect("ids fill 1..n")).collect();
        let walls = self
            .raw
            .wall
            .iter()
            .map(|w| Ok(Wall::new(point(&w.a)?, point(&w.b)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut instance = Instance::new(motorcycles).with_walls(walls);
        instance.bit_width = self.config.bit_width;
        instance.validate()?;
        Ok(Scenario {
            instance,
            polygon: None,
            config: self.config.clone(),
        })
    }
}

fn literal(text: &str, n: &Spanned<Num>, float_ok: bool) -> Result<String> {
    match n.get_ref() {
        Num::Int(v) => Ok(v.to_string()),
        Num::Text(s) => Ok(s.clone()),
        Num::Float(f) if float_ok => Ok(format!("{f:?}")),
        Num::Float(f) => bad(
            text,
            n.span(),
            format!("float literal {f} is inexact on the exact backend; quote it as a string"),
        ),
    }
}

/// Parse a file and build it for backend `S`, ignoring the file's backend.
pub fn parse_instance<S: Scalar>(text: &str) -> Result<Scenario<S>> {
    InstanceFile::parse(text)?.build()
}

/// A number as a literal that parses back to the same value.
pub fn format_scalar<S: Scalar>(x: &S) -> String {
    if S::EXACT {
        format_rational(&x.to_rational())
    } else {
        format!("{:?}", x.to_f64())
    }
}

fn pair<S: Scalar>(p: &Point2<S>) -> String {
    format!("[\"{}\", \"{}\"]", format_scalar(&p.x), format_scalar(&p.y))
}

fn write_config(out: &mut String, c: &FileConfig) {
    out.push_str("[config]\n");
    let _ = writeln!(out, "backend = \"{}\"", c.backend.name());
    if let Some(w) = c.bit_width {
        let _ = writeln!(out, "w = {w}");
    }
    let _ = writeln!(out, "halving = \"{}\"", c.halving.name());
    let _ = writeln!(out, "shooter = \"{}\"", c.shooter.name());
    let _ = writeln!(out, "spawn = \"{}\"", c.spawn.name());
    if let Some(m) = &c.min_length {
        let _ = writeln!(out, "min_length = \"{m}\"");
    }
    if c.unchecked_spawns {
        out.push_str("unchecked_spawns = true\n");
    }
}

/// Serialize a scenario. Only destinations given in the input are written;
/// box and wall destinations are recomputed on load.
pub fn write_instance<S: Scalar>(sc: &Scenario<S>) -> String {
    let mut out = String::new();
    write_config(&mut out, &sc.config);
    if let Some(poly) = &sc.polygon {
        out.push_str("\n[polygon]\n");
        let ring = |r: &Vec<Point2<S>>| {
            let mut pts: Vec<String> = r.iter().map(pair).collect();
            pts.push(pair(&r[0]));
            format!("[{}]", pts.join(", "))
        };
        let _ = writeln!(out, "outer = {}", ring(&poly.outer));
        let holes: Vec<String> = poly.holes.iter().map(ring).collect();
        let _ = writeln!(out, "holes = [{}]", holes.join(", "));
        return out;
    }
    for m in &sc.instance.motorcycles {
        out.push_str("\n[[motorcycle]]\n");
        let _ = writeln!(out, "s = {}", pair(&m.start));
        let _ = writeln!(out, "v = {}", pair(&m.velocity));
        if let (Some(d), DestKind::Given) = (&m.dest, m.dest_kind) {
            let _ = writeln!(out, "d = {}", pair(d));
        }
        if m.t0.sign() != std::cmp::Ordering::Equal {
            let _ = writeln!(out, "t0 = \"{}\"", format_scalar(&m.t0));
        }
    }
    for w in &sc.instance.walls {
        out.push_str("\n[[wall]]\n");
        let _ = writeln!(out, "a = {}", pair(&w.a));
        let _ = writeln!(out, "b = {}", pair(&w.b));
    }
    out
}

/// Plain instance with default settings.
pub fn write_plain_instance<S: Scalar>(inst: &Instance<S>, backend: Backend) -> String {
    write_instance(&Scenario {
        instance: inst.clone(),
        polygon: None,
        config: FileConfig {
            backend,
            bit_width: inst.bit_width,
            ..FileConfig::default()
        },
    })
}

/// The graph as TOML: statistics, then one table per rider.
pub fn write_result<S: Scalar>(res: &MgResult<S>, stats: &Stats) -> String {
    let mut out = String::new();
    out.push_str("[stats]\n");
    let _ = writeln!(out, "events_processed = {}", stats.events_processed);
    let _ = writeln!(out, "ray_queries = {}", stats.ray_queries);
    let _ = writeln!(out, "halving_queries = {}", stats.halving_queries);
    let _ = writeln!(out, "max_chi_targets_in_any_stack = {}", stats.max_chi_targets_in_any_stack);
    let _ = writeln!(out, "spawned_count = {}", stats.spawned_count);
    let _ = writeln!(out, "wall_time_ms = {:.3}", stats.wall_time.as_secs_f64() * 1e3);
    for (k, r) in res.riders.iter().enumerate() {
        out.push_str("\n[[rider]]\n");
        let _ = writeln!(out, "id = {}", k + 1);
        match r.outcome {
            Outcome::CrashedInto(j) => {
                let _ = writeln!(out, "outcome = \"crashed\"\ninto = {j}");
            }
            Outcome::ReachedDestination => out.push_str("outcome = \"destination\"\n"),
            Outcome::HitWall => out.push_str("outcome = \"wall\"\n"),
            Outcome::Escaped => out.push_str("outcome = \"escaped\"\n"),
        }
        let _ = writeln!(out, "kappa = {}", pair(&r.kappa));
        let _ = writeln!(out, "time = \"{}\"", format_scalar(&r.t_final));
        let (x, y) = r.kappa.to_f64();
        let _ = writeln!(out, "approx = [{x:.6}, {y:.6}, {:.6}]", r.t_final.to_f64());
    }
    for m in &res.spawned {
        out.push_str("\n[[spawned]]\n");
        let _ = writeln!(out, "id = {}", m.id);
        let _ = writeln!(out, "s = {}", pair(&m.start));
        let _ = writeln!(out, "v = {}", pair(&m.velocity));
        let _ = writeln!(out, "t0 = \"{}\"", format_scalar(&m.t0));
    }
    out
}

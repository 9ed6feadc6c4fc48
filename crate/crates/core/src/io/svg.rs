//! SVG pictures of a finished graph or of a solver state mid-run.
//!
//! Confirmed tracks are solid, tentative tracks dashed, walls bold, and
//! crash points are circled. The picture covers the bounding box of
//! everything drawn plus a 5% margin, with y pointing up.

use std::fmt::Write as _;

use crate::geom::{Instance, Point2, Wall};
use crate::oracle::{MgResult, Outcome};
use crate::scalar::Scalar;
use crate::solver::Solver;

const WIDTH: f64 = 800.0;

type Seg = ((f64, f64), (f64, f64));

/// The geometry of a picture, in input coordinates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scene {
    pub confirmed: Vec<Seg>,
    pub tentative: Vec<Seg>,
    pub walls: Vec<Seg>,
    pub starts: Vec<(f64, f64)>,
    pub crashes: Vec<(f64, f64)>,
}

fn seg<S: Scalar>(a: &Point2<S>, b: &Point2<S>) -> Seg {
    (a.to_f64(), b.to_f64())
}

fn add_walls<S: Scalar>(scene: &mut Scene, walls: &[Wall<S>]) {
    scene.walls.extend(walls.iter().map(|w| seg(&w.a, &w.b)));
}

impl Scene {
    /// Final tracks `[s_i, kappa_i]` of every rider, spawned ones included.
    pub fn from_result<S: Scalar>(inst: &Instance<S>, res: &MgResult<S>) -> Self {
        let mut scene = Scene::default();
        add_walls(&mut scene, &inst.walls);
        let riders = inst.motorcycles.iter().chain(&res.spawned);
        for (m, r) in riders.zip(&res.riders) {
            scene.starts.push(m.start.to_f64());
            scene.confirmed.push(seg(&m.start, &r.kappa));
            if let Outcome::CrashedInto(_) = r.outcome {
                scene.crashes.push(r.kappa.to_f64());
            }
        }
        scene
    }

    /// Confirmed and tentative tracks of a running solver.
    pub fn from_solver<S: Scalar>(solver: &Solver<S>) -> Self {
        let mut scene = Scene::default();
        add_walls(&mut scene, solver.walls());
        for m in solver.riders() {
            let st = solver.state(m.id);
            scene.starts.push(m.start.to_f64());
            if !st.started {
                continue;
            }
            if !st.c.approx_eq(&m.start) {
                scene.confirmed.push(seg(&m.start, &st.c));
            }
            if st.alive {
                if !st.t.approx_eq(&st.c) {
                    scene.tentative.push(seg(&st.c, &st.t));
                }
            } else if let Some(r) = solver.result_of(m.id) {
                if let Outcome::CrashedInto(_) = r.outcome {
                    scene.crashes.push(r.kappa.to_f64());
                }
            }
        }
        scene
    }

    fn extent(&self) -> Option<((f64, f64), (f64, f64))> {
        let pts = self
            .confirmed
            .iter()
            .chain(&self.tentative)
            .chain(&self.walls)
            .flat_map(|(a, b)| [*a, *b])
            .chain(self.starts.iter().copied())
            .chain(self.crashes.iter().copied());
        pts.fold(None, |acc, (x, y)| match acc {
            None => Some(((x, y), (x, y))),
            Some(((x0, y0), (x1, y1))) => Some(((x0.min(x), y0.min(y)), (x1.max(x), y1.max(y)))),
        })
    }

    pub fn to_svg(&self) -> String {
        let ((x0, y0), (x1, y1)) = self.extent().unwrap_or(((0.0, 0.0), (1.0, 1.0)));
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let margin = 0.05 * span;
        let (x0, y0) = (x0 - margin, y0 - margin);
        let (w, h) = (x1 - x0 + margin, y1 - y0 + margin);
        let scale = WIDTH / w.max(h);
        let (pw, ph) = (w * scale, h * scale);
        let map = |(x, y): (f64, f64)| ((x - x0) * scale, ph - (y - y0) * scale);

        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{pw:.1}\" height=\"{ph:.1}\" viewBox=\"0 0 {pw:.1} {ph:.1}\">"
        );
        let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        let mut lines = |segs: &[Seg], class: &str, style: &str| {
            let _ = writeln!(out, "<g class=\"{class}\" {style}>");
            for &(a, b) in segs {
                let ((ax, ay), (bx, by)) = (map(a), map(b));
                let _ = writeln!(out, "<line x1=\"{ax:.2}\" y1=\"{ay:.2}\" x2=\"{bx:.2}\" y2=\"{by:.2}\"/>");
            }
            let _ = writeln!(out, "</g>");
        };
        lines(&self.walls, "walls", "stroke=\"black\" stroke-width=\"4\"");
        lines(&self.confirmed, "confirmed", "stroke=\"#1f4e9c\" stroke-width=\"1.5\"");
        lines(
            &self.tentative,
            "tentative",
            "stroke=\"#1f4e9c\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"",
        );
        let mut dots = |pts: &[(f64, f64)], class: &str, style: &str, r: f64| {
            let _ = writeln!(out, "<g class=\"{class}\" {style}>");
            for &p in pts {
                let (x, y) = map(p);
                let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r}\"/>");
            }
            let _ = writeln!(out, "</g>");
        };
        dots(&self.starts, "starts", "fill=\"#1f4e9c\"", 2.5);
        dots(&self.crashes, "crashes", "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\"", 5.0);
        out.push_str("</svg>\n");
        out
    }
}

pub fn render_result<S: Scalar>(inst: &Instance<S>, res: &MgResult<S>) -> String {
    Scene::from_result(inst, res).to_svg()
}

pub fn render_state<S: Scalar>(solver: &Solver<S>) -> String {
    Scene::from_solver(solver).to_svg()
}

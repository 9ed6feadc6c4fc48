//! A uniform grid over the supporting lines, so that the lines crossing a
//! short segment can be found without testing every rider.
//!
//! Registration and lookup use `f64` with a margin and only ever add
//! candidates; the caller decides crossings in its own arithmetic.

use crate::geom::{Motorcycle, Point2};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct LineIndex {
    /// Riders `1..=indexed` are registered; later ids are always candidates.
    indexed: usize,
    side: usize,
    x0: f64,
    y0: f64,
    cw: f64,
    ch: f64,
    margin: f64,
    cells: Vec<Vec<u32>>,
}

type P = (f64, f64);

impl LineIndex {
    /// Grid over the bounding box of the starts, `⌈√n⌉` cells a side.
    pub fn new<S: Scalar>(riders: &[Motorcycle<S>]) -> Self {
        let pts: Vec<P> = riders.iter().map(|m| m.start.to_f64()).collect();
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &pts {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        if pts.is_empty() {
            (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
        }
        let pad = 1e-3 * ((x1 - x0) + (y1 - y0)) + 1.0;
        let (x0, y0, x1, y1) = (x0 - pad, y0 - pad, x1 + pad, y1 + pad);
        let side = ((riders.len().max(1) as f64).sqrt().ceil() as usize).max(1);
        let mut idx = LineIndex {
            indexed: riders.len(),
            side,
            x0,
            y0,
            cw: (x1 - x0) / side as f64,
            ch: (y1 - y0) / side as f64,
            margin: 1e-6 * ((x1 - x0) + (y1 - y0)),
            cells: vec![Vec::new(); side * side],
        };
        for (k, m) in riders.iter().enumerate() {
            let s = pts[k];
            let (vx, vy) = m.velocity.to_f64();
            if let Some((a, b)) = idx.clip(s, (vx, vy), f64::NEG_INFINITY, f64::INFINITY) {
                for cell in idx.cells_near(a, b) {
                    idx.cells[cell].push(m.id as u32);
                }
            }
        }
        idx
    }

    fn hi(&self) -> P {
        (self.x0 + self.cw * self.side as f64, self.y0 + self.ch * self.side as f64)
    }

    /// The part of `o + t d`, `t` in `[t0, t1]`, inside the grid rectangle
    /// grown by the margin.
    fn clip(&self, o: P, d: P, t0: f64, t1: f64) -> Option<(P, P)> {
        let (hx, hy) = self.hi();
        let m = self.margin;
        let (mut lo, mut hi) = (t0, t1);
        for (oc, dc, a, b) in [(o.0, d.0, self.x0 - m, hx + m), (o.1, d.1, self.y0 - m, hy + m)] {
            if dc == 0.0 {
                if oc < a || oc > b {
                    return None;
                }
                continue;
            }
            let (ta, tb) = ((a - oc) / dc, (b - oc) / dc);
            lo = lo.max(ta.min(tb));
            hi = hi.min(ta.max(tb));
        }
        (lo <= hi && lo.is_finite() && hi.is_finite())
            .then(|| ((o.0 + lo * d.0, o.1 + lo * d.1), (o.0 + hi * d.0, o.1 + hi * d.1)))
    }

    fn col(&self, x: f64) -> usize {
        (((x - self.x0) / self.cw).floor().max(0.0) as usize).min(self.side - 1)
    }

    fn row(&self, y: f64) -> usize {
        (((y - self.y0) / self.ch).floor().max(0.0) as usize).min(self.side - 1)
    }

    /// Every cell within the margin of segment `ab`, one column (or row)
    /// strip at a time.
    fn cells_near(&self, a: P, b: P) -> Vec<usize> {
        let m = self.margin;
        let mut out = Vec::new();
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        if dx.abs() >= dy.abs() {
            let (c0, c1) = (self.col(a.0.min(b.0) - m), self.col(a.0.max(b.0) + m));
            for c in c0..=c1 {
                let xl = (self.x0 + self.cw * c as f64).max(a.0.min(b.0));
                let xr = (self.x0 + self.cw * (c + 1) as f64).min(a.0.max(b.0));
                let y_at = |x: f64| if dx == 0.0 { a.1 } else { a.1 + (x - a.0) * dy / dx };
                let (ya, yb) = (y_at(xl), y_at(xr));
                let (r0, r1) = (self.row(ya.min(yb) - m), self.row(ya.max(yb) + m));
                out.extend((r0..=r1).map(|r| r * self.side + c));
            }
        } else {
            let (r0, r1) = (self.row(a.1.min(b.1) - m), self.row(a.1.max(b.1) + m));
            for r in r0..=r1 {
                let yl = (self.y0 + self.ch * r as f64).max(a.1.min(b.1));
                let yr = (self.y0 + self.ch * (r + 1) as f64).min(a.1.max(b.1));
                let x_at = |y: f64| a.0 + (y - a.1) * dx / dy;
                let (xa, xb) = (x_at(yl), x_at(yr));
                let (c0, c1) = (self.col(xa.min(xb) - m), self.col(xa.max(xb) + m));
                out.extend((c0..=c1).map(|c| r * self.side + c));
            }
        }
        out
    }

    /// Ids of riders whose lines may cross the closed segment `pq`, sorted,
    /// or `None` when `pq` leaves the grid and every line is a candidate.
    pub fn candidates<S: Scalar>(&self, riders: &[Motorcycle<S>], p: &Point2<S>, q: &Point2<S>) -> Option<Vec<usize>> {
        let (a, b) = (p.to_f64(), q.to_f64());
        let (hx, hy) = self.hi();
        let inside = |(x, y): P| x >= self.x0 && x <= hx && y >= self.y0 && y <= hy;
        if !inside(a) || !inside(b) {
            return None;
        }
        let mut seen = vec![0u64; self.indexed / 64 + 1];
        for cell in self.cells_near(a, b) {
            for &k in &self.cells[cell] {
                seen[k as usize / 64] |= 1 << (k % 64);
            }
        }
        let mut ids = Vec::new();
        for (w, &bits) in seen.iter().enumerate() {
            let mut bits = bits;
            while bits != 0 {
                ids.push(w * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        ids.extend(self.indexed + 1..=riders.len());
        Some(ids)
    }
}

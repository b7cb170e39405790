//! Scripted vertex pulls on an open polyline.
//!
//! A pull moves one vertex inside a box that meets the curve only in that
//! vertex's two incident edges. The cone map of the box then carries the
//! polyline onto another polyline exactly: the edges leave the box at
//! fixed boundary points, which become new vertices.

use crate::error::{Error, Result};
use crate::geometry::{distance, Aabb, Point3};
use crate::maps::ConeMap;

#[derive(Clone, Debug)]
pub(crate) struct Planner {
    curve: Vec<Point3>,
    bounds: Aabb,
    obstacles: Vec<Aabb>,
    history: Vec<Vec<Point3>>,
    pulls: Vec<ConeMap>,
}

/// Parameter interval of `a + t (b − a)` inside the open box, if any.
fn clip_open(a: Point3, b: Point3, bx: &Aabb, tol: f64) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    for i in 0..3 {
        let (lo, hi) = (bx.min[i] + tol, bx.max[i] - tol);
        let d = b[i] - a[i];
        if d == 0.0 {
            if a[i] <= lo || a[i] >= hi {
                return None;
            }
            continue;
        }
        let (mut s0, mut s1) = ((lo - a[i]) / d, (hi - a[i]) / d);
        if s0 > s1 {
            std::mem::swap(&mut s0, &mut s1);
        }
        t0 = t0.max(s0);
        t1 = t1.min(s1);
    }
    (t0 < t1).then_some((t0, t1))
}

/// Where the ray from interior point `from` towards `to` leaves the box,
/// or `to` itself if it is reached first.
fn exit_point(from: Point3, to: Point3, bx: &Aabb) -> Point3 {
    let mut t = 1.0_f64;
    for i in 0..3 {
        let d = to[i] - from[i];
        if d > 0.0 {
            t = t.min((bx.max[i] - from[i]) / d);
        } else if d < 0.0 {
            t = t.min((bx.min[i] - from[i]) / d);
        }
    }
    if t >= 1.0 {
        return to;
    }
    let mut p = from.lerp(to, t);
    // snap the coordinate that hit the face so the point is exactly fixed
    for i in 0..3 {
        let d = to[i] - from[i];
        if d > 0.0 && ((bx.max[i] - from[i]) / d) == t {
            p = with_coord(p, i, bx.max[i]);
        } else if d < 0.0 && ((bx.min[i] - from[i]) / d) == t {
            p = with_coord(p, i, bx.min[i]);
        }
    }
    p
}

fn with_coord(p: Point3, i: usize, v: f64) -> Point3 {
    let mut a = p.to_array();
    a[i] = v;
    Point3::from_array(a)
}

impl Planner {
    /// `bounds` must contain every pull region in its interior; no region
    /// may meet an obstacle.
    pub fn new(curve: Vec<Point3>, bounds: Aabb, obstacles: Vec<Aabb>) -> Self {
        Planner { curve, bounds, obstacles, history: Vec::new(), pulls: Vec::new() }
    }

    pub fn curve(&self) -> &[Point3] {
        &self.curve
    }

    pub fn pulls(&self) -> &[ConeMap] {
        &self.pulls
    }

    /// Length scale for tolerances: the shortest side of the bounds, so a
    /// very tall box does not blur detail across.
    fn scale(&self) -> f64 {
        let e = self.bounds.max - self.bounds.min;
        e.x.min(e.y).min(e.z)
    }

    fn tol(&self) -> f64 {
        1e-12 * self.scale()
    }

    /// Index of the vertex nearest to `p`; it must be within 1e-9 relative.
    pub fn vertex_at(&self, p: Point3) -> Result<usize> {
        let (i, d) = self
            .curve
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, distance(v, p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty curve");
        if d > 1e-9 * self.scale() {
            return Err(Error::InvalidGeometry(format!("no curve vertex at {p} (nearest is {d:.3e} away)")));
        }
        Ok(i)
    }

    /// Insert a vertex at `at`, which must lie on an edge. The map is the
    /// identity, so nothing else changes.
    pub fn split(&mut self, at: Point3) -> Result<()> {
        let tol = self.tol();
        for j in 0..self.curve.len() - 1 {
            let (a, b) = (self.curve[j], self.curve[j + 1]);
            let d = b - a;
            let t = (at - a).dot(d) / d.dot(d);
            if t > 0.0 && t < 1.0 && distance(a.lerp(b, t), at) <= tol {
                self.curve.insert(j + 1, at);
                return Ok(());
            }
        }
        Err(Error::InvalidGeometry(format!("{at} is not inside any edge")))
    }

    /// Pull the vertex at `from` to `to` in the box spanned by both points
    /// and grown by `margin`.
    #[cfg(test)]
    pub fn pull(&mut self, from: Point3, to: Point3, margin: f64) -> Result<()> {
        let region = Aabb::bounding([from, to]).inflate(margin);
        self.pull_in(from, to, region)
    }

    /// Pull in the box spanned by the vertex, its target and both
    /// neighbours, padded by `pad` on the sides where the vertex or the
    /// target would otherwise sit on the boundary. The neighbours stay on
    /// the boundary, so no new vertices appear.
    pub fn pull_hull(&mut self, from: Point3, to: Point3, pad: f64) -> Result<()> {
        let i = self.vertex_at(from)?;
        if i == 0 || i + 1 == self.curve.len() {
            return Err(Error::InvalidGeometry(format!("vertex {i} at {from} is an endpoint")));
        }
        let (v, a, b) = (self.curve[i], self.curve[i - 1], self.curve[i + 1]);
        let hull = Aabb::bounding([a, b, v, to]);
        let (mut lo, mut hi) = (hull.min.to_array(), hull.max.to_array());
        for k in 0..3 {
            if v[k].min(to[k]) <= lo[k] {
                lo[k] -= pad;
            }
            if v[k].max(to[k]) >= hi[k] {
                hi[k] += pad;
            }
        }
        let region = Aabb::new(Point3::from_array(lo), Point3::from_array(hi))?;
        self.pull_in(from, to, region)
    }

    pub fn pull_in(&mut self, from: Point3, to: Point3, region: Aabb) -> Result<()> {
        let i = self.vertex_at(from)?;
        let n = self.curve.len();
        let bad = |msg: String| Err(Error::InvalidGeometry(format!("pull of vertex {i} at {from}: {msg}")));
        if i == 0 || i + 1 == n {
            return bad("endpoints are fixed".into());
        }
        if !self.bounds.contains_box_interior(&region) {
            return bad(format!("region {region} leaves {}", self.bounds));
        }
        if let Some(o) = self.obstacles.iter().find(|o| o.intersects(&region)) {
            return bad(format!("region {region} meets obstacle {o}"));
        }
        let v = self.curve[i];
        if !region.contains_interior(v) || !region.contains_interior(to) {
            return bad(format!("vertex and target must be interior to {region}"));
        }
        let tol = self.tol();
        for &nb in [self.curve[i - 1], self.curve[i + 1]].iter() {
            if region.inflate(-tol).contains_interior(nb) {
                return bad(format!("neighbour {nb} lies inside {region}"));
            }
        }
        for j in 0..n - 1 {
            if j + 1 == i || j == i {
                continue;
            }
            if clip_open(self.curve[j], self.curve[j + 1], &region, tol).is_some() {
                return bad(format!("edge {j} enters {region}"));
            }
        }
        let cone = ConeMap::new(region, v, to)?;
        let e1 = exit_point(v, self.curve[i - 1], &region);
        let e2 = exit_point(v, self.curve[i + 1], &region);
        let mut next = self.curve[..i].to_vec();
        if e1 != self.curve[i - 1] {
            next.push(e1);
        }
        next.push(to);
        if e2 != self.curve[i + 1] {
            next.push(e2);
        }
        next.extend_from_slice(&self.curve[i + 1..]);
        self.history.push(std::mem::replace(&mut self.curve, next));
        self.pulls.push(cone);
        Ok(())
    }

    /// Replay the pulls in reverse: each one undone by the cone map with
    /// apex running back.
    pub fn reversed_pulls(&self) -> Vec<ConeMap> {
        self.pulls.iter().rev().map(|c| ConeMap { region: c.region, source: c.target, target: c.source }).collect()
    }

    /// Vertices for the starting polyline such that every intermediate
    /// curve is the exact vertexwise image: all vertices ever created,
    /// pulled back to the start and ordered along it.
    pub fn initial_vertices(&self) -> Vec<Point3> {
        let start = self.history.first().unwrap_or(&self.curve).clone();
        let mut all: Vec<Vec<Point3>> = self.history.clone();
        all.push(self.curve.clone());
        let mut keyed: Vec<(usize, f64, Point3)> = Vec::new();
        for (stage, poly) in all.iter().enumerate() {
            for &p in poly {
                let q = self.pulls[..stage].iter().rev().fold(p, |q, c| c.eval_inverse(q));
                let (seg, t) = locate_on(&start, q);
                keyed.push((seg, t, q));
            }
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let tol = 1e-12 * self.bounds.diameter();
        let mut out: Vec<Point3> = Vec::new();
        for (_, _, q) in keyed {
            if out.last().is_none_or(|&l| distance(l, q) > tol) {
                out.push(q);
            }
        }
        out
    }
}

/// Segment index and parameter of the point of `poly` nearest to `q`.
fn locate_on(poly: &[Point3], q: Point3) -> (usize, f64) {
    let mut best = (0, 0.0, f64::INFINITY);
    for s in 0..poly.len() - 1 {
        let (a, b) = (poly[s], poly[s + 1]);
        let d = b - a;
        let t = ((q - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
        let dist = distance(a.lerp(b, t), q);
        if dist < best.2 {
            best = (s, t, dist);
        }
    }
    // a vertex is the end of one segment and the start of the next
    if best.1 == 1.0 && best.0 + 2 < poly.len() {
        return (best.0 + 1, 0.0);
    }
    (best.0, best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::LocalMap;

    fn strand() -> Planner {
        let pts = vec![Point3::new(-4.0, 0.0, 0.0), Point3::new(0.0, 0.0, 0.0), Point3::new(4.0, 0.0, 0.0)];
        Planner::new(pts, Aabb::from_center(Point3::ORIGIN, Point3::splat(5.0)), vec![])
    }

    #[test]
    fn pull_creates_exit_vertices_and_is_exact() {
        let mut p = strand();
        let region = Aabb::new(Point3::new(-2.0, -1.0, -1.0), Point3::new(2.0, 2.0, 1.0)).unwrap();
        p.pull_in(Point3::ORIGIN, Point3::new(0.5, 1.0, 0.0), region).unwrap();
        assert_eq!(p.curve().len(), 5);
        assert_eq!(p.curve()[1], Point3::new(-2.0, 0.0, 0.0));
        let init = p.initial_vertices();
        let m = LocalMap::Cone(p.pulls()[0]);
        let img: Vec<Point3> = init.iter().map(|&q| m.eval(q)).collect();
        for (a, b) in img.iter().zip(p.curve()) {
            assert!(distance(*a, *b) < 1e-14);
        }
    }

    #[test]
    fn rejects_foreign_edges_and_obstacles() {
        let mut p = strand();
        let big = Aabb::new(Point3::new(-4.5, -1.0, -1.0), Point3::new(2.0, 2.0, 1.0)).unwrap();
        assert!(p.pull_in(Point3::ORIGIN, Point3::new(0.0, 1.0, 0.0), big).is_err());
        let mut q = Planner::new(
            p.curve().to_vec(),
            p.bounds,
            vec![Aabb::from_center(Point3::new(0.0, 1.5, 0.0), Point3::splat(0.1))],
        );
        assert!(q.pull(Point3::ORIGIN, Point3::new(0.0, 1.8, 0.0), 0.3).is_err());
        assert!(q.pull(Point3::new(-4.0, 0.0, 0.0), Point3::new(-4.0, 1.0, 0.0), 0.3).is_err());
    }

    #[test]
    fn reversed_pulls_restore_the_strand() {
        let mut p = strand();
        p.pull(Point3::ORIGIN, Point3::new(0.0, 1.0, 0.0), 0.5).unwrap();
        let back: Vec<LocalMap> = p.reversed_pulls().into_iter().map(LocalMap::Cone).collect();
        let m = LocalMap::Composite(back);
        for &v in p.curve() {
            let w = m.eval(v);
            assert!(w.y.abs() < 1e-15 && w.z.abs() < 1e-15);
        }
    }
}

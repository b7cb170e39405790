//! Orthographic knot diagrams: project along +z, find crossings with
//! over/under information, and draw them as SVG.

use std::fmt::Write as _;

use crate::geometry::{PLCurve, Point3};

/// Crossings closer than this (relative) to a segment end, or between
/// nearly parallel segments, count as non-generic.
const TANGENCY_TOL: f64 = 1e-9;
/// View perturbation used to break non-generic projections.
const VIEW_TILT: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    /// Segment passing over.
    pub over: usize,
    pub under: usize,
    /// Parameter along each segment.
    pub over_param: f64,
    pub under_param: f64,
    /// Projected location.
    pub at: (f64, f64),
}

fn rotate(p: Point3, about_x: f64, about_y: f64) -> Point3 {
    let (s, c) = about_x.sin_cos();
    let p = Point3::new(p.x, c * p.y - s * p.z, s * p.y + c * p.z);
    let (s, c) = about_y.sin_cos();
    Point3::new(c * p.x + s * p.z, p.y, -s * p.x + c * p.z)
}

struct Raw {
    crossings: Vec<Crossing>,
    degenerate: bool,
}

fn find_crossings(curve: &PLCurve, about_x: f64, about_y: f64) -> Raw {
    let pts: Vec<Point3> = curve.vertices().iter().map(|&p| rotate(p, about_x, about_y)).collect();
    let n = pts.len();
    let m = curve.segment_count();
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);

    // sweep over x-intervals
    let mut order: Vec<(f64, f64, usize)> = (0..m)
        .map(|i| {
            let (a, b) = seg(i);
            (a.x.min(b.x), a.x.max(b.x), i)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));

    let mut crossings = Vec::new();
    let mut degenerate = false;
    let mut active: Vec<(f64, f64, usize)> = Vec::new();
    for &(lo, hi, i) in &order {
        active.retain(|&(_, h, _)| h >= lo);
        for &(_, _, j) in &active {
            if curve.adjacent(i, j) {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            let r = (b.x - a.x, b.y - a.y);
            let s = (d.x - c.x, d.y - c.y);
            let denom = r.0 * s.1 - r.1 * s.0;
            let scale = (r.0.hypot(r.1)) * (s.0.hypot(s.1));
            let qp = (c.x - a.x, c.y - a.y);
            if denom.abs() <= TANGENCY_TOL * scale {
                // parallel in projection: collinear overlap is non-generic
                let cross = qp.0 * r.1 - qp.1 * r.0;
                if cross.abs() <= TANGENCY_TOL * scale.sqrt().max(1e-300) {
                    let len2 = r.0 * r.0 + r.1 * r.1;
                    let t0 = (qp.0 * r.0 + qp.1 * r.1) / len2;
                    let t1 = ((d.x - a.x) * r.0 + (d.y - a.y) * r.1) / len2;
                    if t0.max(t1) >= 0.0 && t0.min(t1) <= 1.0 {
                        degenerate = true;
                    }
                }
                continue;
            }
            let t = (qp.0 * s.1 - qp.1 * s.0) / denom;
            let u = (qp.0 * r.1 - qp.1 * r.0) / denom;
            if !(-TANGENCY_TOL..=1.0 + TANGENCY_TOL).contains(&t) || !(-TANGENCY_TOL..=1.0 + TANGENCY_TOL).contains(&u)
            {
                continue;
            }
            if t.min(1.0 - t) <= TANGENCY_TOL || u.min(1.0 - u) <= TANGENCY_TOL {
                degenerate = true;
                continue;
            }
            let zi = a.z + t * (b.z - a.z);
            let zj = c.z + u * (d.z - c.z);
            let at = (a.x + t * r.0, a.y + t * r.1);
            let (oi, oj) = (i.min(j), i.max(j));
            let (ti, tj) = if oi == i { (t, u) } else { (u, t) };
            let (zo, zu) = if oi == i { (zi, zj) } else { (zj, zi) };
            let c = if zo >= zu {
                Crossing { over: oi, under: oj, over_param: ti, under_param: tj, at }
            } else {
                Crossing { over: oj, under: oi, over_param: tj, under_param: ti, at }
            };
            crossings.push(c);
        }
        active.push((lo, hi, i));
    }
    crossings.sort_by_key(|a| (a.over.min(a.under), a.over.max(a.under)));
    Raw { crossings, degenerate }
}

/// Crossings of the projection onto the xy-plane. If the straight-down
/// view is non-generic the view is tilted by 1e-7 rad about x, then also
/// about y.
pub fn crossings(curve: &PLCurve) -> Vec<Crossing> {
    let views = [(0.0, 0.0), (VIEW_TILT, 0.0), (VIEW_TILT, VIEW_TILT)];
    let mut last = None;
    for (ax, ay) in views {
        let raw = find_crossings(curve, ax, ay);
        if !raw.degenerate {
            return raw.crossings;
        }
        last = Some(raw.crossings);
    }
    last.unwrap_or_default()
}

pub fn crossing_count(curve: &PLCurve) -> usize {
    crossings(curve).len()
}

/// SVG drawing of the projection. Coordinates are normalised so the curve
/// fits a unit square; under-strands are broken with gaps of radius
/// `gap` in those normalised units.
pub fn to_svg(curve: &PLCurve, gap: f64) -> String {
    let bb = curve.bounding_box();
    let span = (bb.max.x - bb.min.x).max(bb.max.y - bb.min.y).max(1e-300);
    let norm = |p: Point3| ((p.x - bb.min.x) / span, 1.0 - (p.y - bb.min.y) / span);
    let cs = crossings(curve);

    let mut cuts: Vec<Vec<f64>> = vec![Vec::new(); curve.segment_count()];
    for c in &cs {
        cuts[c.under].push(c.under_param);
    }

    let size = 1000.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-0.05 -0.05 1.1 1.1" width="{size}" height="{size}">"#
    );
    let _ = writeln!(out, r#"<g fill="none" stroke="black" stroke-width="0.002" stroke-linecap="round">"#);
    for (i, (a, b)) in curve.segments().enumerate() {
        let (pa, pb) = (norm(a), norm(b));
        let len = (pb.0 - pa.0).hypot(pb.1 - pa.1);
        let mut pieces: Vec<(f64, f64)> = vec![(0.0, 1.0)];
        if len > 0.0 {
            let mut ts = cuts[i].clone();
            ts.sort_by(f64::total_cmp);
            let half = gap / len;
            pieces.clear();
            let mut start = 0.0;
            for t in ts {
                if t - half > start {
                    pieces.push((start, t - half));
                }
                start = start.max(t + half);
            }
            if start < 1.0 {
                pieces.push((start, 1.0));
            }
        }
        for (s, e) in pieces {
            let p = (pa.0 + s * (pb.0 - pa.0), pa.1 + s * (pb.1 - pa.1));
            let q = (pa.0 + e * (pb.0 - pa.0), pa.1 + e * (pb.1 - pa.1));
            let _ = writeln!(out, r#"<line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}"/>"#, p.0, p.1, q.0, q.1);
        }
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kink() -> PLCurve {
        PLCurve::open(vec![
            Point3::new(-3.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(-1.0, 1.0, 0.5),
            Point3::new(3.0, 0.0, 0.5),
        ])
        .unwrap()
    }

    #[test]
    fn single_crossing_with_over_under() {
        let cs = crossings(&kink());
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].over, 2);
        assert_eq!(cs[0].under, 0);
    }

    #[test]
    fn planar_square_has_none() {
        let sq = PLCurve::closed(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(crossing_count(&sq), 0);
    }

    #[test]
    fn vertex_on_strand_is_resolved_by_tilt() {
        // vertex (0, 0, 1) projects exactly onto the x-axis strand
        let c = PLCurve::open(vec![
            Point3::new(-2.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
            Point3::new(2.0, 1.0, 1.0),
            Point3::new(0.0, 0.0, 1.0),
            Point3::new(-1.0, -1.0, 1.0),
        ])
        .unwrap();
        let n = crossing_count(&c);
        assert!(n <= 1);
    }

    #[test]
    fn svg_has_gap() {
        let svg = to_svg(&kink(), 0.005);
        assert!(svg.starts_with("<svg"));
        // three segments, the under one split in two
        assert_eq!(svg.matches("<line").count(), 4);
    }
}

//! Points, axis-aligned boxes and polylines in 3-space.
//!
//! Everything here is a plain value type. Boxes are closed; "interior"
//! always means the open box.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    #[inline]
    pub fn splat(v: f64) -> Self {
        Point3::new(v, v, v)
    }

    #[inline]
    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        // hypot-style scaling is not needed at model scale
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn lerp(self, o: Point3, t: f64) -> Point3 {
        self + (o - self) * t
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn map(self, f: impl Fn(f64) -> f64) -> Point3 {
        Point3::new(f(self.x), f(self.y), f(self.z))
    }

    #[inline]
    pub fn zip(self, o: Point3, f: impl Fn(f64, f64) -> f64) -> Point3 {
        Point3::new(f(self.x, o.x), f(self.y, o.y), f(self.z, o.z))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Index<usize> for Point3 {
    type Output = f64;

    fn index(&self, axis: usize) -> &f64 {
        match axis {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("axis {axis} out of range"),
        }
    }
}

impl Add for Point3 {
    type Output = Point3;
    #[inline]
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    #[inline]
    fn add_assign(&mut self, o: Point3) {
        *self = *self + o;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    #[inline]
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    #[inline]
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Euclidean distance.
#[inline]
pub fn distance(a: Point3, b: Point3) -> f64 {
    (a - b).norm()
}

/// Closed axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn new(min: Point3, max: Point3) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidGeometry("non-finite box corner".into()));
        }
        if min.x > max.x || min.y > max.y || min.z > max.z {
            return Err(Error::InvalidGeometry(format!("box min {min} exceeds max {max}")));
        }
        Ok(Aabb { min, max })
    }

    /// Box from center and half extents. Panics on negative extents; use
    /// [`Aabb::new`] for untrusted input.
    pub fn from_center(center: Point3, half: Point3) -> Self {
        assert!(half.x >= 0.0 && half.y >= 0.0 && half.z >= 0.0, "negative half extent");
        Aabb { min: center - half, max: center + half }
    }

    pub fn unit() -> Self {
        Aabb { min: Point3::ORIGIN, max: Point3::splat(1.0) }
    }

    /// Smallest box containing all points. Panics on an empty iterator.
    pub fn bounding(points: impl IntoIterator<Item = Point3>) -> Self {
        let mut it = points.into_iter();
        let first = it.next().expect("bounding box of no points");
        it.fold(Aabb { min: first, max: first }, |b, p| Aabb {
            min: b.min.zip(p, f64::min),
            max: b.max.zip(p, f64::max),
        })
    }

    pub fn center(&self) -> Point3 {
        (self.min + self.max) * 0.5
    }

    pub fn half_extents(&self) -> Point3 {
        (self.max - self.min) * 0.5
    }

    pub fn diameter(&self) -> f64 {
        distance(self.min, self.max)
    }

    pub fn contains(&self, p: Point3) -> bool {
        (0..3).all(|i| self.min[i] <= p[i] && p[i] <= self.max[i])
    }

    pub fn contains_interior(&self, p: Point3) -> bool {
        (0..3).all(|i| self.min[i] < p[i] && p[i] < self.max[i])
    }

    /// `other` ⊆ self.
    pub fn contains_box(&self, other: &Aabb) -> bool {
        self.contains(other.min) && self.contains(other.max)
    }

    /// `other` ⊆ interior(self).
    pub fn contains_box_interior(&self, other: &Aabb) -> bool {
        self.contains_interior(other.min) && self.contains_interior(other.max)
    }

    /// Closed boxes meet (touching counts).
    pub fn intersects(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= other.max[i] && other.min[i] <= self.max[i])
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb { min: self.min.zip(other.min, f64::min), max: self.max.zip(other.max, f64::max) }
    }

    pub fn translate(&self, t: Point3) -> Aabb {
        Aabb { min: self.min + t, max: self.max + t }
    }

    /// Image under p ↦ origin + s·p.
    pub fn similarity(&self, scale: f64, origin: Point3) -> Aabb {
        assert!(scale > 0.0);
        Aabb { min: origin + self.min * scale, max: origin + self.max * scale }
    }

    /// Grow (or shrink, for negative `margin`) every face by `margin`.
    pub fn inflate(&self, margin: f64) -> Aabb {
        Aabb { min: self.min - Point3::splat(margin), max: self.max + Point3::splat(margin) }
    }

    /// Distance from an interior point to the nearest face.
    pub fn wall_distance(&self, p: Point3) -> f64 {
        (0..3).map(|i| (p[i] - self.min[i]).min(self.max[i] - p[i])).fold(f64::INFINITY, f64::min)
    }

    pub fn corners(&self) -> [Point3; 8] {
        let (a, b) = (self.min, self.max);
        [
            Point3::new(a.x, a.y, a.z),
            Point3::new(b.x, a.y, a.z),
            Point3::new(a.x, b.y, a.z),
            Point3::new(b.x, b.y, a.z),
            Point3::new(a.x, a.y, b.z),
            Point3::new(b.x, a.y, b.z),
            Point3::new(a.x, b.y, b.z),
            Point3::new(b.x, b.y, b.z),
        ]
    }

    /// Largest distance between a point of `self` and a point of `other`.
    /// Attained at a corner pair; per axis it is the wider of the two
    /// opposite-corner spans.
    pub fn max_distance(&self, other: &Aabb) -> f64 {
        let span = |i: usize| (self.max[i] - other.min[i]).abs().max((other.max[i] - self.min[i]).abs());
        (span(0).powi(2) + span(1).powi(2) + span(2).powi(2)).sqrt()
    }
}

impl fmt::Display for Aabb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} .. {}]", self.min, self.max)
    }
}

/// Diameter of a union of boxes: the largest corner-pair distance over all
/// (ordered) pairs of boxes, the pair (b, b) included.
pub fn union_diameter(boxes: &[Aabb]) -> Result<f64> {
    if boxes.is_empty() {
        return Err(Error::EmptyBoxList);
    }
    let mut best = 0.0_f64;
    for (i, a) in boxes.iter().enumerate() {
        for b in &boxes[i..] {
            best = best.max(a.max_distance(b));
        }
    }
    Ok(best)
}

/// Result of a segment-segment proximity query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentContact {
    pub hit: bool,
    pub distance: f64,
    /// Midpoint of the closest-point pair.
    pub witness: Point3,
    /// Parameters of the closest points along each segment.
    pub s: f64,
    pub t: f64,
}

/// Closest points of segments `p1p2` and `q1q2`; `hit` iff their distance
/// is below `tol`.
pub fn segments_intersect(p1: Point3, p2: Point3, q1: Point3, q2: Point3, tol: f64) -> SegmentContact {
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let r = p1 - q1;
    let a = d1.dot(d1);
    let e = d2.dot(d2);
    let f = d2.dot(r);
    let clamp = |v: f64| v.clamp(0.0, 1.0);

    let (s, t) = if a <= f64::EPSILON && e <= f64::EPSILON {
        (0.0, 0.0)
    } else if a <= f64::EPSILON {
        (0.0, clamp(f / e))
    } else {
        let c = d1.dot(r);
        if e <= f64::EPSILON {
            (clamp(-c / a), 0.0)
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s = if denom > 1e-15 * a * e { clamp((b * f - c * e) / denom) } else { 0.0 };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = clamp(-c / a);
            } else if t > 1.0 {
                t = 1.0;
                s = clamp((b - c) / a);
            }
            (s, t)
        }
    };
    let cp = p1 + d1 * s;
    let cq = q1 + d2 * t;
    let dist = distance(cp, cq);
    SegmentContact { hit: dist < tol, distance: dist, witness: cp.lerp(cq, 0.5), s, t }
}

/// Polygonal arc or loop.
#[derive(Clone, Debug, PartialEq)]
pub struct PLCurve {
    vertices: Vec<Point3>,
    closed: bool,
}

impl PLCurve {
    pub fn new(vertices: Vec<Point3>, closed: bool) -> Result<Self> {
        let min = if closed { 3 } else { 2 };
        if vertices.len() < min {
            return Err(Error::InvalidGeometry(format!(
                "{} curve needs at least {min} vertices, got {}",
                if closed { "closed" } else { "open" },
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidGeometry(format!("non-finite vertex {p}")));
        }
        let n = vertices.len();
        let pairs = if closed { n } else { n - 1 };
        for i in 0..pairs {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::InvalidGeometry(format!("repeated consecutive vertex at index {i}")));
            }
        }
        Ok(PLCurve { vertices, closed })
    }

    pub fn open(vertices: Vec<Point3>) -> Result<Self> {
        Self::new(vertices, false)
    }

    pub fn closed(vertices: Vec<Point3>) -> Result<Self> {
        Self::new(vertices, true)
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    pub fn segment(&self, i: usize) -> (Point3, Point3) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point3, Point3)> + '_ {
        (0..self.segment_count()).map(move |i| self.segment(i))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| distance(a, b)).sum()
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::bounding(self.vertices.iter().copied())
    }

    /// Segments `i` and `j` share a vertex.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i.min(j), i.max(j));
        j == i + 1 || (self.closed && i == 0 && j == self.segment_count() - 1)
    }

    /// Image of the curve under a point map. Consecutive images that
    /// coincide are merged.
    pub fn map_vertices(&self, f: impl Fn(Point3) -> Point3) -> Result<PLCurve> {
        let mut out: Vec<Point3> = Vec::with_capacity(self.vertices.len());
        for p in self.vertices.iter().map(|&p| f(p)) {
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
        if self.closed && out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        PLCurve::new(out, self.closed)
    }

    /// Split every segment into pieces no longer than `max_len`, and into at
    /// least `min_pieces` pieces.
    pub fn densify(&self, max_len: f64, min_pieces: usize) -> PLCurve {
        assert!(max_len > 0.0);
        let mut out = Vec::new();
        for (a, b) in self.segments() {
            let pieces = ((distance(a, b) / max_len).ceil() as usize).max(min_pieces).max(1);
            for k in 0..pieces {
                out.push(a.lerp(b, k as f64 / pieces as f64));
            }
        }
        if !self.closed {
            out.push(*self.vertices.last().unwrap());
        }
        PLCurve { vertices: out, closed: self.closed }
    }

    /// Every non-adjacent segment pair closer than `tol`, as `(i, j)` with
    /// `i < j`.
    pub fn near_pairs(&self, tol: f64) -> Vec<(usize, usize)> {
        let m = self.segment_count();
        let boxes: Vec<Aabb> = self.segments().map(|(a, b)| Aabb::bounding([a, b]).inflate(tol)).collect();
        let mut hits: Vec<(usize, usize)> = exec::flat_map_indices(m, |i| {
            let (p1, p2) = self.segment(i);
            ((i + 1)..m)
                .filter(|&j| !self.adjacent(i, j) && boxes[i].intersects(&boxes[j]))
                .filter(|&j| {
                    let (q1, q2) = self.segment(j);
                    segments_intersect(p1, p2, q1, q2, tol).hit
                })
                .map(|j| (i, j))
                .collect()
        });
        hits.sort_unstable();
        hits
    }
}

/// No two non-adjacent segments come within `tol` of each other.
pub fn curve_is_simple(c: &PLCurve, tol: f64) -> bool {
    c.near_pairs(tol).is_empty()
}

//! Evaluable, invertible self-maps of 3-space.
//!
//! Every non-affine map here is the identity outside a box. Composition
//! applies its parts left to right, so `Composite([h1, h2, h3])` is
//! `h3 ∘ h2 ∘ h1`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::{distance, Aabb, Point3};

/// Where a map can differ from the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    Empty,
    Bounded(Aabb),
    Everywhere,
}

impl Support {
    pub fn union(self, other: Support) -> Support {
        match (self, other) {
            (Support::Empty, s) | (s, Support::Empty) => s,
            (Support::Everywhere, _) | (_, Support::Everywhere) => Support::Everywhere,
            (Support::Bounded(a), Support::Bounded(b)) => Support::Bounded(a.union(&b)),
        }
    }

    pub fn as_box(self) -> Option<Aabb> {
        match self {
            Support::Bounded(b) => Some(b),
            _ => None,
        }
    }

    pub fn contains(self, p: Point3) -> bool {
        match self {
            Support::Empty => false,
            Support::Bounded(b) => b.contains(p),
            Support::Everywhere => true,
        }
    }
}

/// p ↦ M·p + t on all of space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub matrix: [[f64; 3]; 3],
    pub translation: Point3,
    inverse: [[f64; 3]; 3],
}

fn mat_vec(m: &[[f64; 3]; 3], p: Point3) -> Point3 {
    Point3::new(
        m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
        m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
        m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z,
    )
}

pub(crate) fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl AffineMap {
    pub const MIN_ABS_DET: f64 = 1e-12;

    pub fn new(matrix: [[f64; 3]; 3], translation: Point3) -> Result<Self> {
        let det = det3(&matrix);
        if !(det.abs() > Self::MIN_ABS_DET) {
            return Err(Error::InvalidMap(format!("singular affine matrix (det = {det:e})")));
        }
        let m = &matrix;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        // adjugate / det
        let inverse = [
            [cof(1, 2, 1, 2) / det, -cof(0, 2, 1, 2) / det, cof(0, 1, 1, 2) / det],
            [-cof(1, 2, 0, 2) / det, cof(0, 2, 0, 2) / det, -cof(0, 1, 0, 2) / det],
            [cof(1, 2, 0, 1) / det, -cof(0, 2, 0, 1) / det, cof(0, 1, 0, 1) / det],
        ];
        Ok(AffineMap { matrix, translation, inverse })
    }

    pub fn translation(t: Point3) -> Self {
        Self::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], t).expect("identity matrix")
    }

    /// Uniform scaling by `s` about `center`.
    pub fn scaling(s: f64, center: Point3) -> Result<Self> {
        Self::new([[s, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s]], center - center * s)
    }

    pub fn eval(&self, p: Point3) -> Point3 {
        mat_vec(&self.matrix, p) + self.translation
    }

    pub fn eval_inverse(&self, p: Point3) -> Point3 {
        mat_vec(&self.inverse, p - self.translation)
    }
}

/// Piecewise-affine "vertex pull" on a box: the apex `source` goes to
/// `target`, every ray from `source` to the boundary goes to the ray from
/// `target` to the same boundary point, and the closed complement of the
/// open box is fixed.
///
/// On each face pyramid the map is affine, so it is affine on each of the
/// 12 tetrahedra spanned by the apex and the boundary triangles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeMap {
    pub region: Aabb,
    pub source: Point3,
    pub target: Point3,
}

/// Box gauge of `p` seen from the interior point `apex`: the factor by which
/// the ray apex→p must be scaled to reach the boundary is `1 / gauge`.
fn box_gauge(region: &Aabb, apex: Point3, p: Point3) -> f64 {
    let mut g = 0.0_f64;
    for i in 0..3 {
        let d = p[i] - apex[i];
        let r = if d > 0.0 {
            d / (region.max[i] - apex[i])
        } else if d < 0.0 {
            -d / (apex[i] - region.min[i])
        } else {
            0.0
        };
        g = g.max(r);
    }
    g
}

impl ConeMap {
    pub fn new(region: Aabb, source: Point3, target: Point3) -> Result<Self> {
        for (name, p) in [("source", source), ("target", target)] {
            if !region.contains_interior(p) {
                return Err(Error::InvalidMap(format!("cone apex {name} {p} not interior to {region}")));
            }
        }
        Ok(ConeMap { region, source, target })
    }

    pub fn eval(&self, p: Point3) -> Point3 {
        Self::apply(&self.region, self.source, self.target, p)
    }

    pub fn eval_inverse(&self, p: Point3) -> Point3 {
        Self::apply(&self.region, self.target, self.source, p)
    }

    fn apply(region: &Aabb, from: Point3, to: Point3, p: Point3) -> Point3 {
        if from == to || !region.contains_interior(p) {
            return p;
        }
        let lambda = box_gauge(region, from, p);
        if lambda >= 1.0 {
            return p;
        }
        p + (to - from) * (1.0 - lambda)
    }

    /// Partial pull with the apex moved a fraction `tau` of the way.
    pub fn partial(&self, tau: f64) -> ConeMap {
        ConeMap { target: self.source.lerp(self.target, tau), ..*self }
    }
}

/// Parameters of the unsquish isotopy: points of `inner` are pushed along
/// rays from `tip` (and the shell `outer ∖ inner` along the matching
/// scale lines) so that the ones close to `tip` end up `1/c` times as far
/// away, and the rest end up in the shell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnsquishParams {
    pub outer: Aabb,
    pub inner: Aabb,
    pub tip: Point3,
    pub c: f64,
}

impl UnsquishParams {
    pub fn new(outer: Aabb, inner: Aabb, tip: Point3, c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidMap(format!("unsquish factor c = {c} outside (0, 1)")));
        }
        if !outer.contains_box_interior(&inner) {
            return Err(Error::InvalidMap(format!("inner {inner} not strictly inside outer {outer}")));
        }
        let scale = outer.diameter();
        if distance(outer.center(), inner.center()) > 1e-12 * scale {
            return Err(Error::InvalidMap("inner and outer boxes must share a center".into()));
        }
        let h = inner.half_extents();
        if h.x <= 0.0 || h.y <= 0.0 || h.z <= 0.0 {
            return Err(Error::InvalidMap("degenerate inner box".into()));
        }
        if !inner.contains_interior(tip) {
            return Err(Error::InvalidMap(format!("tip {tip} not interior to inner box")));
        }
        Ok(UnsquishParams { outer, inner, tip, c })
    }

    /// Breakpoint of the glued parameter at time 0.
    pub fn s_c0(&self) -> f64 {
        self.c / 2.0
    }

    /// Breakpoint of the glued parameter at time 1.
    pub fn s_c1(&self) -> f64 {
        0.5
    }

    pub fn s_c(&self, t: f64) -> f64 {
        t * self.s_c1() + (1.0 - t) * self.s_c0()
    }

    /// Time-`t` reparameterisation of the glued parameter.
    pub fn s_prime(&self, t: f64, s: f64) -> f64 {
        let (s0, sc) = (self.s_c0(), self.s_c(t));
        if s <= s0 {
            s / s0 * sc
        } else {
            let u = (s - s0) / (1.0 - s0);
            u + (1.0 - u) * sc
        }
    }

    fn s_prime_inverse(&self, t: f64, sp: f64) -> f64 {
        let (s0, sc) = (self.s_c0(), self.s_c(t));
        if sp <= sc {
            sp / sc * s0
        } else {
            let u = (sp - sc) / (1.0 - sc);
            s0 + u * (1.0 - s0)
        }
    }

    fn ratio(&self) -> Point3 {
        self.outer.half_extents().zip(self.inner.half_extents(), |o, i| o / i)
    }

    /// Glued parameter `s(p) ∈ [0, 1]` and the inner boundary point of the
    /// line through `p`. `None` for `p == tip`.
    pub fn decompose(&self, p: Point3) -> Option<(f64, Point3)> {
        if self.inner.contains(p) {
            let lambda = box_gauge(&self.inner, self.tip, p);
            if lambda == 0.0 {
                return None;
            }
            let v_in = self.tip + (p - self.tip) * (1.0 / lambda);
            Some((0.5 * lambda.min(1.0), v_in))
        } else {
            let c = self.inner.center();
            let wi = self.inner.half_extents();
            let wo = self.outer.half_extents();
            let mut s = 0.0_f64;
            for i in 0..3 {
                s = s.max(((p[i] - c[i]).abs() - wi[i]) / (wo[i] - wi[i]));
            }
            let s = s.clamp(0.0, 1.0);
            let r = self.ratio();
            let v_in = c + (p - c).zip(r, |d, ri| d / (1.0 + s * (ri - 1.0)));
            Some((0.5 * (1.0 + s), v_in))
        }
    }

    /// Point with glued parameter `s` on the line through `v_in`.
    pub fn rebuild(&self, s: f64, v_in: Point3) -> Point3 {
        if s <= 0.5 {
            self.tip + (v_in - self.tip) * (2.0 * s)
        } else {
            let c = self.inner.center();
            let v_out = c + (v_in - c).zip(self.ratio(), |d, r| d * r);
            v_in + (v_out - v_in) * (2.0 * s - 1.0)
        }
    }

    pub fn eval(&self, t: f64, p: Point3) -> Point3 {
        if t == 0.0 || !self.outer.contains_interior(p) {
            return p;
        }
        match self.decompose(p) {
            None => p,
            Some((s, v_in)) => self.rebuild(self.s_prime(t, s), v_in),
        }
    }

    pub fn eval_inverse(&self, t: f64, p: Point3) -> Point3 {
        if t == 0.0 || !self.outer.contains_interior(p) {
            return p;
        }
        match self.decompose(p) {
            None => p,
            Some((s, v_in)) => self.rebuild(self.s_prime_inverse(t, s), v_in),
        }
    }
}

/// The unsquish isotopy frozen at time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnsquishMap {
    pub params: UnsquishParams,
    pub t: f64,
    /// Run backwards: the map is the inverse of the unsquish at `t`, which
    /// contracts the inner box towards the tip.
    #[serde(default)]
    pub inverted: bool,
}

impl UnsquishMap {
    pub fn eval(&self, p: Point3) -> Point3 {
        if self.inverted {
            self.params.eval_inverse(self.t, p)
        } else {
            self.params.eval(self.t, p)
        }
    }

    pub fn eval_inverse(&self, p: Point3) -> Point3 {
        if self.inverted {
            self.params.eval(self.t, p)
        } else {
            self.params.eval_inverse(self.t, p)
        }
    }
}

/// x ↦ x^exponent on the unit segment of the x-axis, identity elsewhere.
/// The ambient space of the one-dimensional counterexample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisPower {
    pub exponent: f64,
}

impl AxisPower {
    pub fn segment() -> Aabb {
        Aabb { min: Point3::ORIGIN, max: Point3::new(1.0, 0.0, 0.0) }
    }

    fn on_segment(p: Point3) -> bool {
        p.y == 0.0 && p.z == 0.0 && (0.0..=1.0).contains(&p.x)
    }

    pub fn eval(&self, p: Point3) -> Point3 {
        if Self::on_segment(p) {
            Point3::new(p.x.powf(self.exponent), 0.0, 0.0)
        } else {
            p
        }
    }

    pub fn eval_inverse(&self, p: Point3) -> Point3 {
        if Self::on_segment(p) {
            Point3::new(p.x.powf(1.0 / self.exponent), 0.0, 0.0)
        } else {
            p
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LocalMap {
    Affine(AffineMap),
    Cone(ConeMap),
    Unsquish(UnsquishMap),
    AxisPower(AxisPower),
    /// Applied first to last.
    Composite(Vec<LocalMap>),
}

impl LocalMap {
    pub fn identity() -> Self {
        LocalMap::Composite(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, LocalMap::Composite(v) if v.iter().all(LocalMap::is_identity))
    }

    pub fn eval(&self, p: Point3) -> Point3 {
        match self {
            LocalMap::Affine(a) => a.eval(p),
            LocalMap::Cone(c) => c.eval(p),
            LocalMap::Unsquish(u) => u.eval(p),
            LocalMap::AxisPower(a) => a.eval(p),
            LocalMap::Composite(parts) => parts.iter().fold(p, |q, m| m.eval(q)),
        }
    }

    pub fn eval_inverse(&self, p: Point3) -> Point3 {
        match self {
            LocalMap::Affine(a) => a.eval_inverse(p),
            LocalMap::Cone(c) => c.eval_inverse(p),
            LocalMap::Unsquish(u) => u.eval_inverse(p),
            LocalMap::AxisPower(a) => a.eval_inverse(p),
            LocalMap::Composite(parts) => parts.iter().rev().fold(p, |q, m| m.eval_inverse(q)),
        }
    }

    pub fn support(&self) -> Support {
        match self {
            LocalMap::Affine(_) => Support::Everywhere,
            LocalMap::Cone(c) if c.source == c.target => Support::Empty,
            LocalMap::Cone(c) => Support::Bounded(c.region),
            LocalMap::Unsquish(u) if u.t == 0.0 => Support::Empty,
            LocalMap::Unsquish(u) => Support::Bounded(u.params.outer),
            LocalMap::AxisPower(_) => Support::Bounded(AxisPower::segment()),
            LocalMap::Composite(parts) => parts.iter().fold(Support::Empty, |s, m| s.union(m.support())),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LocalMap::Affine(_) => "affine",
            LocalMap::Cone(_) => "cone",
            LocalMap::Unsquish(_) => "unsquish",
            LocalMap::AxisPower(_) => "axis_power",
            LocalMap::Composite(_) => "composite",
        }
    }

    /// Structured-text description, one map per line, nested composites
    /// indented. Reals are written with 17 significant digits.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        self.describe_into(&mut out, 0);
        out
    }

    fn describe_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let r = |v: f64| format!("{v:.16e}");
        let p = |v: Point3| format!("{} {} {}", r(v.x), r(v.y), r(v.z));
        match self {
            LocalMap::Affine(a) => {
                let m = a.matrix;
                let rows: Vec<String> =
                    m.iter().map(|row| row.iter().map(|&v| r(v)).collect::<Vec<_>>().join(" ")).collect();
                let _ = writeln!(out, "{pad}affine matrix=[{}] translation=[{}]", rows.join("; "), p(a.translation));
            }
            LocalMap::Cone(c) => {
                let _ = writeln!(
                    out,
                    "{pad}cone region=[{} ; {}] source=[{}] target=[{}]",
                    p(c.region.min),
                    p(c.region.max),
                    p(c.source),
                    p(c.target)
                );
            }
            LocalMap::Unsquish(u) => {
                let q = &u.params;
                let _ = writeln!(
                    out,
                    "{pad}{} outer=[{} ; {}] inner=[{} ; {}] tip=[{}] c={} t={}",
                    if u.inverted { "squish" } else { "unsquish" },
                    p(q.outer.min),
                    p(q.outer.max),
                    p(q.inner.min),
                    p(q.inner.max),
                    p(q.tip),
                    r(q.c),
                    r(u.t)
                );
            }
            LocalMap::AxisPower(a) => {
                let _ = writeln!(out, "{pad}axis_power exponent={}", r(a.exponent));
            }
            LocalMap::Composite(parts) => {
                let _ = writeln!(out, "{pad}composite n={}", parts.len());
                for m in parts {
                    m.describe_into(out, depth + 1);
                }
            }
        }
    }

    /// Conjugate by the similarity x ↦ origin + scale·x, i.e. the map that
    /// does the same thing to the scaled copy of space.
    pub fn conjugate_similarity(&self, scale: f64, origin: Point3) -> LocalMap {
        let sp = |p: Point3| origin + p * scale;
        let sb = |b: Aabb| b.similarity(scale, origin);
        match self {
            LocalMap::Affine(a) => {
                let m = a.matrix;
                let t = origin + a.translation * scale - mat_vec(&m, origin);
                LocalMap::Affine(AffineMap::new(m, t).expect("same matrix"))
            }
            LocalMap::Cone(c) => {
                LocalMap::Cone(ConeMap { region: sb(c.region), source: sp(c.source), target: sp(c.target) })
            }
            LocalMap::Unsquish(u) => LocalMap::Unsquish(UnsquishMap {
                params: UnsquishParams {
                    outer: sb(u.params.outer),
                    inner: sb(u.params.inner),
                    tip: sp(u.params.tip),
                    c: u.params.c,
                },
                t: u.t,
                inverted: u.inverted,
            }),
            LocalMap::AxisPower(a) => LocalMap::AxisPower(*a),
            LocalMap::Composite(parts) => {
                LocalMap::Composite(parts.iter().map(|m| m.conjugate_similarity(scale, origin)).collect())
            }
        }
    }
}

/// `m1` first, then `m2`. Nested composites are flattened.
pub fn compose(m1: LocalMap, m2: LocalMap) -> LocalMap {
    let mut parts = Vec::new();
    for m in [m1, m2] {
        match m {
            LocalMap::Composite(inner) => parts.extend(inner),
            other => parts.push(other),
        }
    }
    LocalMap::Composite(parts)
}

pub fn make_cone_map(region: Aabb, p0: Point3, p1: Point3) -> Result<LocalMap> {
    Ok(LocalMap::Cone(ConeMap::new(region, p0, p1)?))
}

/// Sample-based estimate of the largest `c` with
/// `c·d(x1, x2) ≤ d(m(x1), m(x2))` over pairs in `region`.
///
/// Half of the pairs are independent uniform draws; the other half pair a
/// uniform point with a neighbour at a log-uniform offset between 1e-3 and 1
/// times the region diameter, which is where PL maps squeeze hardest.
pub fn estimate_inverse_lipschitz(m: &LocalMap, region: &Aabb, n_samples: usize, seed: u64) -> Result<f64> {
    estimate_inverse_lipschitz_with(Execution::default(), m, region, n_samples, seed)
}

pub fn estimate_inverse_lipschitz_with(
    exec: Execution,
    m: &LocalMap,
    region: &Aabb,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 sample pairs".into()));
    }
    let pairs = sample_pairs(region, n_samples, seed);
    let c = exec::min_by(exec, &pairs, |&(a, b)| {
        let d = distance(a, b);
        if d == 0.0 {
            f64::INFINITY
        } else {
            distance(m.eval(a), m.eval(b)) / d
        }
    });
    Ok(c)
}

pub(crate) fn sample_pairs(region: &Aabb, n: usize, seed: u64) -> Vec<(Point3, Point3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diam = region.diameter();
    let uniform = |rng: &mut ChaCha8Rng| {
        Point3::new(
            rng.gen_range(region.min.x..=region.max.x),
            rng.gen_range(region.min.y..=region.max.y),
            rng.gen_range(region.min.z..=region.max.z),
        )
    };
    (0..n)
        .map(|k| {
            let a = uniform(&mut rng);
            let b = if k % 2 == 0 {
                uniform(&mut rng)
            } else {
                let dir = loop {
                    let v = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    let n = v.norm();
                    if n > 1e-3 && n <= 1.0 {
                        break v * (1.0 / n);
                    }
                };
                let scale = diam * 10f64.powf(-rng.gen_range(0.0..3.0));
                a + dir * scale
            };
            (a, b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cone(p1: Point3) -> ConeMap {
        ConeMap::new(Aabb::unit(), Point3::splat(0.5), p1).unwrap()
    }

    #[test]
    fn cone_identity_when_apexes_agree() {
        let c = unit_cone(Point3::splat(0.5));
        for p in [Point3::new(0.1, 0.7, 0.3), Point3::splat(0.5), Point3::new(2.0, 0.0, 0.0)] {
            assert_eq!(c.eval(p), p);
        }
    }

    #[test]
    fn cone_rejects_boundary_apex() {
        assert!(ConeMap::new(Aabb::unit(), Point3::new(1.0, 0.5, 0.5), Point3::splat(0.5)).is_err());
        assert!(ConeMap::new(Aabb::unit(), Point3::splat(0.5), Point3::new(0.5, 0.5, 1.5)).is_err());
    }

    #[test]
    fn cone_moves_apex_and_fixes_boundary() {
        let c = unit_cone(Point3::new(0.7, 0.5, 0.5));
        assert_eq!(c.eval(Point3::splat(0.5)), Point3::new(0.7, 0.5, 0.5));
        for p in Aabb::unit().corners() {
            assert_eq!(c.eval(p), p);
        }
        assert_eq!(c.eval(Point3::new(1.0, 0.3, 0.9)), Point3::new(1.0, 0.3, 0.9));
    }

    #[test]
    fn cone_ray_example() {
        // (0.6, .5, .5) is 1/5 of the way from the apex to the face center;
        // its image is 1/5 of the way from (0.7, .5, .5) to the same face center
        let c = unit_cone(Point3::new(0.7, 0.5, 0.5));
        let img = c.eval(Point3::new(0.6, 0.5, 0.5));
        assert!((img.x - 0.76).abs() < 1e-15, "{img}");
        assert_eq!((img.y, img.z), (0.5, 0.5));
    }

    #[test]
    fn singular_affine_rejected() {
        let m = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]];
        assert!(matches!(AffineMap::new(m, Point3::ORIGIN), Err(Error::InvalidMap(_))));
    }

    #[test]
    fn affine_inverse() {
        let a =
            AffineMap::new([[2.0, 1.0, 0.0], [0.0, 1.0, -1.0], [1.0, 0.0, 3.0]], Point3::new(1.0, -2.0, 0.5)).unwrap();
        let p = Point3::new(0.3, -0.7, 1.9);
        assert!(distance(a.eval_inverse(a.eval(p)), p) < 1e-14);
        let t = AffineMap::translation(Point3::new(1.0, 2.0, 3.0));
        assert_eq!(t.eval_inverse(Point3::ORIGIN), Point3::new(-1.0, -2.0, -3.0));
    }

    #[test]
    fn compose_order_and_translation_sum() {
        let a = LocalMap::Affine(AffineMap::translation(Point3::new(1.0, 0.0, 0.0)));
        let b = LocalMap::Affine(AffineMap::scaling(2.0, Point3::ORIGIN).unwrap());
        let ab = compose(a.clone(), b.clone());
        // translate first, then scale
        assert_eq!(ab.eval(Point3::ORIGIN), Point3::new(2.0, 0.0, 0.0));
        let t2 = compose(a.clone(), LocalMap::Affine(AffineMap::translation(Point3::new(0.0, 3.0, 0.0))));
        assert_eq!(t2.eval(Point3::ORIGIN), Point3::new(1.0, 3.0, 0.0));
        let with_id = compose(LocalMap::identity(), a.clone());
        assert_eq!(with_id.eval(Point3::new(0.5, 0.5, 0.5)), a.eval(Point3::new(0.5, 0.5, 0.5)));
    }

    #[test]
    fn compose_support_is_bounding_box() {
        let a = make_cone_map(Aabb::unit(), Point3::splat(0.5), Point3::splat(0.6)).unwrap();
        let b = make_cone_map(
            Aabb::unit().translate(Point3::new(3.0, 0.0, 0.0)),
            Point3::new(3.5, 0.5, 0.5),
            Point3::new(3.4, 0.5, 0.5),
        )
        .unwrap();
        let s = compose(a, b).support().as_box().unwrap();
        assert_eq!(s, Aabb::new(Point3::ORIGIN, Point3::new(4.0, 1.0, 1.0)).unwrap());
        assert_eq!(LocalMap::identity().support(), Support::Empty);
    }

    fn unsquish(c: f64) -> UnsquishParams {
        let inner = Aabb::from_center(Point3::ORIGIN, Point3::new(1.0, 0.5, 0.5));
        let outer = Aabb::from_center(Point3::ORIGIN, Point3::new(1.2, 0.7, 0.7));
        UnsquishParams::new(outer, inner, Point3::new(0.2, 0.0, 0.1), c).unwrap()
    }

    #[test]
    fn unsquish_validation() {
        let inner = Aabb::from_center(Point3::ORIGIN, Point3::splat(1.0));
        let outer = Aabb::from_center(Point3::ORIGIN, Point3::splat(2.0));
        assert!(UnsquishParams::new(outer, inner, Point3::ORIGIN, 1.0).is_err());
        assert!(UnsquishParams::new(outer, inner, Point3::new(1.0, 0.0, 0.0), 0.5).is_err());
        assert!(UnsquishParams::new(inner, outer, Point3::ORIGIN, 0.5).is_err());
        let shifted = outer.translate(Point3::new(0.1, 0.0, 0.0));
        assert!(UnsquishParams::new(shifted, inner, Point3::ORIGIN, 0.5).is_err());
        assert!(UnsquishParams::new(outer, inner, Point3::ORIGIN, 0.5).is_ok());
    }

    #[test]
    fn unsquish_time_zero_is_identity_and_tip_fixed() {
        let u = unsquish(0.5);
        for p in [Point3::new(0.3, 0.1, -0.2), Point3::new(1.1, 0.6, 0.0), Point3::new(-0.9, 0.4, 0.45)] {
            assert_eq!(u.eval(0.0, p), p);
        }
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(u.eval(t, u.tip), u.tip);
        }
    }

    #[test]
    fn unsquish_s_prime_reduces_at_time_zero() {
        let u = unsquish(0.3);
        for k in 0..=20 {
            let s = k as f64 / 20.0;
            assert!((u.s_prime(0.0, s) - s).abs() < 1e-15);
        }
        assert!((u.s_prime(1.0, u.s_c0()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unsquish_halfway_point_reaches_inner_boundary() {
        // c = 0.5, p halfway from the tip to the inner face along +x
        let u = unsquish(0.5);
        let face = Point3::new(1.0, 0.0, 0.1);
        let p = u.tip.lerp(face, 0.5);
        let (s, _) = u.decompose(p).unwrap();
        assert!((s - 0.25).abs() < 1e-15);
        let img = u.eval(1.0, p);
        assert!(distance(img, face) < 1e-12, "{img}");
        assert!((distance(img, u.tip) / distance(p, u.tip) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unsquish_roundtrip_all_times() {
        let u = unsquish(0.4);
        let pairs = sample_pairs(&u.outer.inflate(0.1), 2000, 3);
        for t in [0.25, 0.5, 1.0] {
            for &(p, _) in &pairs {
                let q = u.eval(t, p);
                assert!(distance(u.eval_inverse(t, q), p) < 1e-12);
            }
        }
    }

    #[test]
    fn axis_power_only_moves_segment() {
        let a = AxisPower { exponent: 2.0 };
        assert_eq!(a.eval(Point3::new(0.5, 0.0, 0.0)), Point3::new(0.25, 0.0, 0.0));
        assert_eq!(a.eval(Point3::new(0.5, 1e-9, 0.0)), Point3::new(0.5, 1e-9, 0.0));
        assert_eq!(a.eval(Point3::new(1.5, 0.0, 0.0)), Point3::new(1.5, 0.0, 0.0));
    }

    #[test]
    fn inverse_lipschitz_identity_and_scaling() {
        let r = Aabb::unit();
        let c = estimate_inverse_lipschitz(&LocalMap::identity(), &r, 1000, 1).unwrap();
        assert_eq!(c, 1.0);
        let half = LocalMap::Affine(AffineMap::scaling(0.5, Point3::ORIGIN).unwrap());
        let c = estimate_inverse_lipschitz(&half, &r, 1000, 1).unwrap();
        assert!((c - 0.5).abs() < 1e-9);
        assert!(estimate_inverse_lipschitz(&half, &r, 1, 1).is_err());
    }

    #[test]
    fn inverse_lipschitz_deterministic() {
        let m = make_cone_map(Aabb::unit(), Point3::splat(0.5), Point3::new(0.8, 0.4, 0.5)).unwrap();
        let a = estimate_inverse_lipschitz(&m, &Aabb::unit(), 5000, 9).unwrap();
        let b = estimate_inverse_lipschitz_with(Execution::Sequential, &m, &Aabb::unit(), 5000, 9).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.0 && a < 1.0);
    }

    #[test]
    fn conjugated_cone_matches_scaled_action() {
        let m = make_cone_map(Aabb::unit(), Point3::splat(0.5), Point3::new(0.8, 0.4, 0.5)).unwrap();
        let origin = Point3::new(3.0, -1.0, 2.0);
        let m2 = m.conjugate_similarity(0.25, origin);
        let p = Point3::new(0.3, 0.6, 0.45);
        let lhs = m2.eval(origin + p * 0.25);
        let rhs = origin + m.eval(p) * 0.25;
        assert!(distance(lhs, rhs) < 1e-15);
    }

    #[test]
    fn describe_uses_17_digits() {
        let m = make_cone_map(Aabb::unit(), Point3::splat(0.5), Point3::new(0.7, 0.5, 0.5)).unwrap();
        let d = compose(m, LocalMap::identity()).describe();
        assert!(d.starts_with("composite n=1\n  cone region="));
        assert!(d.contains("5.0000000000000000e-1"));
    }
}

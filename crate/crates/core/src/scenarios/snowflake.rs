//! Iterated bump curves in the spirit of the Koch snowflake. Level 1 is a
//! unit triangle; each level replaces every edge `a → b` by
//! `a → a + (b−a)/3 → bump → a + 2(b−a)/3 → b`, where the bump lifts the
//! edge midpoint by `shrink^n` perpendicular to the edge. Old vertices keep
//! their parameters, so consecutive levels differ by exactly the bump
//! height.

use crate::error::{Error, Result};
use crate::geometry::{distance, PLCurve, Point3};

/// Unit vector perpendicular to `d`, turning with the level so the bumps
/// twist out of the plane.
fn normal(d: Point3, level: usize) -> Point3 {
    let z = Point3::new(0.0, 0.0, 1.0);
    let side = d.cross(z);
    let n = if level % 2 == 1 { z } else { side * (1.0 / side.norm()) };
    // remove any component along the edge
    let n = n - d * (n.dot(d) / d.dot(d));
    n * (1.0 / n.norm())
}

pub fn build_snowflake(shrink: f64, depth: usize) -> Result<Vec<PLCurve>> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::InvalidArgument(format!("shrink {shrink} outside (0, 1)")));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let h = 3f64.sqrt() / 2.0;
    let mut v = vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.5, h, 0.0)];
    let mut out = vec![PLCurve::closed(v.clone())?];
    for level in 1..depth {
        let lift = shrink.powi(level as i32);
        let n = v.len();
        let mut next = Vec::with_capacity(4 * n);
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let d = b - a;
            next.push(a);
            next.push(a + d * (1.0 / 3.0));
            next.push(a.lerp(b, 0.5) + normal(d, level) * lift);
            next.push(a + d * (2.0 / 3.0));
        }
        v = next;
        out.push(PLCurve::closed(v.clone())?);
    }
    Ok(out)
}

/// Sup distance between consecutive levels as parameterised curves. Both
/// are linear between the finer level's vertices, so the sup is attained
/// there.
pub fn snowflake_deviations(levels: &[PLCurve]) -> Vec<f64> {
    levels
        .windows(2)
        .map(|w| {
            let (coarse, fine) = (w[0].vertices(), w[1].vertices());
            let n = coarse.len();
            (0..n)
                .flat_map(|i| {
                    let (a, b) = (coarse[i], coarse[(i + 1) % n]);
                    let along = [a, a.lerp(b, 1.0 / 3.0), a.lerp(b, 0.5), a.lerp(b, 2.0 / 3.0)];
                    (0..4).map(move |j| (along[j], 4 * i + j))
                })
                .map(|(p, j)| distance(p, fine[j]))
                .fold(0.0, f64::max)
        })
        .collect()
}

//! Canonical Reidemeister I kink on a straight strand along the x-axis,
//! built from three pulls. The strand runs from (−3, 0, 0) to (3, 0, 0);
//! all pulls stay inside `[-2, 2.1] × [-0.5, 2] × [-0.5, 1]`.

use std::sync::OnceLock;

use crate::geometry::{Aabb, Point3};
use crate::maps::ConeMap;

use super::planner::Planner;

pub(crate) struct KinkTemplate {
    /// Vertices of the straight strand, refined so every pull is exact.
    pub straight: Vec<Point3>,
    /// Strand after insertion.
    pub kinked: Vec<Point3>,
    /// Insertion pulls, in order.
    pub insert: Vec<ConeMap>,
    /// Removal pulls: the insertion undone backwards.
    pub remove: Vec<ConeMap>,
}

fn p(x: f64, y: f64, z: f64) -> Point3 {
    Point3::new(x, y, z)
}

fn b(min: Point3, max: Point3) -> Aabb {
    Aabb::new(min, max).expect("ordered corners")
}

/// Box holding every pull of the template.
#[cfg(test)]
pub(crate) fn kink_hull() -> Aabb {
    b(p(-2.0, -0.5, -0.5), p(2.1, 2.0, 1.0))
}

pub(crate) fn kink() -> &'static KinkTemplate {
    static CELL: OnceLock<KinkTemplate> = OnceLock::new();
    CELL.get_or_init(|| {
        let strand = vec![p(-3.0, 0.0, 0.0), p(0.0, 0.0, 0.0), p(3.0, 0.0, 0.0)];
        let mut pl = Planner::new(strand, b(p(-3.5, -1.0, -1.0), p(3.5, 2.5, 1.5)), vec![]);
        // bend the strand up into a tent a → c1 → b
        pl.pull_in(p(0.0, 0.0, 0.0), p(1.0, 1.0, 0.0), b(p(-2.0, -0.5, -0.5), p(2.0, 1.5, 0.5))).unwrap();
        // lift the midpoint of c1 → b above the plane
        pl.split(p(1.5, 0.5, 0.0)).unwrap();
        pl.pull_in(p(1.5, 0.5, 0.0), p(1.5, 1.5, 0.5), b(p(1.0, -0.5, -0.5), p(2.0, 2.0, 1.0))).unwrap();
        // swing the lifted vertex over the strand to the other side
        pl.pull_in(p(1.5, 1.5, 0.5), p(-1.0, 1.0, 0.5), b(p(-1.5, 0.5, 0.25), p(2.1, 2.0, 0.75))).unwrap();
        KinkTemplate {
            straight: pl.initial_vertices(),
            kinked: pl.curve().to_vec(),
            insert: pl.pulls().to_vec(),
            remove: pl.reversed_pulls(),
        }
    })
}

/// Cone stages moved onto the copy `x ↦ origin + scale·x`.
pub(crate) fn placed(maps: &[ConeMap], scale: f64, origin: Point3) -> Vec<crate::isotopy::PathStage> {
    maps.iter().map(|&c| crate::isotopy::PathStage::Cone(c).conjugate_similarity(scale, origin)).collect()
}

//! Ball factoring for nested neighbourhoods of an arc endpoint: find
//! `V_{n0} ⊆ B_ε(p) ⊆ V_1`. Through that chain the inclusion of
//! complements factors through a ball minus a radius, whose fundamental
//! group is trivial. Only the containment chain is computed here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Aabb, Point3};

#[derive(Clone, Debug, PartialEq)]
pub struct NestedFamily {
    p: Point3,
    regions: Vec<Aabb>,
}

impl NestedFamily {
    /// `regions[0]` is `V_1`. Requires strict nesting and `p` interior to
    /// every region.
    pub fn new(p: Point3, regions: Vec<Aabb>) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::InvalidGeometry("nested family needs at least one region".into()));
        }
        for (k, r) in regions.iter().enumerate() {
            if !r.contains_interior(p) {
                return Err(Error::InvalidGeometry(format!("p = {p} not interior to V_{}", k + 1)));
            }
        }
        for (k, w) in regions.windows(2).enumerate() {
            if !w[0].contains_box(&w[1]) || w[0] == w[1] {
                return Err(Error::InvalidGeometry(format!("V_{} is not strictly inside V_{}", k + 2, k + 1)));
            }
        }
        Ok(NestedFamily { p, regions })
    }

    /// `V_k = B(p, side_0 · ratio^{k−1} / 2)` as cubes, `k = 1..=count`.
    pub fn centered_cubes(p: Point3, side0: f64, ratio: f64, count: usize) -> Result<Self> {
        let regions =
            (0..count).map(|k| Aabb::from_center(p, Point3::splat(0.5 * side0 * ratio.powi(k as i32)))).collect();
        Self::new(p, regions)
    }

    pub fn point(&self) -> Point3 {
        self.p
    }

    pub fn regions(&self) -> &[Aabb] {
        &self.regions
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallFactoring {
    pub epsilon: f64,
    pub n0: usize,
    #[serde(skip)]
    pub certificate: String,
}

/// Closed box inside the closed ball iff every corner is.
pub fn box_in_ball(b: &Aabb, center: Point3, radius: f64) -> bool {
    b.corners().iter().all(|&c| distance(c, center) <= radius)
}

/// Closed ball inside the box iff the wall distance is at least the radius.
pub fn ball_in_box(center: Point3, radius: f64, b: &Aabb) -> bool {
    b.contains(center) && b.wall_distance(center) >= radius
}

pub fn find_ball_factoring(fam: &NestedFamily, horizon: usize) -> Result<BallFactoring> {
    let p = fam.p;
    let v1 = &fam.regions[0];
    let epsilon = 0.5 * v1.wall_distance(p);
    debug_assert!(ball_in_box(p, epsilon, v1));
    let n0 = fam
        .regions
        .iter()
        .take(horizon)
        .position(|r| box_in_ball(r, p, epsilon))
        .map(|i| i + 1)
        .ok_or(Error::NoFactoring { epsilon, horizon })?;
    let certificate = format!(
        "V_{n0} ⊆ B_{epsilon:.6e}({p}) ⊆ V_1 (corner test, wall test); \
         π1 of a ball minus a radius is trivial, so the inclusion V_{n0}∖f → V_1∖f induces the trivial homomorphism"
    );
    Ok(BallFactoring { epsilon, n0, certificate })
}

//! Countably many R1 kinks on a loop, accumulating at the origin. Kink `k`
//! has scale `2^{−k}`, sits at `x = 10·2^{−k}` and is removed by move `k`
//! inside a box of its own.

use crate::engine::{Move, MoveSequence};
use crate::geometry::{Aabb, PLCurve, Point3};
use crate::isotopy::Isotopy;

use super::kink::{kink, placed};
use super::{default_probes, place, Expected, Scenario};

fn scale(k: usize) -> f64 {
    0.5f64.powi(k as i32)
}

fn center(k: usize) -> Point3 {
    Point3::new(10.0 * scale(k), 0.0, 0.0)
}

/// Box around the kink template, generous enough to hold every pull.
fn canonical_support() -> Aabb {
    Aabb::new(Point3::new(-3.0, -1.0, -1.0), Point3::new(3.0, 2.5, 1.5)).expect("ordered")
}

pub(crate) fn support(k: usize) -> Aabb {
    canonical_support().similarity(scale(k), center(k))
}

fn curve(depth: usize) -> crate::error::Result<PLCurve> {
    let mut v = vec![Point3::new(-1.0, 0.0, 0.0)];
    for k in (1..=depth).rev() {
        v.extend(place(&kink().kinked, scale(k), center(k)));
    }
    v.extend([Point3::new(8.0, 0.0, 0.0), Point3::new(8.0, -3.0, 0.0), Point3::new(-1.0, -3.0, 0.0)]);
    PLCurve::closed(v)
}

pub fn build_countable_r1() -> Scenario {
    let container = Aabb::new(Point3::new(-2.0, -4.0, -2.0), Point3::new(9.0, 4.0, 2.0)).expect("ordered");
    let moves = MoveSequence::new(container, |k| {
        let iso = Isotopy::from_stages(placed(&kink().remove, scale(k), center(k)));
        Some(Move::new(iso, support(k)).expect("kink pulls lie in the support"))
    })
    .with_decay_ratio(0.5);
    let probe_moves = moves.clone();
    Scenario::new("countable_r1", moves, Expected::PASS, Some(Point3::ORIGIN), curve, move |seed| {
        default_probes(&probe_moves, seed, 10)
    })
}

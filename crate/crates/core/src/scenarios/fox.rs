//! A stitched arc converging to a wild point at the origin, after Fox's
//! remarkable curve. Unit `k` is the canonical unit scaled by `2^{−(k−1)}`
//! about the origin and carries a pair of opposite kinks.
//!
//! Move `k` contracts the inner 80 % of `V_k` by one half towards the wild
//! point, which is how each stitch removal drags the rest of space along.
//! The contraction of `V_k`'s core lands exactly on `V_{k+1}`'s core, so a
//! line of points threaded through the first stitch is trapped forever and
//! squeezed onto the wild point.

use crate::engine::{Move, MoveSequence};
use crate::geometry::{Aabb, PLCurve, Point3};
use crate::isotopy::{Isotopy, PathStage};
use crate::maps::UnsquishParams;

use super::kink::kink;
use super::{default_probes, Expected, ProbePoints, Scenario};

const CORE: f64 = 0.8;
const PULL: f64 = 0.5;
/// Kink scale and centres for unit 1.
const KINK_SCALE: f64 = 0.1;
const KINK_CENTERS: [f64; 2] = [-1.5, -1.0];

fn scale(k: usize) -> f64 {
    0.5f64.powi(k as i32 - 1)
}

fn first_support() -> Aabb {
    Aabb::new(Point3::new(-2.0, -1.0, -1.0), Point3::new(0.5, 1.0, 1.0)).expect("ordered")
}

fn support(k: usize) -> Aabb {
    first_support().similarity(scale(k), Point3::ORIGIN)
}

fn core(v: &Aabb) -> Aabb {
    Aabb::from_center(v.center(), v.half_extents() * CORE)
}

/// Points across the first stitch, between its two kinks and just above
/// the strand.
pub(crate) fn tracked_line() -> Vec<Point3> {
    (0..=100).map(|i| Point3::new(-1.25, -0.5 + i as f64 / 100.0, 0.2)).collect()
}

fn curve(depth: usize) -> crate::error::Result<PLCurve> {
    let t = kink();
    let mut v = vec![Point3::new(-2.5, 0.0, 0.0)];
    for k in 1..=depth {
        let s = scale(k);
        for (j, &c) in KINK_CENTERS.iter().enumerate() {
            let flip = if j == 0 { 1.0 } else { -1.0 };
            // the template runs along +x; traverse it towards the origin
            let center = Point3::new(c * s, 0.0, 0.0);
            let inner = &t.kinked[1..t.kinked.len() - 1];
            v.extend(inner.iter().map(|q| center + Point3::new(q.x, flip * q.y, q.z) * (KINK_SCALE * s)));
        }
    }
    v.push(Point3::ORIGIN);
    PLCurve::open(v)
}

pub fn build_fox_remarkable() -> Scenario {
    let container = Aabb::new(Point3::new(-3.0, -2.0, -2.0), Point3::new(1.5, 2.0, 2.0)).expect("ordered");
    let moves = MoveSequence::new(container, |k| {
        let v = support(k);
        let params = UnsquishParams::new(v, core(&v), Point3::ORIGIN, PULL).expect("core is inside");
        Some(Move::new(Isotopy::from_stages(vec![PathStage::Squish(params)]), v).expect("squish lies in V_k"))
    })
    .with_decay_ratio(0.5);
    let probe_moves = moves.clone();
    Scenario::new(
        "fox_remarkable",
        moves,
        Expected { failing_condition: None, injective: false },
        Some(Point3::ORIGIN),
        curve,
        move |seed| {
            let line = tracked_line();
            let base = default_probes(&probe_moves, seed, 10);
            ProbePoints { grid: base.grid, pairs: line.windows(2).map(|w| (w[0], w[1])).collect(), census: line }
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{check_hypotheses, injectivity_probe};
    use crate::geometry::curve_is_simple;

    #[test]
    fn cores_chain_and_line_collapses() {
        let s = build_fox_remarkable();
        assert!(curve_is_simple(&s.initial_curve(6).unwrap(), 1e-6));
        let c1 = core(&support(1));
        assert!(tracked_line().iter().all(|&p| c1.contains_interior(p)));
        let squeezed = c1.similarity(PULL, Point3::ORIGIN);
        let c2 = core(&support(2));
        assert!(crate::geometry::distance(squeezed.min, c2.min) < 1e-15);
        let r = check_hypotheses(&s.moves, 20, 1e-3).unwrap();
        assert!(r.verdict.is_pass());
        let pairs = s.probe_points(0).pairs;
        let seps: Vec<f64> = [2, 4, 8, 16].iter().map(|&n| injectivity_probe(&s.moves, n, &pairs).unwrap()).collect();
        assert!(seps.windows(2).all(|w| w[1] < w[0]));
    }
}

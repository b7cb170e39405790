//! Kinks inserted ever closer to the vertex of a wedge, with unsquish
//! stages in between that keep the limit injective.
//!
//! The wedge runs `(4, 0, 0) → y_∞ = 0 → (0, 2, 0)`. `V_1` measures
//! `(6+ε)ℓ × (2+ε)ℓ × (2+ε)ℓ` around `y_∞` with `ε = 0.1`, `ℓ = 1`, and
//! `V_k = 2^{−(k−1)} V_1`. Move `k` first inserts kink `k`: it contracts
//! the inner 65 % of `V_k` by one half towards `y_∞` (making room near the
//! vertex) and then pulls a kink into the `x` arm at `x = 2.5·2^{−(k−1)}`.
//! It then unsquishes between `0.65·V_k` and `V_{k+1}` with factor
//! `c = 0.9 ×` the inverse-Lipschitz estimate of the insertion, so the
//! next insertion cannot undo the expansion.

use std::sync::OnceLock;

use crate::engine::{truncated_map, Move, MoveSequence};
use crate::error::Result;
use crate::geometry::{Aabb, PLCurve, Point3};
use crate::isotopy::{Isotopy, PathStage};
use crate::maps::{estimate_inverse_lipschitz, LocalMap, UnsquishParams};

use super::kink::{kink, placed};
use super::{default_probes, Expected, ProbePoints, Scenario};

pub const EPSILON: f64 = 0.1;
pub const ELL: f64 = 1.0;
const CORE: f64 = 0.65;
const PULL: f64 = 0.5;
const KINK_AT: f64 = 2.5;
const KINK_SCALE: f64 = 0.25;
/// Safety factor applied to the sampled inverse-Lipschitz estimate.
const C_MARGIN: f64 = 0.9;

/// The building blocks of move `k`, exposed for direct testing.
#[derive(Clone, Copy, Debug)]
pub struct RecursiveGeometry;

impl RecursiveGeometry {
    pub fn scale(k: usize) -> f64 {
        0.5f64.powi(k as i32 - 1)
    }

    pub fn support(k: usize) -> Aabb {
        let h = Point3::new((3.0 + EPSILON / 2.0) * ELL, (1.0 + EPSILON / 2.0) * ELL, (1.0 + EPSILON / 2.0) * ELL);
        Aabb::from_center(Point3::ORIGIN, h * Self::scale(k))
    }

    fn core(k: usize) -> Aabb {
        Self::support(k).similarity(CORE, Point3::ORIGIN)
    }

    pub fn squish(k: usize) -> UnsquishParams {
        UnsquishParams::new(Self::support(k), Self::core(k), Point3::ORIGIN, PULL).expect("core is inside")
    }

    fn kink_origin(k: usize) -> Point3 {
        Point3::new(KINK_AT * Self::scale(k), 0.0, 0.0)
    }

    fn kink_scale(k: usize) -> f64 {
        KINK_SCALE * Self::scale(k)
    }

    pub fn insert_stages(k: usize) -> Vec<PathStage> {
        let mut st = vec![PathStage::Squish(Self::squish(k))];
        st.extend(placed(&kink().insert, Self::kink_scale(k), Self::kink_origin(k)));
        st
    }

    /// Time-one map of the insertion of kink `k`.
    pub fn insert_map(k: usize) -> LocalMap {
        Isotopy::from_stages(Self::insert_stages(k)).end_map()
    }

    pub fn unsquish(k: usize) -> UnsquishParams {
        UnsquishParams::new(Self::core(k), Self::support(k + 1), Point3::ORIGIN, recursive_c()).expect("nested")
    }
}

/// Unsquish factor; independent of `k` since all moves are similar.
pub fn recursive_c() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let g = RecursiveGeometry::insert_map(1);
        C_MARGIN * estimate_inverse_lipschitz(&g, &RecursiveGeometry::support(1), 20_000, 7).expect("enough samples")
    })
}

fn sequence(with_unsquish: bool) -> MoveSequence {
    let container = Aabb::new(Point3::new(-4.0, -2.0, -2.0), Point3::new(5.0, 3.0, 2.0)).expect("ordered");
    MoveSequence::new(container, move |k| {
        let mut st = RecursiveGeometry::insert_stages(k);
        if with_unsquish {
            st.push(PathStage::Unsquish(RecursiveGeometry::unsquish(k)));
        }
        Some(Move::new(Isotopy::from_stages(st), RecursiveGeometry::support(k)).expect("stages lie in V_k"))
    })
    .with_decay_ratio(0.5)
}

/// The wedge with the x arm refined so that each kink's pulls meet their
/// vertices: the straight template of kink `k`, pulled back through the
/// earlier moves and the contraction that precedes it.
fn curve(moves: &MoveSequence, depth: usize) -> Result<PLCurve> {
    let mut arm: Vec<Point3> = vec![Point3::new(4.0, 0.0, 0.0)];
    for k in 1..=depth {
        let before = truncated_map(moves, k - 1)?;
        let squish = PathStage::Squish(RecursiveGeometry::squish(k)).at(1.0);
        let (s, o) = (RecursiveGeometry::kink_scale(k), RecursiveGeometry::kink_origin(k));
        for &q in &kink().straight {
            let p = before.eval_inverse(squish.eval_inverse(o + q * s));
            arm.push(Point3::new(p.x, 0.0, 0.0));
        }
    }
    arm.sort_by(|a, b| b.x.total_cmp(&a.x));
    arm.dedup_by(|a, b| (a.x - b.x).abs() <= 1e-15 * b.x.abs());
    arm.push(Point3::ORIGIN);
    arm.push(Point3::new(0.0, 2.0, 0.0));
    PLCurve::open(arm)
}

/// Point pairs along both wedge arms at geometrically spaced distances from
/// `y_∞`, plus nearby pairs inside the first supports.
fn probes(moves: &MoveSequence, seed: u64) -> ProbePoints {
    let mut base = default_probes(moves, seed, 10);
    let mut wedge = Vec::new();
    for j in 0..40 {
        let r = 3.0 * 0.5f64.powf(j as f64 / 2.0);
        wedge.push((Point3::new(r, 0.0, 0.0), Point3::new(1.02 * r, 0.0, 0.0)));
        wedge.push((Point3::new(0.0, r / 3.0, 0.0), Point3::new(0.0, 1.02 * r / 3.0, 0.0)));
        wedge.push((Point3::new(0.4 * r, 0.0, 0.0), Point3::new(0.0, 0.4 * r / 3.0, 0.0)));
    }
    base.census.extend(wedge.iter().map(|w| w.0));
    wedge.extend(base.pairs);
    base.pairs = wedge;
    base
}

fn scenario(name: &str, with_unsquish: bool, expected: Expected) -> Scenario {
    let moves = sequence(with_unsquish);
    let (cm, pm) = (moves.clone(), moves.clone());
    Scenario::new(name, moves, expected, Some(Point3::ORIGIN), move |n| curve(&cm, n), move |seed| probes(&pm, seed))
}

pub fn build_recursive_r1() -> Scenario {
    scenario("recursive_r1", true, Expected::PASS)
}

/// Ablation: the same insertions with no unsquish stages. Points near the
/// wedge vertex are contracted by every move and the limit is not
/// injective.
pub fn build_recursive_r1_without_unsquish() -> Scenario {
    scenario("recursive_r1_without_unsquish", false, Expected { failing_condition: None, injective: false })
}

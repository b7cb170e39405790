//! Countably many R2 fingers on a thin wedge loop, removed in two passes.
//!
//! The loop runs out along the x-axis and back along `y = 0.4 x`, meeting
//! itself at the origin. Unit `k` is the canonical unit scaled by
//! `2^{−(k−1)}` about the origin (the wedge is invariant under that). Each
//! unit has a finger from the upper strand reaching across the lower one
//! near `x = 10`, and a finger from the lower strand reaching across the
//! upper one near `x = 7`; each finger makes two crossings. The first pass
//! retracts the upper fingers, the second the lower ones.

use std::sync::OnceLock;

use crate::engine::{Move, MoveSequence};
use crate::geometry::{Aabb, PLCurve, Point3};
use crate::isotopy::Isotopy;
use crate::maps::ConeMap;

use super::kink::placed;
use super::planner::Planner;
use super::{default_probes, place, Expected, Scenario};

fn p(x: f64, y: f64, z: f64) -> Point3 {
    Point3::new(x, y, z)
}

fn bx(a: Point3, b: Point3) -> Aabb {
    Aabb::new(a, b).expect("ordered")
}

struct Finger {
    before: Vec<Point3>,
    after: Vec<Point3>,
    pulls: Vec<ConeMap>,
}

/// Upper finger, listed in the loop's direction of travel (x decreasing).
fn upper() -> &'static Finger {
    static CELL: OnceLock<Finger> = OnceLock::new();
    CELL.get_or_init(|| {
        let strand = vec![p(12.0, 4.8, 0.0), p(10.5, 4.2, 0.0), p(10.0, -0.5, 0.5), p(9.5, 3.8, 0.0), p(8.0, 3.2, 0.0)];
        let lower_strand = bx(p(7.0, -0.01, -0.01), p(13.0, 0.01, 0.01));
        let mut pl = Planner::new(strand, bx(p(7.0, -2.0, -1.0), p(13.0, 6.0, 2.0)), vec![lower_strand]);
        pl.pull_in(p(10.0, -0.5, 0.5), p(10.0, 1.0, 0.5), bx(p(9.6, -0.8, 0.25), p(10.4, 2.2, 0.75))).unwrap();
        Finger { before: pl.initial_vertices(), after: pl.curve().to_vec(), pulls: pl.pulls().to_vec() }
    })
}

/// Lower finger, x increasing.
fn lower() -> &'static Finger {
    static CELL: OnceLock<Finger> = OnceLock::new();
    CELL.get_or_init(|| {
        let strand = vec![p(5.5, 0.0, 0.0), p(6.5, 0.0, 0.0), p(7.0, 3.3, 0.5), p(7.5, 0.0, 0.0), p(8.5, 0.0, 0.0)];
        // the upper strand near x = 7 passes y = 2.8
        let upper_strand = bx(p(6.0, 2.39, -0.01), p(8.0, 3.21, 0.01));
        let mut pl = Planner::new(strand, bx(p(5.0, -1.0, -1.0), p(9.0, 5.0, 2.0)), vec![upper_strand]);
        pl.pull_in(p(7.0, 3.3, 0.5), p(7.0, 1.2, 0.5), bx(p(6.6, 0.5, 0.25), p(7.4, 3.6, 0.75))).unwrap();
        Finger { before: pl.initial_vertices(), after: pl.curve().to_vec(), pulls: pl.pulls().to_vec() }
    })
}

fn scale(k: usize) -> f64 {
    0.5f64.powi(k as i32 - 1)
}

fn upper_support() -> Aabb {
    bx(p(9.2, -1.0, 0.0), p(10.8, 2.5, 1.0))
}

fn lower_support() -> Aabb {
    bx(p(6.2, 0.0, 0.0), p(7.8, 4.0, 1.0))
}

/// Loop with upper fingers in state `up` and lower fingers in `low`.
fn wedge(depth: usize, up: &[Point3], low: &[Point3]) -> crate::error::Result<PLCurve> {
    let mut v = vec![Point3::ORIGIN];
    for k in (1..=depth).rev() {
        v.extend(place(low, scale(k), Point3::ORIGIN));
    }
    v.extend([p(14.0, 0.0, 0.0), p(14.0, 5.6, 0.0)]);
    for k in 1..=depth {
        v.extend(place(up, scale(k), Point3::ORIGIN));
    }
    PLCurve::closed(v)
}

fn sequence(finger: fn() -> &'static Finger, support: Aabb) -> MoveSequence {
    let container = bx(p(-1.0, -2.0, -1.0), p(15.0, 7.0, 2.0));
    MoveSequence::new(container, move |k| {
        let s = scale(k);
        let iso = Isotopy::from_stages(placed(&finger().pulls, s, Point3::ORIGIN));
        Some(Move::new(iso, support.similarity(s, Point3::ORIGIN)).expect("finger pulls lie in the support"))
    })
    .with_decay_ratio(0.5)
}

/// The two passes. The first one's curve at depth `n`, moved by its first
/// `n` moves, is the second one's curve at depth `n`.
pub fn build_countable_r2_two_stage() -> (Scenario, Scenario) {
    let first = sequence(upper, upper_support());
    let second = sequence(lower, lower_support());
    let (m1, m2) = (first.clone(), second.clone());
    let s1 = Scenario::new(
        "countable_r2_stage1",
        first,
        Expected::PASS,
        Some(Point3::ORIGIN),
        |n| wedge(n, &upper().before, &lower().before),
        move |seed| default_probes(&m1, seed, 10),
    );
    let s2 = Scenario::new(
        "countable_r2_stage2",
        second,
        Expected::PASS,
        Some(Point3::ORIGIN),
        |n| wedge(n, &upper().after, &lower().before),
        move |seed| default_probes(&m2, seed, 10),
    );
    (s1, s2)
}

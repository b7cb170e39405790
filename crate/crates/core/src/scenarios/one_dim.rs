//! Power maps on the unit segment: `h_k(x) = x^{(k+1)/k}`. Each is an
//! increasing bijection of [0, 1] supported on the whole segment, and the
//! composites `x^{n+1}` collapse [0, 1) onto 0.

use crate::engine::{Move, MoveSequence};
use crate::geometry::{Aabb, PLCurve, Point3};
use crate::isotopy::{Isotopy, PathStage};
use crate::maps::AxisPower;

use super::{Expected, ProbePoints, Scenario};

#[derive(Clone, Debug)]
pub struct Scenario1D {
    pub moves: MoveSequence,
    pub expected: Expected,
}

impl Scenario1D {
    pub fn exponent(k: usize) -> f64 {
        (k as f64 + 1.0) / k as f64
    }

    /// `h_k(x)`.
    pub fn step(k: usize, x: f64) -> f64 {
        x.powf(Self::exponent(k))
    }

    /// `h_n ∘ … ∘ h_1 (x)` by direct iteration.
    pub fn composite(n: usize, x: f64) -> f64 {
        (1..=n).fold(x, |y, k| Self::step(k, y))
    }

    /// The same moves as a three-dimensional scenario acting on the segment
    /// of the x-axis.
    pub fn as_scenario(&self) -> Scenario {
        Scenario::new(
            "1d_counterexample",
            self.moves.clone(),
            self.expected,
            None,
            |_| PLCurve::open(vec![Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)]),
            |_| {
                let xs: Vec<Point3> = (0..=100).map(|i| Point3::new(i as f64 / 100.0, 0.0, 0.0)).collect();
                ProbePoints {
                    pairs: xs.windows(2).map(|w| (w[0], w[1])).collect(),
                    census: xs[1..100].to_vec(),
                    grid: xs,
                }
            },
        )
    }
}

pub fn build_1d_counterexample() -> Scenario1D {
    let container = Aabb::new(Point3::new(-1.0, -1.0, -1.0), Point3::new(2.0, 1.0, 1.0)).expect("ordered");
    let moves = MoveSequence::new(container, |k| {
        let iso = Isotopy::from_stages(vec![PathStage::AxisPower(AxisPower { exponent: Scenario1D::exponent(k) })]);
        Some(Move::new(iso, AxisPower::segment()).expect("segment support"))
    });
    Scenario1D { moves, expected: Expected { failing_condition: Some(1), injective: false } }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{check_hypotheses, truncated_map};

    #[test]
    fn composite_is_a_power() {
        let s = build_1d_counterexample();
        let m = truncated_map(&s.moves, 12).unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let direct = Scenario1D::composite(12, x);
            assert!((direct - x.powi(13)).abs() < 1e-12);
            assert!((m.eval(Point3::new(x, 0.0, 0.0)).x - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn supports_never_shrink() {
        let r = check_hypotheses(&build_1d_counterexample().moves, 20, 1e-3).unwrap();
        assert_eq!(r.verdict.failed_condition(), Some(1));
        assert!(r.tail_diameters.iter().all(|&(_, d)| d == 1.0));
        assert!(!r.disjoint_supports);
    }
}

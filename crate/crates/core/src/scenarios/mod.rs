//! Example curves and move sequences, each bundled with the verdicts the
//! engine is expected to reach on them.
//!
//! Curves with infinitely many features are produced by depth: the curve at
//! depth `n` carries the first `n` features and is straight (or plain)
//! beyond them. Move streams are infinite and independent of depth.

mod fox;
mod kink;
mod one_dim;
mod planner;
mod r1;
mod r2;
pub use fox::build_fox_remarkable;
pub use one_dim::{build_1d_counterexample, Scenario1D};
pub use r2::build_countable_r2_two_stage;
pub use recursive::{build_recursive_r1, build_recursive_r1_without_unsquish, recursive_c, RecursiveGeometry};
pub use snowflake::{build_snowflake, snowflake_deviations};
mod recursive;
mod snowflake;
mod trefoil;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::MoveSequence;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, PLCurve, Point3};
use crate::isotopy::Schedule;

pub use r1::build_countable_r1;
pub use trefoil::build_trefoil_chain;

/// What the engine should conclude about a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    /// `None` when the hypotheses hold, else the first failing condition.
    pub failing_condition: Option<u8>,
    pub injective: bool,
}

impl Expected {
    pub const PASS: Expected = Expected { failing_condition: None, injective: true };
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.failing_condition {
            None => f.write_str("hypotheses pass")?,
            Some(c) => write!(f, "hypotheses fail condition {c}")?,
        }
        write!(f, ", injectivity {}", if self.injective { "pass" } else { "fail" })
    }
}

type CurveFn = Arc<dyn Fn(usize) -> Result<PLCurve> + Send + Sync>;

/// Sample points used by the probes.
#[derive(Clone, Debug, Default)]
pub struct ProbePoints {
    pub grid: Vec<Point3>,
    pub pairs: Vec<(Point3, Point3)>,
    pub census: Vec<Point3>,
}

#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub moves: MoveSequence,
    pub schedule: Schedule,
    pub expected: Expected,
    pub declared_decay_ratio: Option<f64>,
    /// Point where the supports accumulate, if there is one.
    pub limit_point: Option<Point3>,
    curve: CurveFn,
    probes: Arc<dyn Fn(u64) -> ProbePoints + Send + Sync>,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("expected", &self.expected)
            .field("declared_decay_ratio", &self.declared_decay_ratio)
            .finish_non_exhaustive()
    }
}

impl Scenario {
    pub(crate) fn new(
        name: impl Into<String>,
        moves: MoveSequence,
        expected: Expected,
        limit_point: Option<Point3>,
        curve: impl Fn(usize) -> Result<PLCurve> + Send + Sync + 'static,
        probes: impl Fn(u64) -> ProbePoints + Send + Sync + 'static,
    ) -> Self {
        Scenario {
            name: name.into(),
            declared_decay_ratio: moves.declared_decay_ratio(),
            moves,
            schedule: Schedule::Dyadic,
            expected,
            limit_point,
            curve: Arc::new(curve),
            probes: Arc::new(probes),
        }
    }

    /// Starting curve carrying the first `depth` features.
    pub fn initial_curve(&self, depth: usize) -> Result<PLCurve> {
        (self.curve)(depth)
    }

    /// Probe samples; deterministic in `seed`.
    pub fn probe_points(&self, seed: u64) -> ProbePoints {
        (self.probes)(seed)
    }
}

/// Registered scenario names, in report order.
pub const SCENARIO_NAMES: &[&str] = &[
    "countable_r1",
    "countable_r2_stage1",
    "countable_r2_stage2",
    "recursive_r1",
    "trefoil_chain",
    "trefoil_chain_extended",
    "fox_remarkable",
];

/// Build a registered scenario by name. The one-dimensional example and
/// the snowflake are not move sequences in 3-space and have their own
/// builders.
pub fn scenario_by_name(name: &str) -> Result<Scenario> {
    match name {
        "countable_r1" => Ok(build_countable_r1()),
        "countable_r2_stage1" => Ok(build_countable_r2_two_stage().0),
        "countable_r2_stage2" => Ok(build_countable_r2_two_stage().1),
        "fox_remarkable" => Ok(build_fox_remarkable()),
        "recursive_r1" => Ok(build_recursive_r1()),
        "1d_counterexample" => Ok(build_1d_counterexample().as_scenario()),
        "trefoil_chain" => Ok(build_trefoil_chain(false)),
        "trefoil_chain_extended" => Ok(build_trefoil_chain(true)),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

/// `count` uniform points in `b`.
pub(crate) fn uniform_points(rng: &mut ChaCha8Rng, b: &Aabb, count: usize) -> Vec<Point3> {
    (0..count)
        .map(|_| {
            Point3::new(
                rng.gen_range(b.min.x..=b.max.x),
                rng.gen_range(b.min.y..=b.max.y),
                rng.gen_range(b.min.z..=b.max.z),
            )
        })
        .collect()
}

/// Default probe layout: a uniform grid over the container, plus nearby
/// pairs and census samples drawn from the first supports.
pub(crate) fn default_probes(moves: &MoveSequence, seed: u64, supports: usize) -> ProbePoints {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let container = moves.container();
    let grid = uniform_points(&mut rng, &container.inflate(-1e-9 * container.diameter()), 1000);
    let mut pairs = Vec::new();
    let mut census = Vec::new();
    for v in moves.supports_up_to(1, supports) {
        let pts = uniform_points(&mut rng, &v, 24);
        let step = 1e-2 * v.diameter();
        for &a in &pts {
            let d = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            pairs.push((a, a + d * (step / d.norm().max(1e-3))));
        }
        census.extend(pts);
    }
    ProbePoints { grid, pairs, census }
}

/// Open strand vertices mapped by `x ↦ origin + scale·x`.
pub(crate) fn place(points: &[Point3], scale: f64, origin: Point3) -> impl Iterator<Item = Point3> + '_ {
    points.iter().map(move |&q| origin + q * scale)
}

//! Time-parameterised families of local maps, and the time grids used to
//! glue countably many of them together.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::maps::{AxisPower, ConeMap, LocalMap, Support, UnsquishMap, UnsquishParams};

/// One elementary motion, parameterised by local time τ ∈ [0, 1] with the
/// identity at τ = 0.
#[derive(Clone, Debug, PartialEq)]
pub enum PathStage {
    /// Apex slides linearly from source to target.
    Cone(ConeMap),
    Unsquish(UnsquishParams),
    /// The unsquish run in reverse: contracts the inner box towards the tip.
    Squish(UnsquishParams),
    /// Exponent interpolates linearly from 1.
    AxisPower(AxisPower),
}

impl PathStage {
    pub fn at(&self, tau: f64) -> LocalMap {
        match self {
            PathStage::Cone(c) => LocalMap::Cone(c.partial(tau)),
            PathStage::Unsquish(p) => LocalMap::Unsquish(UnsquishMap { params: *p, t: tau, inverted: false }),
            PathStage::Squish(p) => LocalMap::Unsquish(UnsquishMap { params: *p, t: tau, inverted: true }),
            PathStage::AxisPower(a) => LocalMap::AxisPower(AxisPower { exponent: 1.0 + tau * (a.exponent - 1.0) }),
        }
    }

    pub fn support(&self) -> Support {
        self.at(1.0).support()
    }

    pub fn conjugate_similarity(&self, scale: f64, origin: Point3) -> PathStage {
        match self.at(1.0).conjugate_similarity(scale, origin) {
            LocalMap::Cone(c) => PathStage::Cone(c),
            LocalMap::Unsquish(u) if u.inverted => PathStage::Squish(u.params),
            LocalMap::Unsquish(u) => PathStage::Unsquish(u.params),
            LocalMap::AxisPower(a) => PathStage::AxisPower(a),
            _ => unreachable!("stage kinds are closed under similarity"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Piece {
    start: f64,
    end: f64,
    stage: PathStage,
}

/// Piecewise isotopy: stage `j` runs over its own time window, earlier
/// stages are complete, later ones have not started. Constant after the
/// last window ends.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Isotopy {
    pieces: Vec<Piece>,
}

impl Isotopy {
    pub fn identity() -> Self {
        Isotopy::default()
    }

    /// Stages glued uniformly over [0, 1].
    pub fn from_stages(stages: Vec<PathStage>) -> Self {
        let m = stages.len() as f64;
        let pieces = stages
            .into_iter()
            .enumerate()
            .map(|(j, stage)| Piece { start: j as f64 / m, end: (j + 1) as f64 / m, stage })
            .collect();
        Isotopy { pieces }
    }

    pub fn stage_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn stages(&self) -> impl Iterator<Item = &PathStage> {
        self.pieces.iter().map(|p| &p.stage)
    }

    pub fn support(&self) -> Support {
        self.pieces.iter().fold(Support::Empty, |s, p| s.union(p.stage.support()))
    }

    /// Time at which the isotopy stops moving.
    pub fn end_time(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.end)
    }

    /// Breakpoints between consecutive stages.
    pub fn seams(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.end).collect()
    }

    /// Map at time `t`. A stage whose window starts at `t` contributes its
    /// own time-zero map.
    pub fn map_at(&self, t: f64) -> Result<LocalMap> {
        self.map_sided(t, false)
    }

    /// Limit of the map as time increases to `t`: the stage whose window
    /// ends at `t` contributes its own time-one map, and nothing later does.
    pub fn map_from_left(&self, t: f64) -> Result<LocalMap> {
        self.map_sided(t, true)
    }

    fn map_sided(&self, t: f64, left: bool) -> Result<LocalMap> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidTime(t));
        }
        let mut parts = Vec::new();
        for piece in &self.pieces {
            let (done, started) =
                if left { (t > piece.end, t > piece.start) } else { (t >= piece.end, t >= piece.start) };
            if done {
                parts.push(piece.stage.at(1.0));
            } else if started {
                parts.push(piece.stage.at((t - piece.start) / (piece.end - piece.start)));
            } else {
                break;
            }
        }
        Ok(LocalMap::Composite(parts))
    }

    /// The time-one map.
    pub fn end_map(&self) -> LocalMap {
        self.map_at(1.0).expect("t = 1 is valid")
    }

    pub fn eval(&self, t: f64, p: Point3) -> Result<Point3> {
        Ok(self.map_at(t)?.eval(p))
    }

    pub fn eval_inverse(&self, t: f64, p: Point3) -> Result<Point3> {
        Ok(self.map_at(t)?.eval_inverse(p))
    }

    /// Run `self` over the window `[a, b]` instead of `[0, 1]`.
    pub fn compressed(&self, a: f64, b: f64) -> Isotopy {
        let w = b - a;
        Isotopy {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece { start: a + w * p.start, end: a + w * p.end, stage: p.stage.clone() })
                .collect(),
        }
    }

    /// `self` followed by `other`, both already placed in disjoint windows.
    pub fn then(mut self, other: Isotopy) -> Isotopy {
        debug_assert!(other.pieces.first().is_none_or(|p| p.start >= self.end_time() - 1e-15));
        self.pieces.extend(other.pieces);
        self
    }

    pub fn conjugate_similarity(&self, scale: f64, origin: Point3) -> Isotopy {
        Isotopy {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece { start: p.start, end: p.end, stage: p.stage.conjugate_similarity(scale, origin) })
                .collect(),
        }
    }
}

/// Strictly increasing times `t_k` in (0, 1) with limit 1, `t_0 = 0`.
#[derive(Clone, Default)]
pub enum Schedule {
    /// `t_k = 1 − 2^{−k}`.
    #[default]
    Dyadic,
    /// `t_k = 1 − r^k`.
    Geometric(f64),
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Dyadic => write!(f, "Dyadic"),
            Schedule::Geometric(r) => write!(f, "Geometric({r})"),
            Schedule::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Largest stage index searched when locating a time.
const MAX_STAGE_SEARCH: usize = 1 << 22;

impl Schedule {
    pub fn geometric(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidSchedule(format!("ratio {r} outside (0, 1)")));
        }
        Ok(Schedule::Geometric(r))
    }

    pub fn custom(f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        Schedule::Custom(Arc::new(f))
    }

    pub fn t(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match self {
            Schedule::Dyadic => 1.0 - 0.5f64.powi(k as i32),
            Schedule::Geometric(r) => 1.0 - r.powi(k as i32),
            Schedule::Custom(f) => f(k),
        }
    }

    /// Check strict monotonicity and `t_k ∈ (0, 1)` for `k = 1..=horizon`.
    pub fn validate(&self, horizon: usize) -> Result<()> {
        let mut prev = 0.0;
        for k in 1..=horizon {
            let t = self.t(k);
            if !(t > prev && t < 1.0) {
                return Err(Error::InvalidSchedule(format!("t_{k} = {t} after t_{} = {prev}", k - 1)));
            }
            prev = t;
        }
        Ok(())
    }

    /// Stage `k ≥ 1` with `t ∈ [t_{k−1}, t_k)`. Requires `0 ≤ t < 1`.
    pub fn locate(&self, t: f64) -> Result<usize> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::InvalidTime(t));
        }
        let mut k = match self {
            Schedule::Dyadic => (-(1.0 - t).log2()).floor() as usize + 1,
            Schedule::Geometric(r) => ((1.0 - t).ln() / r.ln()).floor().max(0.0) as usize + 1,
            Schedule::Custom(_) => 1,
        };
        // correct for rounding in the closed forms, then scan
        while k > 1 && t < self.t(k - 1) {
            k -= 1;
        }
        while t >= self.t(k) {
            k += 1;
            if k > MAX_STAGE_SEARCH {
                return Err(Error::InvalidSchedule(format!("time {t} not reached within {MAX_STAGE_SEARCH} stages")));
            }
        }
        Ok(k)
    }
}

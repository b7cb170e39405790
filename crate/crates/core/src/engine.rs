//! Countable move sequences: truncated composites, the glued limit
//! isotopy, the support hypotheses, and the numerical probes for uniform
//! convergence, injectivity and infinitely-moved points.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::{distance, Aabb, Point3};
use crate::isotopy::{Isotopy, Schedule};
use crate::maps::{LocalMap, Support};

/// One stage `(H_k, V_k)`.
#[derive(Clone, Debug)]
pub struct Move {
    pub isotopy: Isotopy,
    pub support: Aabb,
}

impl Move {
    /// Fails unless every stage of `isotopy` is supported inside `support`.
    pub fn new(isotopy: Isotopy, support: Aabb) -> Result<Self> {
        match isotopy.support() {
            Support::Empty => {}
            Support::Bounded(b) if support.contains_box(&b) => {}
            other => {
                return Err(Error::InvalidMap(format!("isotopy support {other:?} escapes declared support {support}")));
            }
        }
        Ok(Move { isotopy, support })
    }

    pub fn end_map(&self) -> LocalMap {
        self.isotopy.end_map()
    }
}

type Generator = Arc<dyn Fn(usize) -> Option<Move> + Send + Sync>;

/// Re-playable generator of stages `k = 1, 2, …` together with a compact
/// container `A` and, optionally, the analytic decay ratio of the tail
/// diameters that the construction guarantees.
#[derive(Clone)]
pub struct MoveSequence {
    generator: Generator,
    container: Aabb,
    declared_decay_ratio: Option<f64>,
}

impl fmt::Debug for MoveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MoveSequence")
            .field("container", &self.container)
            .field("declared_decay_ratio", &self.declared_decay_ratio)
            .finish_non_exhaustive()
    }
}

impl MoveSequence {
    pub fn new(container: Aabb, generator: impl Fn(usize) -> Option<Move> + Send + Sync + 'static) -> Self {
        MoveSequence { generator: Arc::new(generator), container, declared_decay_ratio: None }
    }

    pub fn with_decay_ratio(mut self, r: f64) -> Self {
        self.declared_decay_ratio = Some(r);
        self
    }

    pub fn container(&self) -> Aabb {
        self.container
    }

    pub fn declared_decay_ratio(&self) -> Option<f64> {
        self.declared_decay_ratio
    }

    /// Stage `k ≥ 1`.
    pub fn stage(&self, k: usize) -> Result<Move> {
        assert!(k >= 1, "stages are numbered from 1");
        (self.generator)(k).ok_or(Error::GeneratorExhausted(k))
    }

    /// Stages `from..=to`, in order.
    pub fn stages(&self, from: usize, to: usize) -> Result<Vec<Move>> {
        (from..=to).map(|k| self.stage(k)).collect()
    }

    /// Supports `V_from..=V_to`, stopping early if the generator runs out.
    pub fn supports_up_to(&self, from: usize, to: usize) -> Vec<Aabb> {
        (from..=to).map_while(|k| (self.generator)(k).map(|m| m.support)).collect()
    }

    fn end_maps(&self, from: usize, to: usize) -> Result<Vec<LocalMap>> {
        Ok(self.stages(from, to)?.iter().map(Move::end_map).collect())
    }
}

/// `out[i] = diam(boxes[i] ∪ boxes[i+1] ∪ …)`.
pub fn tail_diameters(boxes: &[Aabb]) -> Vec<f64> {
    let mut out = vec![0.0; boxes.len()];
    let mut running = 0.0_f64;
    for i in (0..boxes.len()).rev() {
        let d = boxes[i..].iter().map(|b| boxes[i].max_distance(b)).fold(0.0, f64::max);
        running = running.max(d);
        out[i] = running;
    }
    out
}

/// Composite `h_n ∘ … ∘ h_1` of the first `n` time-one maps.
pub fn truncated_map(seq: &MoveSequence, n: usize) -> Result<LocalMap> {
    if n == 0 {
        return Ok(LocalMap::identity());
    }
    Ok(LocalMap::Composite(seq.end_maps(1, n)?))
}

/// n-stage time-compressed gluing: stage `k` runs over `[t_{k−1}, t_k]`,
/// frozen after `t_n`.
pub fn glue_schedule(seq: &MoveSequence, sched: &Schedule, n: usize) -> Result<Isotopy> {
    if n == 0 {
        return Err(Error::InvalidArgument("glue_schedule needs n ≥ 1".into()));
    }
    sched.validate(n)?;
    let mut glued = Isotopy::identity();
    for k in 1..=n {
        glued = glued.then(seq.stage(k)?.isotopy.compressed(sched.t(k - 1), sched.t(k)));
    }
    Ok(glued)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitStatus {
    /// `t < 1`: finitely many stages, evaluated exactly.
    Exact,
    /// The orbit left every later support (checked up to the budget).
    Settled,
    /// The orbit is trapped in a tail union of diameter below `tol`.
    TolConverged,
    BudgetExhausted,
}

impl fmt::Display for LimitStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LimitStatus::Exact => "exact",
            LimitStatus::Settled => "settled",
            LimitStatus::TolConverged => "tol-converged",
            LimitStatus::BudgetExhausted => "budget-exhausted",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitValue {
    pub point: Point3,
    pub status: LimitStatus,
    /// Number of stages applied.
    pub steps: usize,
}

/// Evaluate the glued limit isotopy at `(t, p)`.
///
/// For `t < 1` this is `H_k((t − t_{k−1}) / (t_k − t_{k−1}), h_{k−1}(p))`.
/// At `t = 1` the composites are followed until the orbit settles, is
/// trapped in a tail union of diameter below `tol`, or `k_budget` stages
/// have been used.
pub fn eval_limit_isotopy(
    seq: &MoveSequence,
    sched: &Schedule,
    t: f64,
    p: Point3,
    tol: f64,
    k_budget: usize,
) -> Result<LimitValue> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidTime(t));
    }
    if t < 1.0 {
        let k = sched.locate(t)?;
        let (t0, t1) = (sched.t(k - 1), sched.t(k));
        let prefix = truncated_map(seq, k - 1)?;
        let stage = seq.stage(k)?;
        let point = stage.isotopy.eval((t - t0) / (t1 - t0), prefix.eval(p))?;
        return Ok(LimitValue { point, status: LimitStatus::Exact, steps: k });
    }

    let supports = seq.supports_up_to(1, k_budget);
    let tails = tail_diameters(&supports);
    let mut y = p;
    for n in 0..supports.len() {
        // y = ℳh_n(p); the remaining tail is V_{n+1}, V_{n+2}, …
        let tail = &supports[n..];
        if !tail.iter().any(|b| b.contains(y)) {
            return Ok(LimitValue { point: y, status: LimitStatus::Settled, steps: n });
        }
        if tails[n] < tol {
            return Ok(LimitValue { point: y, status: LimitStatus::TolConverged, steps: n });
        }
        y = seq.stage(n + 1)?.end_map().eval(y);
    }
    Ok(LimitValue { point: y, status: LimitStatus::BudgetExhausted, steps: supports.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail { condition: u8, reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn failed_condition(&self) -> Option<u8> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail { condition, .. } => Some(*condition),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Fail { condition, reason } => write!(f, "fail(condition {condition}: {reason})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// `(n, diam(V_n ∪ … ∪ V_horizon))` for `n = 1..=horizon`.
    pub tail_diameters: Vec<(usize, f64)>,
    pub containment_ok: bool,
    pub disjoint_supports: bool,
    /// Ratios of consecutive tail diameters.
    pub empirical_decay: Vec<f64>,
    pub declared_decay_ratio: Option<f64>,
    pub threshold: f64,
    pub verdict: Verdict,
}

/// Check the shrinking-support and compact-containment conditions up to
/// `horizon`, and whether the support boxes are pairwise disjoint.
pub fn check_hypotheses(seq: &MoveSequence, horizon: usize, threshold: f64) -> Result<HypothesisReport> {
    if horizon < 2 {
        return Err(Error::InvalidArgument(format!("horizon must be at least 2, got {horizon}")));
    }
    let boxes: Vec<Aabb> = seq.stages(1, horizon)?.into_iter().map(|m| m.support).collect();
    let tails = tail_diameters(&boxes);
    let container = seq.container();
    let containment_ok = boxes.iter().all(|b| container.contains_box_interior(b));
    let disjoint_supports = boxes.iter().enumerate().all(|(i, a)| boxes[i + 1..].iter().all(|b| !a.intersects(b)));
    let empirical_decay = tails.windows(2).map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 }).collect();

    let last = tails[horizon - 1];
    let verdict = if !(last < threshold) {
        Verdict::Fail {
            condition: 1,
            reason: format!("tail diameter at n = {horizon} is {last:.6e} ≥ {threshold:.6e}"),
        }
    } else if !containment_ok {
        Verdict::Fail { condition: 2, reason: format!("some support is not inside the interior of {container}") }
    } else {
        Verdict::Pass
    };
    Ok(HypothesisReport {
        tail_diameters: tails.iter().enumerate().map(|(i, &d)| (i + 1, d)).collect(),
        containment_ok,
        disjoint_supports,
        empirical_decay,
        declared_decay_ratio: seq.declared_decay_ratio(),
        threshold,
        verdict,
    })
}

/// `max_y d(ℳh_n(y), ℳh_m(y))` over the grid.
pub fn uniform_convergence_probe(seq: &MoveSequence, n: usize, m: usize, grid: &[Point3]) -> Result<f64> {
    uniform_convergence_probe_with(Execution::default(), seq, n, m, grid)
}

pub fn uniform_convergence_probe_with(
    exec: Execution,
    seq: &MoveSequence,
    n: usize,
    m: usize,
    grid: &[Point3],
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty probe grid".into()));
    }
    if m < n {
        return Err(Error::InvalidArgument(format!("need m ≥ n, got n = {n}, m = {m}")));
    }
    let head = truncated_map(seq, n)?;
    let tail = if m > n { LocalMap::Composite(seq.end_maps(n + 1, m)?) } else { LocalMap::identity() };
    Ok(exec::max_by(exec, grid, |&y| {
        let yn = head.eval(y);
        distance(yn, tail.eval(yn))
    }))
}

/// `min d(ℳh_n(a), ℳh_n(b))` over the pairs.
pub fn injectivity_probe(seq: &MoveSequence, n: usize, pairs: &[(Point3, Point3)]) -> Result<f64> {
    injectivity_probe_with(Execution::default(), seq, n, pairs)
}

pub fn injectivity_probe_with(
    exec: Execution,
    seq: &MoveSequence,
    n: usize,
    pairs: &[(Point3, Point3)],
) -> Result<f64> {
    if let Some((a, _)) = pairs.iter().find(|(a, b)| a == b) {
        return Err(Error::InvalidArgument(format!("probe pair repeats the point {a}")));
    }
    let h = truncated_map(seq, n)?;
    Ok(exec::min_by(exec, pairs, |&(a, b)| distance(h.eval(a), h.eval(b))))
}

/// Number of later supports inspected by [`infinite_motion_census`].
pub const CENSUS_LOOKAHEAD: usize = 16;

/// How many samples still sit in a later support after `n_max` stages,
/// i.e. would be moved again.
pub fn infinite_motion_census(seq: &MoveSequence, n_max: usize, samples: &[Point3]) -> Result<usize> {
    infinite_motion_census_with(Execution::default(), seq, n_max, samples)
}

pub fn infinite_motion_census_with(
    exec: Execution,
    seq: &MoveSequence,
    n_max: usize,
    samples: &[Point3],
) -> Result<usize> {
    let h = truncated_map(seq, n_max)?;
    let later = seq.supports_up_to(n_max + 1, n_max + CENSUS_LOOKAHEAD);
    let flags = exec::map(exec, samples, |&y| {
        let img = h.eval(y);
        later.iter().any(|b| b.contains(img))
    });
    Ok(flags.into_iter().filter(|&f| f).count())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub sup_deviation: f64,
    pub min_image_separation: f64,
    pub unsettled_points: usize,
    pub budget_exhausted: bool,
}

//! Running a scenario end to end and writing the result as a report.
//!
//! A report holds the hypothesis check, the four numerical probes and,
//! when the supports form a nested family around the scenario's limit
//! point, the ball-factoring certificate. It renders both as `key = value`
//! lines and as JSON. Both renderings are deterministic in the run
//! configuration.

use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::{
    check_hypotheses, eval_limit_isotopy, infinite_motion_census, injectivity_probe, uniform_convergence_probe,
    HypothesisReport, LimitStatus, ProbeReport,
};
use crate::error::{Error, Result};
use crate::fox_artin::{find_ball_factoring, BallFactoring, NestedFamily};
use crate::geometry::distance;
use crate::scenarios::{Expected, Scenario};

/// Pairs whose images come closer than this fraction of their starting
/// separation count as evidence that the limit is not injective.
pub const INJECTIVITY_RATIO: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: String,
    pub depth: usize,
    pub horizon: usize,
    pub tol: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(scenario: impl Into<String>) -> Self {
        RunConfig { scenario: scenario.into(), depth: 20, horizon: 20, tol: 1e-6, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < 1 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        if self.horizon < 2 {
            return Err(Error::InvalidArgument(format!("horizon must be at least 2, got {}", self.horizon)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    /// `<scenario>_<depth>_<seed>.report`
    pub fn report_name(&self) -> String {
        format!("{}_{}_{}.report", self.scenario, self.depth, self.seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub config: RunConfig,
    pub hypotheses: HypothesisReport,
    pub probes: ProbeReport,
    /// Stages used by the uniform-convergence probe.
    pub deviation_stages: (usize, usize),
    /// Smallest ratio of image separation to starting separation.
    pub min_separation_ratio: f64,
    pub injective: bool,
    pub ball_factoring: Option<BallFactoring>,
    pub expected: Expected,
}

impl ScenarioReport {
    pub fn computed(&self) -> Expected {
        Expected { failing_condition: self.hypotheses.verdict.failed_condition(), injective: self.injective }
    }

    pub fn matches_expected(&self) -> bool {
        self.computed() == self.expected
    }

    /// `hypotheses/injectivity`, e.g. `pass/pass` or `fail(1)/pass`.
    pub fn verdict(&self) -> String {
        verdict_string(self.computed())
    }

    pub fn to_text(&self) -> String {
        let h = &self.hypotheses;
        let p = &self.probes;
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("scenario", self.config.scenario.clone());
        line("depth", self.config.depth.to_string());
        line("horizon", self.config.horizon.to_string());
        line("tol", self.config.tol.to_string());
        line("seed", self.config.seed.to_string());
        let tails: Vec<String> = h.tail_diameters.iter().map(|(n, d)| format!("{n}:{d}")).collect();
        line("tail_diameters", tails.join(","));
        line("declared_decay_ratio", h.declared_decay_ratio.map_or_else(|| "none".into(), |r| r.to_string()));
        line("containment_ok", h.containment_ok.to_string());
        line("disjoint_supports", h.disjoint_supports.to_string());
        line("hypotheses", h.verdict.to_string());
        line("verdict", self.verdict());
        line("expected", verdict_string(self.expected));
        line("matches_expected", self.matches_expected().to_string());
        line("sup_deviation", p.sup_deviation.to_string());
        line("deviation_stages", format!("{},{}", self.deviation_stages.0, self.deviation_stages.1));
        line("min_image_separation", p.min_image_separation.to_string());
        line("min_separation_ratio", self.min_separation_ratio.to_string());
        line("unsettled_points", p.unsettled_points.to_string());
        line("budget_exhausted", p.budget_exhausted.to_string());
        line(
            "ball_factoring",
            self.ball_factoring
                .as_ref()
                .map_or_else(|| "none".into(), |b| format!("epsilon={},n0={}", b.epsilon, b.n0)),
        );
        s
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            scenario: &'a str,
            depth: usize,
            horizon: usize,
            tol: f64,
            seed: u64,
            tail_diameters: Vec<f64>,
            containment_ok: bool,
            disjoint_supports: bool,
            verdict: String,
            expected: String,
            sup_deviation: f64,
            min_image_separation: f64,
            unsettled_points: usize,
            budget_exhausted: bool,
            ball_factoring: Option<&'a BallFactoring>,
        }
        let out = Out {
            scenario: &self.config.scenario,
            depth: self.config.depth,
            horizon: self.config.horizon,
            tol: self.config.tol,
            seed: self.config.seed,
            tail_diameters: self.hypotheses.tail_diameters.iter().map(|&(_, d)| d).collect(),
            containment_ok: self.hypotheses.containment_ok,
            disjoint_supports: self.hypotheses.disjoint_supports,
            verdict: self.verdict(),
            expected: verdict_string(self.expected),
            sup_deviation: self.probes.sup_deviation,
            min_image_separation: self.probes.min_image_separation,
            unsettled_points: self.probes.unsettled_points,
            budget_exhausted: self.probes.budget_exhausted,
            ball_factoring: self.ball_factoring.as_ref(),
        };
        let mut s = serde_json::to_string_pretty(&out).expect("report fields serialize");
        s.push('\n');
        s
    }
}

fn verdict_string(e: Expected) -> String {
    let hyp = e.failing_condition.map_or_else(|| "pass".to_string(), |c| format!("fail({c})"));
    format!("{hyp}/{}", if e.injective { "pass" } else { "fail" })
}

/// Supports `V_1..V_horizon` as a nested family around the limit point,
/// if they are one.
fn nested_supports(s: &Scenario, horizon: usize) -> Option<NestedFamily> {
    let p = s.limit_point?;
    let boxes = s.moves.supports_up_to(1, horizon);
    NestedFamily::new(p, boxes).ok()
}

pub fn run_scenario(s: &Scenario, cfg: &RunConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let hypotheses = check_hypotheses(&s.moves, cfg.horizon, 1e-3)?;
    let pts = s.probe_points(cfg.seed);
    let (n, m) = (cfg.horizon / 2, cfg.horizon);
    let sup_deviation = uniform_convergence_probe(&s.moves, n, m, &pts.grid)?;
    let min_image_separation = injectivity_probe(&s.moves, cfg.horizon, &pts.pairs)?;
    let min_separation_ratio = separation_ratio(s, cfg.horizon, &pts.pairs)?;
    let unsettled_points = infinite_motion_census(&s.moves, cfg.horizon, &pts.census)?;
    let mut budget_exhausted = false;
    for &y in &pts.census {
        let v = eval_limit_isotopy(&s.moves, &s.schedule, 1.0, y, cfg.tol, cfg.horizon)?;
        if v.status == LimitStatus::BudgetExhausted {
            budget_exhausted = true;
            break;
        }
    }
    let ball_factoring = nested_supports(s, cfg.horizon).and_then(|f| find_ball_factoring(&f, cfg.horizon).ok());
    Ok(ScenarioReport {
        config: cfg.clone(),
        hypotheses,
        probes: ProbeReport { sup_deviation, min_image_separation, unsettled_points, budget_exhausted },
        deviation_stages: (n, m),
        min_separation_ratio,
        injective: min_separation_ratio >= INJECTIVITY_RATIO,
        ball_factoring,
        expected: s.expected,
    })
}

fn separation_ratio(s: &Scenario, n: usize, pairs: &[(crate::Point3, crate::Point3)]) -> Result<f64> {
    let h = crate::engine::truncated_map(&s.moves, n)?;
    let ratios: Vec<f64> = pairs.iter().map(|&(a, b)| distance(h.eval(a), h.eval(b)) / distance(a, b)).collect();
    Ok(ratios.into_iter().fold(f64::INFINITY, f64::min))
}

//! Compactly supported ambient isotopies of 3-space, glued countably many
//! times under a compressed time schedule, with numerical diagnostics for
//! the limit: shrinking supports, uniform convergence, injectivity and the
//! set of points moved infinitely often.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve_io;
pub mod diagram;
pub mod engine;
pub mod error;
pub mod exec;
pub mod fox_artin;
pub mod geometry;
pub mod isotopy;
pub mod maps;
pub mod report;

pub use engine::{
    check_hypotheses, eval_limit_isotopy, glue_schedule, infinite_motion_census, injectivity_probe, truncated_map,
    uniform_convergence_probe, HypothesisReport, LimitStatus, LimitValue, Move, MoveSequence, ProbeReport, Verdict,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{curve_is_simple, distance, segments_intersect, union_diameter, Aabb, PLCurve, Point3};
pub use isotopy::{Isotopy, PathStage, Schedule};
pub use maps::{compose, estimate_inverse_lipschitz, make_cone_map, LocalMap, UnsquishParams};
pub mod scenarios;

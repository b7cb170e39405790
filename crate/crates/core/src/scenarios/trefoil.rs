//! A connected sum of trefoils accumulating at the origin.
//!
//! Summand `k` lives in the shell between `V_k = s_k·[-4,4]³` and
//! `V_{k+1}`, with `s_k = 2^{-(k+1)}`. Between the top faces of the two
//! boxes it runs once around a wide square loop. The loop encircles the
//! strand that continues into the inner box, which is what ties the knot.
//!
//! Move `k` slides the loop down around the inner box and contracts it
//! underneath, so the summand ends with a crossing-free projection. In the
//! extended variant the curve continues from the origin straight down to
//! `(0, 0, -1)`, so each loop has to slide past the end of that segment and
//! the supports reach down to it.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::engine::{Move, MoveSequence};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, PLCurve, Point3};
use crate::isotopy::{Isotopy, PathStage};
use crate::maps::ConeMap;

use super::planner::Planner;
use super::{default_probes, place, Expected, Scenario};

/// Height of the loop before the move.
const LOOP_Z: f64 = 3.0;
/// Where the free end of the extended curve sits.
const SEGMENT_END: f64 = -1.0;
/// Loop vertices strictly between the two ends of the loop.
const LOOP_INNER: usize = 15;

fn p(x: f64, y: f64, z: f64) -> Point3 {
    Point3::new(x, y, z)
}

fn bx(min: Point3, max: Point3) -> Aabb {
    Aabb::new(min, max).expect("ordered corners")
}

pub(crate) fn scale(k: usize) -> f64 {
    0.5f64.powi(k as i32 + 1)
}

/// `V_k` in absolute coordinates.
pub(crate) fn outer_box(k: usize) -> Aabb {
    bx(p(-4.0, -4.0, -4.0), p(4.0, 4.0, 4.0)).similarity(scale(k), Point3::ORIGIN)
}

/// The summand before its move, in canonical coordinates.
fn summand_arc() -> Vec<Point3> {
    let square = [
        (-3.0, 0.8),
        (-3.0, 2.1),
        (-3.0, 3.0),
        (-2.1, 3.0),
        (0.0, 3.0),
        (2.1, 3.0),
        (3.0, 3.0),
        (3.0, 2.1),
        (3.0, 0.0),
        (3.0, -2.1),
        (3.0, -3.0),
        (2.1, -3.0),
        (0.0, -3.0),
        (-2.1, -3.0),
        (-3.0, -3.0),
        (-3.0, -2.1),
        (-3.0, -0.8),
    ];
    let mut v = vec![p(-1.0, 0.5, 4.0), p(-2.3, 0.0, 3.8)];
    v.extend(square.iter().map(|&(x, y)| p(x, y, LOOP_Z)));
    // the exit strand crosses over the loop and heads for the inner box
    v.extend([p(-3.5, 1.3, 3.3), p(-1.0, 1.2, 3.6), p(1.0, -0.5, 3.5), p(-0.5, 0.25, 2.0)]);
    v
}

/// Depths used below the inner box, canonical.
#[derive(Clone, Copy, Debug)]
struct Floor {
    /// Resting height of the loop's side vertices.
    side: f64,
    /// Corners rest lower, so they can later move with their neighbours on
    /// a face of the pull box.
    corner: f64,
    /// Bottom of every lowering box.
    bottom: f64,
}

impl Floor {
    fn at(side: f64) -> Floor {
        Floor { side, corner: side - 0.4, bottom: side - 0.9 }
    }
}

#[derive(Debug)]
pub(crate) struct Summand {
    /// Start polyline, refined so every intermediate stage is exact.
    pub initial: Vec<Point3>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub untied: Vec<Point3>,
    pub pulls: Vec<ConeMap>,
    /// Lowest point of any pull box, canonical.
    pub support_floor: f64,
}

fn lower_loop(pl: &mut Planner, f: Floor) -> Result<()> {
    let (top, low) = (3.2, f.bottom);
    for (x, y) in [(-3.0, 3.0), (3.0, 3.0), (3.0, -3.0), (-3.0, -3.0)] {
        pl.pull_in(p(x, y, LOOP_Z), p(x, y, f.corner), bx(p(x - 0.9, y - 0.9, low), p(x + 0.9, y + 0.9, top)))?;
    }
    let side = |x: f64, y: f64| p(x, y, f.side);
    pl.pull_in(p(0.0, 3.0, LOOP_Z), side(0.0, 3.0), bx(p(-2.1, 2.1, low), p(2.1, 3.9, top)))?;
    pl.pull_in(p(3.0, 0.0, LOOP_Z), side(3.0, 0.0), bx(p(2.1, -2.1, low), p(3.9, 2.1, top)))?;
    pl.pull_in(p(0.0, -3.0, LOOP_Z), side(0.0, -3.0), bx(p(-2.1, -3.9, low), p(2.1, -2.1, top)))?;
    // the loop's two ends, kept clear of the strands above them
    pl.pull_in(p(-3.0, 0.8, LOOP_Z), side(-3.0, 0.8), bx(p(-3.9, 0.5, low), p(-2.1, 2.1, 3.15)))?;
    pl.pull_in(p(-3.0, -0.8, LOOP_Z), side(-3.0, -0.8), bx(p(-3.9, -2.1, low), p(-2.1, -0.5, 3.15)))?;
    // what is left up top sits between two lowered vertices
    for (x, y, lo, hi) in [
        (2.1, 3.0, (0.0, 2.1), (3.0, 3.9)),
        (-2.1, 3.0, (-3.0, 2.1), (0.0, 3.9)),
        (2.1, -3.0, (0.0, -3.9), (3.0, -2.1)),
        (-2.1, -3.0, (-3.0, -3.9), (0.0, -2.1)),
        (3.0, 2.1, (2.1, 0.0), (3.9, 3.0)),
        (3.0, -2.1, (2.1, -3.0), (3.9, 0.0)),
    ] {
        pl.pull_in(p(x, y, LOOP_Z), side(x, y), bx(p(lo.0, lo.1, low), p(hi.0, hi.1, top)))?;
    }
    pl.pull_in(p(-3.0, 2.1, LOOP_Z), side(-3.0, 2.1), bx(p(-3.4, 0.8, low), p(-2.1, 3.0, 3.15)))?;
    pl.pull_in(p(-3.0, -2.1, LOOP_Z), side(-3.0, -2.1), bx(p(-3.4, -3.0, low), p(-2.1, -0.8, 3.15)))?;
    Ok(())
}

/// Resting places of the contracted loop: an arc under the inner box that
/// threads between the two ends of the summand's own strand.
fn contracted_positions() -> Vec<(f64, f64)> {
    (0..LOOP_INNER)
        .map(|k| {
            let a = (140.0 - 280.0 * (k + 1) as f64 / (LOOP_INNER + 1) as f64).to_radians();
            (-1.8 + a.cos(), a.sin())
        })
        .collect()
}

fn contract_loop(pl: &mut Planner, f: Floor) -> Result<()> {
    // ends inward, alternating, so each box only ever holds its own star
    const ORDER: [usize; LOOP_INNER] = [0, 14, 1, 13, 2, 12, 3, 11, 4, 10, 5, 9, 6, 8, 7];
    let first = pl.vertex_at(p(-3.0, 0.8, f.side))? + 1;
    let mut cur: Vec<Point3> = pl.curve()[first..first + LOOP_INNER].to_vec();
    let target: Vec<Point3> = contracted_positions().iter().zip(&cur).map(|(&(x, y), c)| p(x, y, c.z)).collect();
    loop {
        let mut progressed = false;
        for &k in &ORDER {
            if cur[k] != target[k] && pl.pull_hull(cur[k], target[k], 0.05).is_ok() {
                cur[k] = target[k];
                progressed = true;
            }
        }
        if cur == target {
            return Ok(());
        }
        if !progressed {
            return Err(Error::InvalidGeometry("loop contraction is stuck".into()));
        }
    }
}

fn plan_summand(floor: Floor, segment_end: Option<f64>) -> Result<Summand> {
    let inner = bx(p(-2.0, -2.0, -2.0), p(2.0, 2.0, 2.0));
    let mut obstacles = vec![inner];
    if let Some(end) = segment_end {
        obstacles.push(bx(p(-0.05, -0.05, end - 0.05), p(0.05, 0.05, -2.0)));
    }
    let bounds = bx(p(-4.0, -4.0, (floor.bottom - 0.1).min(-4.0)), p(4.0, 4.0, 4.0));
    let mut pl = Planner::new(summand_arc(), bounds, obstacles);
    lower_loop(&mut pl, floor)?;
    contract_loop(&mut pl, floor)?;
    Ok(Summand {
        initial: pl.initial_vertices(),
        untied: pl.curve().to_vec(),
        pulls: pl.pulls().to_vec(),
        support_floor: floor.bottom,
    })
}

/// The summand shared by every shell of the plain chain.
fn plain_summand() -> Arc<Summand> {
    static CELL: OnceLock<Arc<Summand>> = OnceLock::new();
    CELL.get_or_init(|| Arc::new(plan_summand(Floor::at(-3.0), None).expect("summand plan is valid"))).clone()
}

/// Loop depth of summand `k` in the extended chain, absolute. Deeper for
/// outer summands, so a later loop never reaches an earlier one.
fn extended_side_depth(k: usize) -> f64 {
    SEGMENT_END - 0.1 - 0.5 * 0.5f64.powi(k as i32)
}

fn extended_summand(k: usize) -> Result<Arc<Summand>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Summand>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("cache lock").get(&k) {
        return Ok(s.clone());
    }
    let s = scale(k);
    let planned = Arc::new(plan_summand(Floor::at(extended_side_depth(k) / s), Some(SEGMENT_END / s))?);
    cache.lock().expect("cache lock").insert(k, planned.clone());
    Ok(planned)
}

pub(crate) fn summand(extended: bool, k: usize) -> Result<Arc<Summand>> {
    if extended {
        extended_summand(k)
    } else {
        Ok(plain_summand())
    }
}

fn support(k: usize, sm: &Summand) -> Aabb {
    let v = outer_box(k);
    let floor = (sm.support_floor * scale(k)).min(v.min.z);
    bx(p(v.min.x, v.min.y, floor), v.max)
}

fn chain_move(extended: bool, k: usize) -> Result<Move> {
    let sm = summand(extended, k)?;
    let stages: Vec<PathStage> =
        sm.pulls.iter().map(|&c| PathStage::Cone(c).conjugate_similarity(scale(k), Point3::ORIGIN)).collect();
    Move::new(Isotopy::from_stages(stages), support(k, &sm))
}

fn chain_curve(extended: bool, depth: usize) -> Result<PLCurve> {
    let lead = outer_box(1).max.z + 0.4;
    let entry = summand_arc()[0] * scale(1);
    let mut v = vec![p(entry.x, entry.y, lead)];
    for k in 1..=depth {
        let sm = summand(extended, k)?;
        let skip = usize::from(k > 1);
        v.extend(place(&sm.initial[skip..], scale(k), Point3::ORIGIN));
    }
    v.push(Point3::ORIGIN);
    if extended {
        v.push(p(0.0, 0.0, SEGMENT_END));
    }
    PLCurve::open(v)
}

pub fn build_trefoil_chain(extended: bool) -> Scenario {
    let (name, container, expected) = if extended {
        (
            "trefoil_chain_extended",
            bx(p(-1.5, -1.5, -1.8), p(1.5, 1.5, 1.5)),
            Expected { failing_condition: Some(1), injective: true },
        )
    } else {
        ("trefoil_chain", bx(p(-1.5, -1.5, -1.5), p(1.5, 1.5, 1.5)), Expected::PASS)
    };
    let mut moves = MoveSequence::new(container, move |k| chain_move(extended, k).ok());
    if !extended {
        moves = moves.with_decay_ratio(0.5);
    }
    let probe_moves = moves.clone();
    Scenario::new(
        name,
        moves,
        expected,
        Some(Point3::ORIGIN),
        move |d| chain_curve(extended, d),
        move |seed| default_probes(&probe_moves, seed, 8),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{crossing_count, crossings};
    use crate::engine::{check_hypotheses, truncated_map};
    use crate::geometry::{curve_is_simple, distance};

    /// Number of 3-colourings of a closed knot diagram: 9 for a trefoil,
    /// 3 for the unknot.
    fn tricolourings(curve: &PLCurve) -> usize {
        let cs = crossings(curve);
        let m = cs.len();
        if m == 0 {
            return 3;
        }
        let key = |seg: usize, t: f64| seg as f64 + t;
        let mut unders: Vec<(f64, usize)> =
            cs.iter().enumerate().map(|(i, c)| (key(c.under, c.under_param), i)).collect();
        unders.sort_by(|a, b| a.0.total_cmp(&b.0));
        let arc_at = |pos: f64| unders.iter().filter(|u| u.0 < pos).count() % m;
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for (j, &(_, ci)) in unders.iter().enumerate() {
            let c = &cs[ci];
            let mut row = vec![0i64; m];
            row[arc_at(key(c.over, c.over_param))] += 2;
            row[j % m] -= 1;
            row[(j + 1) % m] -= 1;
            rows.push(row.into_iter().map(|x| x.rem_euclid(3)).collect());
        }
        let mut rank = 0;
        for col in 0..m {
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
            rows.swap(rank, piv);
            let inv = if rows[rank][col] == 1 { 1 } else { 2 };
            rows[rank] = rows[rank].iter().map(|x| x * inv % 3).collect();
            for r in 0..rows.len() {
                if r != rank && rows[r][col] != 0 {
                    let f = rows[r][col];
                    rows[r] = rows[r].iter().zip(&rows[rank]).map(|(a, b)| (a - f * b).rem_euclid(3)).collect();
                }
            }
            rank += 1;
        }
        3usize.pow((m - rank) as u32)
    }

    /// Close a canonical summand by a path through the inner box and far
    /// around underneath and above.
    fn closed(arc: &[Point3]) -> PLCurve {
        let mut v = arc.to_vec();
        v.extend([p(-0.45, 0.3, -10.0), p(-0.4, 20.0, -10.1), p(-0.95, 20.1, 20.0), p(-1.02, 0.55, 20.1)]);
        PLCurve::closed(v).unwrap()
    }

    #[test]
    fn colouring_count_tells_trefoil_from_unknot() {
        let circle: Vec<Point3> =
            (0..24).map(|i| (i as f64).to_radians() * 15.0).map(|t| p(t.cos(), t.sin(), 0.0)).collect();
        assert_eq!(tricolourings(&PLCurve::closed(circle).unwrap()), 3);
        let tref: Vec<Point3> = (0..60)
            .map(|i| std::f64::consts::TAU * i as f64 / 60.0)
            .map(|t| p(t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin()))
            .collect();
        assert_eq!(tricolourings(&PLCurve::closed(tref).unwrap()), 9);
    }

    #[test]
    fn summand_is_a_trefoil_and_its_move_clears_every_crossing() {
        let sm = plain_summand();
        assert_eq!(tricolourings(&closed(&summand_arc())), 9);
        assert_eq!(tricolourings(&closed(&sm.initial)), 9);
        let untied = PLCurve::open(sm.untied.clone()).unwrap();
        assert!(curve_is_simple(&untied, 1e-9));
        assert_eq!(crossing_count(&untied), 0);
        assert_eq!(sm.pulls.len(), 32);
    }

    #[test]
    fn pulls_stay_in_the_shell() {
        let inner = outer_box(2);
        for k in [1, 2] {
            let m = chain_move(false, k).unwrap();
            for st in m.isotopy.stages() {
                let PathStage::Cone(c) = st else { panic!("cone stages only") };
                assert!(outer_box(k).contains_box_interior(&c.region));
                if k == 1 {
                    assert!(!c.region.intersects(&inner));
                }
            }
        }
    }

    fn mapped(extended: bool, depth: usize, moves: usize) -> (PLCurve, PLCurve) {
        let s = build_trefoil_chain(extended);
        let c = s.initial_curve(depth).unwrap();
        let m = truncated_map(&s.moves, moves).unwrap();
        let out = c.map_vertices(|q| m.eval(q)).unwrap();
        // vertexwise images must be the true image: sample edge points
        for w in c.vertices().windows(2) {
            for i in 1..4 {
                let q = m.eval(w[0].lerp(w[1], i as f64 / 4.0));
                let near = out.vertices().windows(2).map(|e| seg_dist(q, e[0], e[1])).fold(f64::INFINITY, f64::min);
                assert!(near < 1e-9, "edge point {q} is {near:.2e} off the image polyline");
            }
        }
        (c, out)
    }

    fn seg_dist(q: Point3, a: Point3, b: Point3) -> f64 {
        let d = b - a;
        let t = ((q - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
        distance(q, a.lerp(b, t))
    }

    fn summand_len(extended: bool, k: usize) -> Result<usize> {
        Ok(summand(extended, k)?.initial.len())
    }

    fn summand_piece(curve: &PLCurve, extended: bool, k: usize) -> PLCurve {
        let mut start = 1;
        for j in 1..k {
            start += summand_len(extended, j).unwrap() - 1;
        }
        let end = start + summand_len(extended, k).unwrap();
        PLCurve::open(curve.vertices()[start..end].to_vec()).unwrap()
    }

    #[test]
    fn truncation_unties_the_first_summands() {
        let (c, out) = mapped(false, 4, 4);
        assert!(curve_is_simple(&c, 1e-9));
        for k in 1..=4 {
            assert_eq!(
                tricolourings(&closed(
                    &summand_piece(&c, false, k).vertices().iter().map(|&q| q * (1.0 / scale(k))).collect::<Vec<_>>()
                )),
                9
            );
            assert_eq!(crossing_count(&summand_piece(&out, false, k)), 0, "summand {k}");
        }
        assert!(curve_is_simple(&out, 1e-9));
    }

    #[test]
    fn extended_chain_unties_past_the_segment_end() {
        let (_, out) = mapped(true, 3, 3);
        for k in 1..=3 {
            assert_eq!(crossing_count(&summand_piece(&out, true, k)), 0, "summand {k}");
        }
        assert!(curve_is_simple(&out, 1e-9));
    }

    #[test]
    fn verdicts() {
        let plain = check_hypotheses(&build_trefoil_chain(false).moves, 20, 1e-3).unwrap();
        assert!(plain.verdict.is_pass(), "{:?}", plain.verdict);
        let ext = check_hypotheses(&build_trefoil_chain(true).moves, 20, 1e-3).unwrap();
        assert_eq!(ext.verdict.failed_condition(), Some(1));
        assert!(ext.tail_diameters.iter().all(|&(_, d)| d >= 1.0));
    }
}

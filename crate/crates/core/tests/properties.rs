use isotopy_core::curve_io::{read_curve, write_curve};
use isotopy_core::engine::eval_limit_isotopy;
use isotopy_core::fox_artin::{ball_in_box, box_in_ball, find_ball_factoring, NestedFamily};
use isotopy_core::maps::{ConeMap, UnsquishMap, UnsquishParams};
use isotopy_core::scenarios::{build_countable_r1, build_recursive_r1, build_trefoil_chain, Scenario};
use isotopy_core::{curve_is_simple, distance, glue_schedule, union_diameter, Aabb, LocalMap, PLCurve, Point3};
use proptest::prelude::*;

fn point(r: f64) -> impl Strategy<Value = Point3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn unit_coords() -> impl Strategy<Value = Point3> {
    (0.05..0.95, 0.05..0.95, 0.05..0.95).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

/// A box with corner `min` and extents in `[0.5, 3]`, with two interior
/// points given in relative coordinates.
fn box_with_points() -> impl Strategy<Value = (Aabb, Point3, Point3)> {
    (point(5.0), (0.5..3.0, 0.5..3.0, 0.5..3.0), unit_coords(), unit_coords()).prop_map(|(min, (a, b, c), s, t)| {
        let ext = Point3::new(a, b, c);
        let rel = |u: Point3| min + u.zip(ext, |f, e| f * e);
        (Aabb::new(min, min + ext).unwrap(), rel(s), rel(t))
    })
}

fn rotation(a: f64, b: f64, c: f64) -> impl Fn(Point3) -> Point3 {
    move |p| {
        let (s, co) = a.sin_cos();
        let p = Point3::new(co * p.x - s * p.y, s * p.x + co * p.y, p.z);
        let (s, co) = b.sin_cos();
        let p = Point3::new(co * p.x + s * p.z, p.y, -s * p.x + co * p.z);
        let (s, co) = c.sin_cos();
        Point3::new(p.x, co * p.y - s * p.z, s * p.y + co * p.z)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nested_union_diameter_is_the_outermost(c in point(3.0), h in 0.1..2.0f64, shrink in prop::collection::vec(0.3..0.95f64, 1..8)) {
        let mut boxes = vec![Aabb::from_center(c, Point3::splat(h))];
        for s in shrink {
            let last = boxes.last().unwrap();
            boxes.push(Aabb::from_center(c, last.half_extents() * s));
        }
        prop_assert_eq!(union_diameter(&boxes).unwrap(), boxes[0].diameter());
    }

    #[test]
    fn union_diameter_grows_with_more_boxes(bs in prop::collection::vec(box_with_points(), 2..6)) {
        let boxes: Vec<Aabb> = bs.iter().map(|b| b.0).collect();
        for n in 1..boxes.len() {
            prop_assert!(union_diameter(&boxes[..n]).unwrap() <= union_diameter(&boxes[..n + 1]).unwrap());
        }
    }

    #[test]
    fn triangle_inequality(a in point(1e3), b in point(1e3), c in point(1e3)) {
        let (ab, bc, ac) = (distance(a, b), distance(b, c), distance(a, c));
        prop_assert!(ac <= (ab + bc) * (1.0 + 1e-12));
    }

    #[test]
    fn simplicity_survives_rigid_motions(
        pts in prop::collection::vec(point(2.0), 4..9),
        (a, b, c) in (0.0..6.3f64, 0.0..6.3f64, 0.0..6.3f64),
        shift in point(10.0),
        closed in any::<bool>(),
    ) {
        let Ok(curve) = PLCurve::new(pts, closed) else { return Ok(()) };
        let rot = rotation(a, b, c);
        let moved = curve.map_vertices(|p| rot(p) + shift).unwrap();
        prop_assert_eq!(curve_is_simple(&curve, 1e-6), curve_is_simple(&moved, 1e-6));
    }

    #[test]
    fn curve_files_round_trip(pts in prop::collection::vec(point(1e4), 2..20), closed in any::<bool>()) {
        let Ok(curve) = PLCurve::new(pts, closed) else { return Ok(()) };
        let back = read_curve(&write_curve(&curve)).unwrap();
        prop_assert_eq!(back.vertices(), curve.vertices());
        prop_assert_eq!(back.is_closed(), curve.is_closed());
    }

    #[test]
    fn cone_maps((region, src, dst) in box_with_points(), p in point(9.0), face in 0..6usize, u in unit_coords()) {
        let m = LocalMap::Cone(ConeMap::new(region, src, dst).unwrap());
        if !region.contains(p) {
            prop_assert_eq!(m.eval(p), p);
        }
        prop_assert!(distance(m.eval_inverse(m.eval(p)), p) < 1e-9);
        let mut q = (region.min + u.zip(region.max - region.min, |f, e| f * e)).to_array();
        q[face % 3] = if face < 3 { region.min[face % 3] } else { region.max[face % 3] };
        let q = Point3::from_array(q);
        prop_assert!(distance(m.eval(q), q) <= 1e-12);
    }

    #[test]
    fn unsquish_maps(
        c in point(2.0),
        (hi, ratio) in (0.3..2.0f64, 1.2..3.0f64),
        tip in unit_coords(),
        f in 0.05..0.95f64,
        t in 0.0..=1.0f64,
        inverted in any::<bool>(),
        p in point(8.0),
    ) {
        let inner = Aabb::from_center(c, Point3::splat(hi));
        let outer = Aabb::from_center(c, Point3::splat(hi * ratio));
        let tip = inner.min + (tip * (2.0 * hi));
        let params = UnsquishParams::new(outer, inner, tip, f).unwrap();
        let m = LocalMap::Unsquish(UnsquishMap { params, t, inverted });
        if !m.support().contains(p) {
            prop_assert_eq!(m.eval(p), p);
        }
        prop_assert!(distance(m.eval_inverse(m.eval(p)), p) < 1e-9);
    }

    #[test]
    fn ball_factoring_is_certified(p in point(3.0), side in 0.5..4.0f64, ratio in 0.2..0.8f64, off in unit_coords(), grow in 1.0..3.0f64) {
        // V_1 is off-centre around p; later regions are centred cubes
        let v1 = Aabb::new(p - off * side, p + (Point3::splat(1.0) - off) * side).unwrap();
        let cubes = NestedFamily::centered_cubes(p, side, ratio, 12).unwrap();
        let mut regions = vec![v1];
        regions.extend(cubes.regions().iter().copied().filter(|r| v1.contains_box_interior(r)));
        let fam = NestedFamily::new(p, regions.clone()).unwrap();
        if let Ok(f) = find_ball_factoring(&fam, 12) {
            prop_assert!(box_in_ball(&regions[f.n0 - 1], p, f.epsilon));
            prop_assert!(ball_in_box(p, f.epsilon, &regions[0]));
            let mut bigger = regions.clone();
            bigger[0] = Aabb::from_center(v1.center(), v1.half_extents() * grow);
            let g = find_ball_factoring(&NestedFamily::new(p, bigger).unwrap(), 12).unwrap();
            prop_assert!(g.n0 <= f.n0);
        }
    }
}

fn pick(which: usize) -> Scenario {
    match which {
        0 => build_countable_r1(),
        1 => build_recursive_r1(),
        _ => build_trefoil_chain(false),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn limit_isotopy_is_the_identity_at_time_zero(p in point(2.0), which in 0..3usize) {
        let s = pick(which);
        let v = eval_limit_isotopy(&s.moves, &s.schedule, 0.0, p, 1e-6, 20).unwrap();
        prop_assert_eq!(v.point, p);
    }

    #[test]
    fn glued_values_agree_at_seams(ps in prop::collection::vec(point(1.5), 20), which in 0..3usize, n in 1..8usize) {
        let s = pick(which);
        let glued = glue_schedule(&s.moves, &s.schedule, n).unwrap();
        for k in 1..n {
            let t = s.schedule.t(k);
            let (l, r) = (glued.map_from_left(t).unwrap(), glued.map_at(t).unwrap());
            for &p in &ps {
                prop_assert!(distance(l.eval(p), r.eval(p)) <= 1e-9);
            }
        }
    }
}

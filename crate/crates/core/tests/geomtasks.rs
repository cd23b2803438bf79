use std::f64::consts::TAU;

use proptest::prelude::*;
use rhizome::field::Terrain;
use rhizome::geometry::{point_in_polygon, signed_area};
use rhizome::geomtasks::{
    approximate_hull, approximate_spanning_tree, approximate_voronoi, generate_maze, maze_endpoints, solve_maze,
    solve_ymaze, subdivide_polygon, HullParams, Label, MazeOutcome, MazeParams, PointSet, SpanningParams,
    SubdivideParams, VoronoiFront, YMazeParams,
};
use rhizome::oracle::{convex_hull, dijkstra, exact_voronoi_label, is_convex_with_tolerance, is_legal_move};
use rhizome::Point;

fn seg_dist(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

fn dist_to_polygon(p: Point, poly: &[Point]) -> f64 {
    (0..poly.len())
        .map(|i| seg_dist(p, poly[i], poly[(i + 1) % poly.len()]))
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn voronoi_claims_are_final_and_complete(
        blocked in prop::collection::vec(prop::bool::weighted(0.25), 24 * 24),
        seeds in prop::collection::vec((0usize..24, 0usize..24), 1..5),
    ) {
        let mut t = Terrain::open(24, 24);
        for (i, b) in blocked.iter().enumerate() {
            t.set_obstacle(i % 24, i / 24, *b);
        }
        let mut pts = Vec::new();
        for &(x, y) in &seeds {
            t.set_obstacle(x, y, false);
            let c = Terrain::cell_center(x, y);
            if !pts.contains(&c) {
                pts.push(c);
            }
        }
        let set = PointSet::in_domain(pts, 24.0, 24.0).unwrap();
        let mut front = VoronoiFront::new(&set, &t).unwrap();
        let mut prev = front.labeling();
        while !front.is_done() {
            front.step();
            let now = front.labeling();
            for (a, b) in prev.labels().iter().zip(now.labels()) {
                if matches!(a, Label::Seed(_) | Label::Boundary) {
                    prop_assert_eq!(a, b);
                }
            }
            prev = now;
        }
        // Every passable cell connected to a seed is claimed or boundary.
        let oracle_reach: Vec<bool> = (0..t.len())
            .map(|i| {
                let (x, y) = (i % 24, i / 24);
                t.is_passable(x, y) && seeds.iter().any(|&s| dijkstra(&t, s, (x, y)).unwrap().is_some())
            })
            .collect();
        for (i, l) in prev.labels().iter().enumerate() {
            prop_assert_eq!(*l != Label::Unclaimed, oracle_reach[i]);
        }
    }

    #[test]
    fn hull_contains_every_point(
        raw in prop::collection::vec((5.0f64..55.0, 5.0f64..55.0), 3..40),
        radius in 4.0f64..20.0,
    ) {
        let pts: Vec<Point> = raw.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        prop_assume!(convex_hull(&pts).is_ok());
        let mut uniq: Vec<Point> = Vec::new();
        for p in pts {
            if !uniq.contains(&p) {
                uniq.push(p);
            }
        }
        let set = PointSet::in_domain(uniq.clone(), 60.0, 60.0).unwrap();
        let h = match approximate_hull(&set, &HullParams::new(1.0 / radius)) {
            Ok(h) => h,
            Err(rhizome::Error::Degenerate(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(signed_area(&h.polygon) > 0.0);
        for p in &uniq {
            prop_assert!(
                point_in_polygon(*p, &h.polygon) || dist_to_polygon(*p, &h.polygon) <= radius,
                "point {:?} outside the hull", p
            );
        }
    }

    #[test]
    fn subdivision_partitions_star_polygons(radii in prop::collection::vec(1.0f64..5.0, 5..12), offset in 0.0f64..1.0) {
        let n = radii.len();
        let poly: Vec<Point> = radii
            .iter()
            .enumerate()
            .map(|(i, r)| Point::from_angle(TAU * (i as f64 + offset * 0.3) / n as f64) * *r)
            .collect();
        let regions = subdivide_polygon(&poly, &SubdivideParams::default()).unwrap();
        let area = signed_area(&poly);
        let total: f64 = regions.iter().map(|r| signed_area(&r.polygon)).sum();
        prop_assert!((total - area).abs() <= 1e-3 * area);
        for r in &regions {
            prop_assert!(r.area > 0.0);
            prop_assert!(is_convex_with_tolerance(&r.polygon, 1e-6));
        }
        // Interiors are disjoint: a point strictly inside one region is in no other.
        for (i, r) in regions.iter().enumerate() {
            let c = r.polygon.iter().fold(Point::ZERO, |s, p| s + *p) * (1.0 / r.polygon.len() as f64);
            for (j, o) in regions.iter().enumerate() {
                if i != j && dist_to_polygon(c, &o.polygon) > 1e-6 {
                    prop_assert!(!point_in_polygon(c, &o.polygon));
                }
            }
        }
    }
}

#[test]
fn voronoi_agrees_with_oracle_on_random_sites() {
    let t = Terrain::open(256, 256);
    let sites: Vec<Point> = (0..5)
        .map(|i| Point::new(20.0 + 47.3 * i as f64, 230.0 - 41.9 * i as f64 + (i * i) as f64 * 3.1))
        .collect();
    let set = PointSet::in_domain(sites.clone(), 256.0, 256.0).unwrap();
    let l = approximate_voronoi(&set, &t).unwrap();
    assert!(l.agreement_with(&exact_voronoi_label(&sites, &t)) >= 0.95);
}

#[test]
fn single_seed_claims_everything() {
    let t = Terrain::open(30, 20);
    let set = PointSet::in_domain(vec![Point::new(4.2, 7.9)], 30.0, 20.0).unwrap();
    let l = approximate_voronoi(&set, &t).unwrap();
    assert_eq!(l.claimed(), 600);
}

#[test]
fn maze_paths_are_valid_and_dominated_by_the_oracle() {
    let (src, dst) = maze_endpoints(10);
    for seed in 100..110 {
        let m = generate_maze(10, seed).unwrap();
        let mut p = MazeParams::default();
        p.growth.rng_seed = seed;
        if let MazeOutcome::Solved { path, length, .. } = solve_maze(&m, src, dst, &p).unwrap() {
            assert_eq!((path[0], *path.last().unwrap()), (src, dst));
            assert!(path.iter().all(|&(x, y)| m.is_passable(x, y)));
            assert!(path.windows(2).all(|w| is_legal_move(&m, w[0], w[1])));
            let best = dijkstra(&m, src, dst).unwrap().unwrap();
            assert!(best.length <= length + 1e-9);
        }
    }
}

#[test]
fn straight_corridor_length() {
    let mut t = Terrain::from_ascii(&"#".repeat(32)).unwrap();
    let mut rows = vec!["#".repeat(32), format!("#{}#", ".".repeat(30)), "#".repeat(32)];
    t = Terrain::from_ascii(&(rows.join("\n") + "\n")).unwrap_or(t);
    rows.clear();
    let o = solve_maze(&t, (1, 1), (30, 1), &MazeParams::default()).unwrap();
    let MazeOutcome::Solved { length, .. } = o else { panic!("corridor not solved: {o:?}") };
    assert!((length - 29.0).abs() <= 1.0);
}

#[test]
fn hull_of_a_square_approaches_the_convex_hull() {
    let corners = vec![Point::new(110.0, 110.0), Point::new(130.0, 110.0), Point::new(130.0, 130.0), Point::new(110.0, 130.0)];
    let set = PointSet::in_domain(corners, 240.0, 240.0).unwrap();
    let big = approximate_hull(&set, &HullParams::new(1.0 / 100.0)).unwrap();
    assert!((big.area - 400.0).abs() <= 40.0, "area {}", big.area);
    let small = approximate_hull(&set, &HullParams::new(1.0 / 20.0)).unwrap();
    assert!(small.area <= big.area);
}

#[test]
fn hull_captures_the_concavity_of_a_c() {
    // Filled C: grid points of an annular sector open towards +x.
    let mut pts = Vec::new();
    for k in 0..=40 {
        let a = 0.6 + (TAU - 1.2) * k as f64 / 40.0;
        for r in [22.0, 25.0, 28.0, 31.0] {
            pts.push(Point::new(60.0 + r * a.cos(), 60.0 + r * a.sin()));
        }
    }
    let convex = signed_area(&convex_hull(&pts).unwrap());
    let set = PointSet::in_domain(pts, 120.0, 120.0).unwrap();
    let h = approximate_hull(&set, &HullParams::new(1.0 / 6.0)).unwrap();
    assert!(h.area < 0.8 * convex, "hull {} vs convex {convex}", h.area);
}

#[test]
fn spanning_two_points_and_collinear_chain() {
    let two = PointSet::in_domain(vec![Point::new(5.5, 20.5), Point::new(35.5, 20.5)], 40.0, 40.0).unwrap();
    let o = approximate_spanning_tree(&two, &SpanningParams::default()).unwrap();
    assert!(o.spans_all && o.mst_ratio <= 1.2, "{o:?}");
    let line = vec![Point::new(5.5, 20.5), Point::new(20.5, 20.5), Point::new(35.5, 20.5)];
    let set = PointSet::in_domain(line, 40.0, 40.0).unwrap();
    let o = approximate_spanning_tree(&set, &SpanningParams::default()).unwrap();
    assert_eq!(o.visit_order, vec![0, 1, 2]);
    assert!(o.network.is_forest());
}

#[test]
fn ymaze_swap_mirrors_counts() {
    let p = YMazeParams::default();
    let a = solve_ymaze(1.0, 0.3, 30, &p, 9).unwrap();
    let b = solve_ymaze(0.3, 1.0, 30, &p, 9).unwrap();
    let mirrored: Vec<_> = a.choices.iter().map(|c| c.mirrored()).collect();
    assert_eq!(mirrored, b.choices);
    let mut quiet = p.clone();
    quiet.growth.w_noise = 0.0;
    assert!(solve_ymaze(0.5, 0.5, 3, &quiet, 0).is_err());
}

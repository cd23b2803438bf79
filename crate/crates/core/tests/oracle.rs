use std::f64::consts::SQRT_2;

use proptest::prelude::*;
use rhizome::field::Terrain;
use rhizome::geometry::{orient, signed_area};
use rhizome::oracle::{convex_hull, dijkstra, exact_mst, grid_path_length, is_convex, is_legal_move};
use rhizome::Point;

fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn tree_length(pts: &[Point], edges: &[(usize, usize)]) -> f64 {
    edges.iter().map(|&(a, b)| pts[a].dist(pts[b])).sum()
}

fn points(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), n).prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kruskal_matches_exhaustive_enumeration(pts in points(3..=7)) {
        let n = pts.len();
        let mut best = f64::INFINITY;
        let mut seq = vec![0usize; n - 2];
        for mut code in 0..n.pow((n - 2) as u32) {
            for s in seq.iter_mut() {
                *s = code % n;
                code /= n;
            }
            best = best.min(tree_length(&pts, &prufer_edges(&seq, n)));
        }
        let mst = exact_mst(&pts).unwrap();
        prop_assert!((mst.total_length - best).abs() <= 1e-9 * best.max(1.0));
        prop_assert_eq!(mst.edges.len(), n - 1);
    }

    #[test]
    fn mst_is_no_longer_than_random_trees(pts in points(8..=30), codes in prop::collection::vec(any::<u64>(), 50)) {
        let n = pts.len();
        let mst = exact_mst(&pts).unwrap().total_length;
        for c in codes {
            let seq: Vec<usize> = (0..n - 2).map(|k| ((c >> (k % 60)) as usize ^ k.wrapping_mul(2654435761)) % n).collect();
            prop_assert!(mst <= tree_length(&pts, &prufer_edges(&seq, n)) + 1e-9);
        }
    }

    #[test]
    fn hull_is_convex_and_contains_every_point(pts in points(3..=60)) {
        let Ok(hull) = convex_hull(&pts) else { return Ok(()); };
        prop_assert!(is_convex(&hull));
        prop_assert!(signed_area(&hull) > 0.0);
        for p in &pts {
            for i in 0..hull.len() {
                prop_assert!(orient(hull[i], hull[(i + 1) % hull.len()], *p) >= 0.0);
            }
        }
        for v in &hull {
            prop_assert!(pts.contains(v));
        }
    }

    #[test]
    fn open_grid_distance_is_octile(x0 in 0usize..20, y0 in 0usize..20, x1 in 0usize..20, y1 in 0usize..20) {
        let t = Terrain::open(20, 20);
        let p = dijkstra(&t, (x0, y0), (x1, y1)).unwrap().unwrap();
        let (dx, dy) = (x0.abs_diff(x1) as f64, y0.abs_diff(y1) as f64);
        let octile = dx.max(dy) + (SQRT_2 - 1.0) * dx.min(dy);
        prop_assert!((p.length - octile).abs() < 1e-9);
    }

    #[test]
    fn dijkstra_paths_are_legal_and_symmetric(
        blocked in prop::collection::vec(prop::bool::weighted(0.3), 15 * 15),
        a in (0usize..15, 0usize..15), b in (0usize..15, 0usize..15),
    ) {
        let mut t = Terrain::open(15, 15);
        for (i, bl) in blocked.iter().enumerate() {
            t.set_obstacle(i % 15, i / 15, *bl);
        }
        t.set_obstacle(a.0, a.1, false);
        t.set_obstacle(b.0, b.1, false);
        let ab = dijkstra(&t, a, b).unwrap();
        let ba = dijkstra(&t, b, a).unwrap();
        prop_assert_eq!(ab.is_some(), ba.is_some());
        if let (Some(ab), Some(ba)) = (ab, ba) {
            prop_assert!((ab.length - ba.length).abs() < 1e-9);
            prop_assert_eq!(ab.cells.first(), Some(&a));
            prop_assert_eq!(ab.cells.last(), Some(&b));
            prop_assert!(ab.cells.windows(2).all(|w| is_legal_move(&t, w[0], w[1])));
            prop_assert!((grid_path_length(&ab.cells).unwrap() - ab.length).abs() < 1e-9);
        }
    }
}

#[test]
fn no_corner_cutting() {
    let mut t = Terrain::open(2, 2);
    t.set_obstacle(1, 0, true);
    assert!(!is_legal_move(&t, (0, 0), (1, 1)));
    let p = dijkstra(&t, (0, 0), (1, 1)).unwrap().unwrap();
    assert_eq!(p.length, 2.0);
}

#[test]
fn walled_target_is_unreachable() {
    let mut t = Terrain::open(5, 5);
    for x in 0..5 {
        t.set_obstacle(x, 2, true);
    }
    assert!(dijkstra(&t, (0, 0), (4, 4)).unwrap().is_none());
    assert!(dijkstra(&t, (0, 2), (4, 4)).is_err());
}

#[test]
fn oracles_are_pure() {
    let pts: Vec<Point> = (0..12).map(|i| Point::new((i * 37 % 17) as f64, (i * 11 % 13) as f64)).collect();
    assert_eq!(exact_mst(&pts).unwrap(), exact_mst(&pts).unwrap());
    assert_eq!(convex_hull(&pts).unwrap(), convex_hull(&pts).unwrap());
}

#[test]
fn square_with_centre_has_four_hull_vertices() {
    let pts = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0), (1.0, 1.0), (1.0, 0.0)].map(|(x, y)| Point::new(x, y));
    let h = convex_hull(&pts).unwrap();
    assert_eq!(h.len(), 4);
    assert_eq!(signed_area(&h), 4.0);
}

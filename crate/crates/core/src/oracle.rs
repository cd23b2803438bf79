//! Exact classical algorithms used as ground truth for the growth-based
//! approximations: grid shortest paths, nearest-seed labelling, Euclidean
//! minimum spanning trees and convex hulls.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::field::Terrain;
use crate::geometry::{orient, Point};
use crate::geomtasks::{Label, Labeling};

/// Cost of an axis-aligned grid move.
pub const ORTHO_STEP: f64 = 1.0;
/// Cost of a diagonal grid move.
pub const DIAG_STEP: f64 = SQRT_2;

/// Cost of moving between two 8-adjacent cells, `None` if not adjacent.
pub fn chamfer_step(a: (i64, i64), b: (i64, i64)) -> Option<f64> {
    match ((a.0 - b.0).abs(), (a.1 - b.1).abs()) {
        (0, 0) => Some(0.0),
        (1, 0) | (0, 1) => Some(ORTHO_STEP),
        (1, 1) => Some(DIAG_STEP),
        _ => None,
    }
}

/// Whether a single grid move is legal: both cells passable and, for a
/// diagonal, both orthogonal cells passable too (no corner cutting).
pub fn is_legal_move(terrain: &Terrain, a: (usize, usize), b: (usize, usize)) -> bool {
    let free = |x: usize, y: usize| terrain.is_passable(x, y);
    if !free(a.0, a.1) || !free(b.0, b.1) {
        return false;
    }
    match (a.0.abs_diff(b.0), a.1.abs_diff(b.1)) {
        (0, 0) | (1, 0) | (0, 1) => true,
        (1, 1) => free(b.0, a.1) && free(a.0, b.1),
        _ => false,
    }
}

/// Length of a cell path under the chamfer metric; `None` if some consecutive
/// pair is not 8-adjacent.
pub fn grid_path_length(cells: &[(usize, usize)]) -> Option<f64> {
    cells
        .windows(2)
        .map(|w| chamfer_step((w[0].0 as i64, w[0].1 as i64), (w[1].0 as i64, w[1].1 as i64)))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    pub cells: Vec<(usize, usize)>,
    pub length: f64,
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier {
    cost: f64,
    cell: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, ties broken by cell index for determinism
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const MOVES: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

/// Shortest 8-neighbourhood path (weights 1 and √2, no corner cutting).
/// `Ok(None)` means `dst` is unreachable from `src`.
pub fn dijkstra(terrain: &Terrain, src: (usize, usize), dst: (usize, usize)) -> Result<Option<GridPath>> {
    for (x, y) in [src, dst] {
        if !terrain.contains(x as i64, y as i64) {
            return Err(Error::OutOfDomain { x: x as f64, y: y as f64 });
        }
        if terrain.is_obstacle(x, y) {
            return Err(Error::InObstacle { x: x as f64, y: y as f64 });
        }
    }
    let w = terrain.width();
    let n = terrain.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let s = terrain.index(src.0, src.1);
    let t = terrain.index(dst.0, dst.1);
    dist[s] = 0.0;
    let mut heap = BinaryHeap::from([Frontier { cost: 0.0, cell: s }]);
    while let Some(Frontier { cost, cell }) = heap.pop() {
        if cost > dist[cell] {
            continue;
        }
        if cell == t {
            break;
        }
        let (x, y) = (cell % w, cell / w);
        for (dx, dy) in MOVES {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if !terrain.contains(nx, ny) {
                continue;
            }
            let nb = (nx as usize, ny as usize);
            if !is_legal_move(terrain, (x, y), nb) {
                continue;
            }
            let step = if dx != 0 && dy != 0 { DIAG_STEP } else { ORTHO_STEP };
            let ni = terrain.index(nb.0, nb.1);
            let nc = cost + step;
            if nc < dist[ni] {
                dist[ni] = nc;
                prev[ni] = cell;
                heap.push(Frontier { cost: nc, cell: ni });
            }
        }
    }
    if dist[t].is_infinite() {
        return Ok(None);
    }
    let mut cells = vec![dst];
    let mut cur = t;
    while cur != s {
        cur = prev[cur];
        cells.push((cur % w, cur / w));
    }
    cells.reverse();
    Ok(Some(GridPath {
        cells,
        length: dist[t],
    }))
}

/// Relative tolerance under which two seed distances count as equal.
pub const VORONOI_TIE_TOLERANCE: f64 = 1e-9;

/// Nearest-seed labelling of every passable cell centre under Euclidean
/// distance; equidistant cells become [`Label::Boundary`].
pub fn exact_voronoi_label(seeds: &[Point], terrain: &Terrain) -> Labeling {
    let mut labels = vec![Label::Unclaimed; terrain.len()];
    for y in 0..terrain.height() {
        for x in 0..terrain.width() {
            if terrain.is_obstacle(x, y) || seeds.is_empty() {
                continue;
            }
            let c = Terrain::cell_center(x, y);
            let mut best = (f64::INFINITY, 0usize);
            let mut second = f64::INFINITY;
            for (i, s) in seeds.iter().enumerate() {
                let d = c.dist(*s);
                if d < best.0 {
                    second = best.0;
                    best = (d, i);
                } else if d < second {
                    second = d;
                }
            }
            labels[terrain.index(x, y)] = if second - best.0 <= VORONOI_TIE_TOLERANCE * best.0.max(1.0) {
                Label::Boundary
            } else {
                Label::Seed(best.1)
            };
        }
    }
    Labeling::new(terrain.width(), terrain.height(), labels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    /// `(i, j, length)` with `i < j`, in the order Kruskal accepted them.
    pub edges: Vec<(usize, usize, f64)>,
    pub total_length: f64,
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Euclidean minimum spanning tree by Kruskal over the complete graph.
pub fn exact_mst(points: &[Point]) -> Result<SpanningTree> {
    if points.len() < 2 {
        return Err(Error::Degenerate("a spanning tree needs at least 2 points".into()));
    }
    let n = points.len();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            if points[i] == points[j] {
                return Err(Error::Degenerate(format!("duplicate points {i} and {j}")));
            }
            edges.push((i, j, points[i].dist(points[j])));
        }
    }
    edges.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut dsu = DisjointSet::new(n);
    let mut tree = Vec::with_capacity(n - 1);
    for (i, j, d) in edges {
        if dsu.union(i, j) {
            tree.push((i, j, d));
            if tree.len() == n - 1 {
                break;
            }
        }
    }
    let total_length = tree.iter().map(|e| e.2).sum();
    Ok(SpanningTree {
        edges: tree,
        total_length,
    })
}

/// Counterclockwise convex hull by Andrew's monotone chain; collinear
/// boundary points are dropped.
pub fn convex_hull(points: &[Point]) -> Result<Vec<Point>> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::Degenerate("convex hull needs 3 distinct points".into()));
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        return Err(Error::Degenerate("all points are collinear".into()));
    }
    Ok(hull)
}

/// Convexity with the default tolerance of 1e-9.
pub fn is_convex(poly: &[Point]) -> bool {
    is_convex_with_tolerance(poly, 1e-9)
}

/// True when every turn of the closed polygon has the same sign, allowing
/// turns whose sine is within `tol` of zero, and the boundary winds once.
pub fn is_convex_with_tolerance(poly: &[Point], tol: f64) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let (mut left, mut right) = (false, false);
    let mut turning = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        let (e1, e2) = (b - a, c - b);
        let (l1, l2) = (e1.norm(), e2.norm());
        if l1 == 0.0 || l2 == 0.0 {
            continue;
        }
        let sine = e1.cross(e2) / (l1 * l2);
        let exact = orient(a, b, c);
        if sine > tol || (tol == 0.0 && exact > 0.0) {
            left = true;
        } else if sine < -tol || (tol == 0.0 && exact < 0.0) {
            right = true;
        }
        turning += e1.cross(e2).atan2(e1.dot(e2));
    }
    !(left && right) && (turning.abs() - 2.0 * PI).abs() < 1e-6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_and_diagonal_paths() {
        let t = Terrain::open(5, 5);
        let p = dijkstra(&t, (2, 2), (2, 2)).unwrap().unwrap();
        assert_eq!(p.length, 0.0);
        assert_eq!(p.cells, vec![(2, 2)]);
        let p = dijkstra(&t, (0, 0), (4, 4)).unwrap().unwrap();
        assert!((p.length - 4.0 * SQRT_2).abs() < 1e-12);
        assert_eq!(grid_path_length(&p.cells), Some(p.length));
    }

    #[test]
    fn hand_built_maze_has_known_length() {
        let t = Terrain::from_ascii(
            "#######\n\
             #.#.#.#\n\
             #.#.#.#\n\
             #.#.#.#\n\
             #.#...#\n\
             #.###.#\n\
             #######\n",
        );
        let t = t.unwrap();
        // down column 3 (3), across row 4 (2, no corner cut past (4,3)), up column 5 (3)
        let p = dijkstra(&t, (3, 1), (5, 1)).unwrap().unwrap();
        assert_eq!(p.length, 8.0);
        // column 1 is sealed off
        assert!(dijkstra(&t, (1, 1), (5, 1)).unwrap().is_none());
    }

    #[test]
    fn dijkstra_rejects_blocked_endpoints() {
        let t = Terrain::from_ascii("#..\n...\n").unwrap();
        assert!(matches!(dijkstra(&t, (0, 0), (2, 1)), Err(Error::InObstacle { .. })));
    }

    #[test]
    fn voronoi_oracle_one_and_two_seeds() {
        let t = Terrain::open(10, 6);
        let one = exact_voronoi_label(&[Point::new(3.3, 2.1)], &t);
        assert!(one.labels().iter().all(|l| *l == Label::Seed(0)));
        let two = exact_voronoi_label(&[Point::new(2.5, 3.0), Point::new(7.5, 3.0)], &t);
        for y in 0..6 {
            for x in 0..10 {
                let mirrored = match two.get(9 - x, y) {
                    Label::Seed(i) => Label::Seed(1 - i),
                    other => other,
                };
                assert_eq!(two.get(x, y), mirrored);
            }
        }
    }

    #[test]
    fn mst_small_cases() {
        let two = exact_mst(&[Point::new(0.0, 0.0), Point::new(3.0, 4.0)]).unwrap();
        assert_eq!(two.total_length, 5.0);
        assert_eq!(two.edges.len(), 1);
        let tri = exact_mst(&[Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(0.0, 4.0)]).unwrap();
        assert_eq!(tri.total_length, 7.0);
        assert!(exact_mst(&[Point::new(1.0, 1.0), Point::new(1.0, 1.0)]).is_err());
    }

    #[test]
    fn hull_of_square_with_center() {
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let h = convex_hull(&sq).unwrap();
        assert_eq!(h.len(), 4);
        let mut with_center = sq.to_vec();
        with_center.push(Point::new(0.5, 0.5));
        let h2 = convex_hull(&with_center).unwrap();
        assert_eq!(h2.len(), 4);
        assert!(!h2.contains(&Point::new(0.5, 0.5)));
        assert!(crate::geometry::signed_area(&h2) > 0.0);
        assert!(convex_hull(&[Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 2.0)]).is_err());
    }

    #[test]
    fn pentagon_convexity() {
        let penta: Vec<Point> = (0..5)
            .map(|k| Point::from_angle(PI / 2.0 + k as f64 * 2.0 * PI / 5.0))
            .collect();
        assert!(is_convex(&penta));
        let mut dented = penta.clone();
        dented[2] = dented[2] * 0.2;
        assert!(!is_convex(&dented));
        // a pentagram turns the same way everywhere but winds twice
        let star: Vec<Point> = (0..5).map(|k| penta[(k * 2) % 5]).collect();
        assert!(!is_convex(&star));
    }
}

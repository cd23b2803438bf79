use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{ray_segment_hit, segments_intersect, signed_area, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubdivideParams {
    /// Rotation step of the turn-left rule, radians.
    pub angular_resolution: f64,
    /// Hits closer than this to an existing vertex count as blocked.
    pub eps: f64,
}

impl Default for SubdivideParams {
    fn default() -> Self {
        SubdivideParams {
            angular_resolution: PI / 180.0,
            eps: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// Counterclockwise outline, collinear vertices removed.
    pub polygon: Vec<Point>,
    pub area: f64,
    /// Whether a root trail borders this region.
    pub swept: bool,
}

/// Planar straight-line graph of polygon edges plus root trails.
struct Graph {
    verts: Vec<Point>,
    /// Undirected edges with a flag for root trails.
    edges: Vec<(usize, usize, bool)>,
}

impl Graph {
    fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.verts.len()];
        for &(a, b, _) in &self.edges {
            out[a].push(b);
            out[b].push(a);
        }
        for (v, list) in out.iter_mut().enumerate() {
            let p = self.verts[v];
            list.sort_by(|&a, &b| {
                let (da, db) = (self.verts[a] - p, self.verts[b] - p);
                da.y.atan2(da.x).total_cmp(&db.y.atan2(db.x))
            });
        }
        out
    }

    /// Face cycles with the face on the left; bounded faces have positive area.
    fn faces(&self) -> Vec<Vec<usize>> {
        let out = self.outgoing();
        let mut used = std::collections::BTreeSet::new();
        let mut faces = Vec::new();
        for &(a, b, _) in &self.edges {
            for (u0, v0) in [(a, b), (b, a)] {
                if used.contains(&(u0, v0)) {
                    continue;
                }
                let mut cycle = Vec::new();
                let (mut u, mut v) = (u0, v0);
                while used.insert((u, v)) {
                    cycle.push(u);
                    let list = &out[v];
                    let k = list.iter().position(|&x| x == u).expect("twin present");
                    let w = list[(k + list.len() - 1) % list.len()];
                    (u, v) = (v, w);
                }
                let pts: Vec<Point> = cycle.iter().map(|&i| self.verts[i]).collect();
                if signed_area(&pts) > 0.0 {
                    faces.push(cycle);
                }
            }
        }
        faces
    }

    fn is_ray(&self, a: usize, b: usize) -> bool {
        self.edges
            .iter()
            .any(|&(x, y, ray)| ray && ((x, y) == (a, b) || (x, y) == (b, a)))
    }
}

fn ccw_angle(from: Point, to: Point) -> f64 {
    let a = to.y.atan2(to.x) - from.y.atan2(from.x);
    if a <= 0.0 {
        a + TAU
    } else {
        a
    }
}

fn validate(poly: &[Point]) -> Result<()> {
    let n = poly.len();
    if n < 3 {
        return Err(Error::InvalidPolygon("a polygon needs at least 3 vertices".into()));
    }
    if poly.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidPolygon("vertex coordinates must be finite".into()));
    }
    for i in 0..n {
        if poly[i] == poly[(i + 1) % n] {
            return Err(Error::InvalidPolygon(format!("vertex {i} repeats its successor")));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (a, b, c, d) = (poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]);
            if adjacent {
                // adjacent edges may only share their common vertex
                let (shared, x, y) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                let (e1, e2) = (x - shared, y - shared);
                if e1.cross(e2) == 0.0 && e1.dot(e2) > 0.0 {
                    return Err(Error::InvalidPolygon(format!("edges {i} and {j} overlap")));
                }
            } else if segments_intersect(a, b, c, d) {
                return Err(Error::InvalidPolygon(format!("edges {i} and {j} intersect")));
            }
        }
    }
    if signed_area(poly) <= 0.0 {
        return Err(Error::InvalidPolygon("vertices must be in counterclockwise order".into()));
    }
    Ok(())
}

struct Hit {
    edge: usize,
    point: Point,
    /// Within eps of an existing vertex: no place to go.
    blocked: bool,
}

fn cast(g: &Graph, origin: usize, dir: Point, eps: f64) -> Option<Hit> {
    let o = g.verts[origin];
    let mut best: Option<(f64, Hit)> = None;
    for (k, &(a, b, _)) in g.edges.iter().enumerate() {
        if a == origin || b == origin {
            continue;
        }
        let (pa, pb) = (g.verts[a], g.verts[b]);
        let Some((t, s)) = ray_segment_hit(o, dir, pa, pb) else {
            continue;
        };
        if t <= eps {
            continue;
        }
        if best.as_ref().is_some_and(|(bt, _)| *bt <= t) {
            continue;
        }
        let point = o + dir * t;
        let len = pa.dist(pb);
        let blocked = s * len < eps || (1.0 - s) * len < eps || g.verts.iter().any(|v| v.dist(point) < eps);
        best = Some((t, Hit { edge: k, point, blocked }));
    }
    best.map(|(_, h)| h)
}

/// Splits a simple counterclockwise polygon into convex regions by growing
/// straight roots from reflex corners along the bisector of the free angle.
/// A root ends where it meets the boundary or an earlier root. When its
/// bisector runs into an existing vertex it turns left in steps of the
/// angular resolution until it meets an edge cleanly, keeping both new
/// angles at its origin below a half turn.
pub fn subdivide_polygon(polygon: &[Point], params: &SubdivideParams) -> Result<Vec<Region>> {
    validate(polygon)?;
    if !(params.angular_resolution > 0.0 && params.angular_resolution < PI) {
        return Err(Error::config("angular resolution must lie in (0, π)"));
    }
    let n = polygon.len();
    let scale = polygon.iter().map(|p| p.x.abs().max(p.y.abs())).fold(1.0, f64::max);
    let eps = params.eps * scale;
    let mut g = Graph {
        verts: polygon.to_vec(),
        edges: (0..n).map(|i| (i, (i + 1) % n, false)).collect(),
    };
    // each root removes one reflex corner; the bound guards against float trouble
    for _ in 0..=4 * n {
        let faces = g.faces();
        let mut target = None;
        'search: for v in 0..g.verts.len() {
            for f in &faces {
                let m = f.len();
                for (k, &x) in f.iter().enumerate() {
                    if x != v {
                        continue;
                    }
                    let prev = g.verts[f[(k + m - 1) % m]];
                    let next = g.verts[f[(k + 1) % m]];
                    let p = g.verts[v];
                    let theta = ccw_angle(next - p, prev - p);
                    if theta > PI + 1e-9 {
                        target = Some((v, next - p, theta));
                        break 'search;
                    }
                }
            }
        }
        let Some((v, base, theta)) = target else {
            break;
        };
        let base_angle = base.y.atan2(base.x);
        let mut chosen: Option<(Hit, Point)> = None;
        let mut fallback: Option<(Hit, Point)> = None;
        let mut turn = 0.0;
        while theta / 2.0 + turn < PI {
            let dir = Point::from_angle(base_angle + theta / 2.0 + turn);
            if let Some(hit) = cast(&g, v, dir, eps) {
                if !hit.blocked {
                    chosen = Some((hit, dir));
                    break;
                }
                if fallback.is_none() {
                    fallback = Some((hit, dir));
                }
            }
            turn += params.angular_resolution;
        }
        let Some((hit, _)) = chosen.or(fallback) else {
            return Err(Error::Degenerate(format!("no free direction from vertex {v}")));
        };
        if hit.blocked {
            // nowhere left to turn: join the vertex that was hit
            let target = (0..g.verts.len())
                .min_by(|&a, &b| g.verts[a].dist(hit.point).total_cmp(&g.verts[b].dist(hit.point)))
                .expect("graph has vertices");
            g.edges.push((v, target, true));
        } else {
            let (a, b, ray) = g.edges[hit.edge];
            let p = g.verts.len();
            g.verts.push(hit.point);
            g.edges[hit.edge] = (a, p, ray);
            g.edges.push((p, b, ray));
            g.edges.push((v, p, true));
        }
    }

    let mut regions = Vec::new();
    for f in g.faces() {
        let m = f.len();
        let swept = (0..m).any(|k| g.is_ray(f[k], f[(k + 1) % m]));
        let pts: Vec<Point> = f.iter().map(|&i| g.verts[i]).collect();
        let kept: Vec<Point> = (0..m)
            .filter(|&k| {
                let (a, b, c) = (pts[(k + m - 1) % m], pts[k], pts[(k + 1) % m]);
                let (e1, e2) = (b - a, c - b);
                (e1.cross(e2) / (e1.norm() * e2.norm())).abs() > 1e-12
            })
            .map(|k| pts[k])
            .collect();
        let area = signed_area(&kept);
        regions.push(Region {
            polygon: kept,
            area,
            swept,
        });
    }
    Ok(regions)
}

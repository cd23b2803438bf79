use std::collections::BTreeMap;

use super::PointSet;
use crate::error::{Error, Result};
use crate::geometry::{orient, point_in_polygon, signed_area, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullParams {
    /// Wrapping discs have radius `1 / alpha`.
    pub alpha: f64,
    /// Raster resolution in length units.
    pub cell_size: f64,
}

impl HullParams {
    pub fn new(alpha: f64) -> Self {
        HullParams { alpha, cell_size: 0.5 }
    }

    pub fn radius(&self) -> f64 {
        1.0 / self.alpha
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullResult {
    /// Counterclockwise outline of the largest hull component.
    pub polygon: Vec<Point>,
    pub area: f64,
    /// Raster of cells never swept by a wrapping disc, row-major.
    pub mask: Vec<bool>,
    pub grid_width: usize,
    pub grid_height: usize,
}

/// 1-D squared distance transform (lower envelope of parabolas).
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        if f[q].is_infinite() {
            continue;
        }
        if f[v[0]].is_infinite() {
            v[0] = q;
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                v[0] = q;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    if f[v[0]].is_infinite() {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Exact squared Euclidean distance (in cells) to the nearest `true` cell.
pub(crate) fn squared_edt(mask: &[bool], w: usize, h: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = mask.iter().map(|&m| if m { 0.0 } else { f64::INFINITY }).collect();
    let n = w.max(h);
    let (mut f, mut out) = (vec![0.0; n], vec![0.0; n]);
    let (mut v, mut z) = (vec![0usize; n], vec![0.0; n + 1]);
    for x in 0..w {
        for y in 0..h {
            f[y] = grid[y * w + x];
        }
        edt_1d(&f[..h], &mut out[..h], &mut v, &mut z);
        for y in 0..h {
            grid[y * w + x] = out[y];
        }
    }
    for y in 0..h {
        f[..w].copy_from_slice(&grid[y * w..(y + 1) * w]);
        edt_1d(&f[..w], &mut out[..w], &mut v, &mut z);
        grid[y * w..(y + 1) * w].copy_from_slice(&out[..w]);
    }
    grid
}

/// Closed iso-contours of a binary raster at level ½, inside on the left.
/// Vertices are in doubled sample coordinates of the zero-padded grid.
fn marching_squares(mask: &[bool], w: usize, h: usize) -> Vec<Vec<(i64, i64)>> {
    let at = |i: i64, j: i64| -> bool {
        i >= 1 && j >= 1 && i <= w as i64 && j <= h as i64 && mask[(j as usize - 1) * w + (i as usize - 1)]
    };
    let mut next: BTreeMap<(i64, i64), (i64, i64)> = BTreeMap::new();
    for j in 0..=h as i64 {
        for i in 0..=w as i64 {
            let b = (2 * i + 1, 2 * j);
            let r = (2 * i + 2, 2 * j + 1);
            let t = (2 * i + 1, 2 * j + 2);
            let l = (2 * i, 2 * j + 1);
            let case = at(i, j) as u8 | (at(i + 1, j) as u8) << 1 | (at(i + 1, j + 1) as u8) << 2 | (at(i, j + 1) as u8) << 3;
            let segs: &[((i64, i64), (i64, i64))] = match case {
                1 => &[(b, l)],
                2 => &[(r, b)],
                3 => &[(r, l)],
                4 => &[(t, r)],
                5 => &[(b, l), (t, r)],
                6 => &[(t, b)],
                7 => &[(t, l)],
                8 => &[(l, t)],
                9 => &[(b, t)],
                10 => &[(r, b), (l, t)],
                11 => &[(r, t)],
                12 => &[(l, r)],
                13 => &[(b, r)],
                14 => &[(l, b)],
                _ => &[],
            };
            for &(s, e) in segs {
                next.insert(s, e);
            }
        }
    }
    let mut loops = Vec::new();
    while let Some((&start, _)) = next.iter().next() {
        let mut ring = vec![start];
        let mut cur = next.remove(&start).expect("present");
        while cur != start {
            ring.push(cur);
            cur = next.remove(&cur).expect("contours close");
        }
        loops.push(ring);
    }
    loops
}

fn distance_to_ring(p: Point, ring: &[Point]) -> f64 {
    (0..ring.len())
        .map(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            let ab = b - a;
            let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
            p.dist(a + ab * t)
        })
        .fold(f64::INFINITY, f64::min)
}

fn drop_collinear(poly: Vec<Point>) -> Vec<Point> {
    let n = poly.len();
    if n < 4 {
        return poly;
    }
    (0..n)
        .filter(|&i| orient(poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]) != 0.0)
        .map(|i| poly[i])
        .collect()
}

/// Discrete α-hull: a front flooding in from the domain boundary keeps
/// every position farther than `r = 1/α` from all points; the discs of
/// radius `r` around those positions sweep the outside, and the outline of
/// what remains is the hull.
pub fn approximate_hull(points: &PointSet, hull: &HullParams) -> Result<HullResult> {
    let pts = points.points();
    if pts.len() < 3 {
        return Err(Error::config("a hull needs at least 3 points"));
    }
    if !pts[2..].iter().any(|&p| orient(pts[0], pts[1], p) != 0.0) {
        return Err(Error::Degenerate("all points are collinear".into()));
    }
    if !(hull.alpha > 0.0 && hull.alpha.is_finite()) {
        return Err(Error::config("alpha must be positive"));
    }
    let cs = hull.cell_size;
    if !(cs > 0.0 && cs.is_finite()) {
        return Err(Error::config("cell size must be positive"));
    }
    let r = hull.radius();
    let (min, max) = (points.min(), points.max());
    let w = ((max.x - min.x) / cs).ceil().max(1.0) as usize;
    let h = ((max.y - min.y) / cs).ceil().max(1.0) as usize;
    let centre = |x: usize, y: usize| Point::new(min.x + (x as f64 + 0.5) * cs, min.y + (y as f64 + 0.5) * cs);
    let free: Vec<bool> = (0..w * h)
        .map(|i| {
            let c = centre(i % w, i / w);
            pts.iter().all(|p| p.dist(c) > r)
        })
        .collect();

    let mut reached = vec![false; w * h];
    let mut stack: Vec<usize> = (0..w * h)
        .filter(|&i| {
            let (x, y) = (i % w, i / w);
            (x == 0 || y == 0 || x == w - 1 || y == h - 1) && free[i]
        })
        .collect();
    if stack.is_empty() {
        return Err(Error::Degenerate(format!(
            "wrap radius {r} leaves no room for the front inside the domain"
        )));
    }
    for &i in &stack {
        reached[i] = true;
    }
    while let Some(i) = stack.pop() {
        let (x, y) = (i % w, i / w);
        let mut visit = |j: usize| {
            if free[j] && !reached[j] {
                reached[j] = true;
                stack.push(j);
            }
        };
        if x > 0 {
            visit(i - 1);
        }
        if x + 1 < w {
            visit(i + 1);
        }
        if y > 0 {
            visit(i - w);
        }
        if y + 1 < h {
            visit(i + w);
        }
    }

    let d2 = squared_edt(&reached, w, h);
    let rc = r / cs;
    let mask: Vec<bool> = d2.iter().map(|&d| d > rc * rc).collect();
    let loops = marching_squares(&mask, w, h);
    let to_world = |(kx, ky): (i64, i64)| {
        Point::new(
            min.x + (kx as f64 / 2.0 - 0.5) * cs,
            min.y + (ky as f64 / 2.0 - 0.5) * cs,
        )
    };
    let best = loops
        .into_iter()
        .map(|ring| {
            let poly: Vec<Point> = ring.into_iter().map(to_world).collect();
            let a = signed_area(&poly);
            (a, poly)
        })
        .filter(|(a, _)| *a > 0.0)
        .max_by(|a, b| a.0.total_cmp(&b.0));
    let Some((area, polygon)) = best else {
        return Err(Error::Degenerate("the front swept every cell".into()));
    };
    // Gaps wider than 2r let the front through and split the shape. Sub-cell
    // cusps at sharp corners also break off, but those stay within r.
    if let Some(p) = pts
        .iter()
        .find(|&&p| !point_in_polygon(p, &polygon) && distance_to_ring(p, &polygon) > r)
    {
        return Err(Error::Degenerate(format!(
            "wrap radius {r} splits the hull and leaves ({}, {}) outside",
            p.x, p.y
        )));
    }
    Ok(HullResult {
        polygon: drop_collinear(polygon),
        area,
        mask,
        grid_width: w,
        grid_height: h,
    })
}

//! Planar points, vectors and the handful of polygon predicates shared by the
//! growth model, the geometric tasks and the exact oracles.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A point or displacement in the plane, in cell units unless stated otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub type Vec2 = Point;

impl Point {
    pub const ZERO: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Point::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn dist2(self, o: Point) -> f64 {
        let d = self - o;
        d.dot(d)
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Point> {
        let n = self.norm();
        if n > 1e-300 && n.is_finite() {
            Some(Point::new(self.x / n, self.y / n))
        } else {
            None
        }
    }

    /// Counterclockwise rotation by `theta` radians.
    pub fn rotated(self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Exact sign of the orientation determinant of `(a, b, c)`:
/// positive for a left turn, negative for a right turn, zero when collinear.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    )
}

/// Signed shoelace area; positive for counterclockwise vertex order.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        acc += poly[i].cross(poly[(i + 1) % n]);
    }
    acc * 0.5
}

pub fn polyline_length(pts: &[Point]) -> f64 {
    pts.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Even-odd point-in-polygon test. Points exactly on an edge may go either way.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Proper or touching intersection of closed segments `ab` and `cd`.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Point, q: Point, r: Point| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    (d1 == 0.0 && on(c, d, a))
        || (d2 == 0.0 && on(c, d, b))
        || (d3 == 0.0 && on(a, b, c))
        || (d4 == 0.0 && on(a, b, d))
}

/// Parameter `t` along the ray `origin + t * dir` where it meets segment `ab`,
/// together with the parameter `s ∈ [0, 1]` along the segment.
pub fn ray_segment_hit(origin: Point, dir: Point, a: Point, b: Point) -> Option<(f64, f64)> {
    let e = b - a;
    let denom = dir.cross(e);
    if denom.abs() < 1e-300 {
        return None;
    }
    let w = a - origin;
    let t = w.cross(e) / denom;
    let s = w.cross(dir) / denom;
    if (0.0..=1.0).contains(&s) {
        Some((t, s))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_signs() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.0);
        assert!(orient(a, b, Point::new(0.5, 1.0)) > 0.0);
        assert!(orient(a, b, Point::new(0.5, -1.0)) < 0.0);
        assert_eq!(orient(a, b, Point::new(3.0, 0.0)), 0.0);
    }

    #[test]
    fn area_of_unit_square() {
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert_eq!(signed_area(&sq), 1.0);
        let mut cw = sq;
        cw.reverse();
        assert_eq!(signed_area(&cw), -1.0);
        assert!(point_in_polygon(Point::new(0.5, 0.5), &sq));
        assert!(!point_in_polygon(Point::new(1.5, 0.5), &sq));
    }

    #[test]
    fn ray_hits_segment() {
        let (t, s) = ray_segment_hit(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, -1.0),
            Point::new(2.0, 1.0),
        )
        .unwrap();
        assert!((t - 2.0).abs() < 1e-12 && (s - 0.5).abs() < 1e-12);
    }
}

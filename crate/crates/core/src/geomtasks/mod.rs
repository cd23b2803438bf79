//! Geometric problems encoded as growth scenarios: the Y-maze choice, maze
//! shortest paths, spanning trees, Voronoi diagrams, concave hulls and convex
//! subdivision of polygons.

mod hull;
mod maze;
mod spanning;
mod subdivide;
mod voronoi;
mod ymaze;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::write_pgm;
use crate::geometry::Point;

pub use hull::{approximate_hull, HullParams, HullResult};
pub use maze::{generate_maze, maze_endpoints, solve_maze, MazeOutcome, MazeParams, StuckReason};
pub use spanning::{approximate_spanning_tree, SpanningOutcome, SpanningParams};
pub use subdivide::{subdivide_polygon, Region, SubdivideParams};
pub use voronoi::{approximate_voronoi, VoronoiFront};
pub use ymaze::{solve_ymaze, ymaze_terrain, ArmChoice, YMazeLayout, YMazeOutcome, YMazeParams};

/// A finite set of distinct planar points inside axis-aligned bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
    min: Point,
    max: Point,
}

impl PointSet {
    pub fn new(points: Vec<Point>, min: Point, max: Point) -> Result<Self> {
        if !(min.x < max.x && min.y < max.y) {
            return Err(Error::config("point-set bounds are empty"));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() || p.x < min.x || p.x > max.x || p.y < min.y || p.y > max.y {
                return Err(Error::config(format!("point {i} ({}, {}) lies outside the bounds", p.x, p.y)));
            }
            if points[..i].contains(p) {
                return Err(Error::config(format!("point {i} duplicates an earlier point")));
            }
        }
        Ok(PointSet { points, min, max })
    }

    /// Bounds `[0, width] × [0, height]`.
    pub fn in_domain(points: Vec<Point>, width: f64, height: f64) -> Result<Self> {
        PointSet::new(points, Point::ZERO, Point::new(width, height))
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> Point {
        self.min
    }

    pub fn max(&self) -> Point {
        self.max
    }
}

/// Parses `x,y` rows; a non-numeric first line is taken as a header.
pub fn read_points_csv(text: &str) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut f = line.split(',').map(str::trim);
        let (x, y) = (f.next().unwrap_or(""), f.next().unwrap_or(""));
        match (x.parse::<f64>(), y.parse::<f64>()) {
            (Ok(x), Ok(y)) => out.push(Point::new(x, y)),
            _ if n == 0 => continue,
            _ => return Err(Error::parse(n + 1, format!("expected `x,y`, got {line:?}"))),
        }
    }
    Ok(out)
}

pub fn write_points_csv(points: &[Point]) -> String {
    let mut out = String::from("x,y\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p.x, p.y);
    }
    out
}

/// State of one cell in a Voronoi labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Seed(usize),
    Boundary,
    Unclaimed,
}

/// A grid of [`Label`]s, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeling {
    width: usize,
    height: usize,
    labels: Vec<Label>,
}

impl Labeling {
    pub fn new(width: usize, height: usize, labels: Vec<Label>) -> Self {
        assert_eq!(labels.len(), width * height);
        Labeling { width, height, labels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> Label {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn count(&self, pred: impl Fn(Label) -> bool) -> usize {
        self.labels.iter().filter(|l| pred(**l)).count()
    }

    pub fn claimed(&self) -> usize {
        self.count(|l| matches!(l, Label::Seed(_)))
    }

    /// Fraction of cells claimed here whose label matches `oracle`; oracle
    /// ties count as agreement with either side.
    pub fn agreement_with(&self, oracle: &Labeling) -> f64 {
        assert_eq!(self.labels.len(), oracle.labels.len());
        let mut claimed = 0usize;
        let mut agree = 0usize;
        for (mine, theirs) in self.labels.iter().zip(&oracle.labels) {
            if let Label::Seed(i) = mine {
                claimed += 1;
                if matches!(theirs, Label::Seed(j) if j == i) || *theirs == Label::Boundary {
                    agree += 1;
                }
            }
        }
        if claimed == 0 {
            1.0
        } else {
            agree as f64 / claimed as f64
        }
    }

    /// Boundary cells each adjoin at least two distinct seed labels (8-neighbourhood).
    pub fn boundaries_separate_claims(&self) -> bool {
        (0..self.height).all(|y| {
            (0..self.width).all(|x| {
                if self.get(x, y) != Label::Boundary {
                    return true;
                }
                let mut seen: Option<usize> = None;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        if nx < 0 || ny < 0 || nx >= self.width as i64 || ny >= self.height as i64 {
                            continue;
                        }
                        if let Label::Seed(i) = self.get(nx as usize, ny as usize) {
                            match seen {
                                None => seen = Some(i),
                                Some(j) if j != i => return true,
                                _ => {}
                            }
                        }
                    }
                }
                false
            })
        })
    }

    /// Grey-level rendering: boundary 255, unclaimed 0, seeds spread over 40..=220.
    pub fn to_pgm(&self) -> String {
        let n_seeds = self
            .labels
            .iter()
            .filter_map(|l| match l {
                Label::Seed(i) => Some(*i + 1),
                _ => None,
            })
            .max()
            .unwrap_or(1);
        let px: Vec<u8> = self
            .labels
            .iter()
            .map(|l| match l {
                Label::Boundary => 255,
                Label::Unclaimed => 0,
                Label::Seed(i) => (40 + (180 * i) / n_seeds.max(1)) as u8,
            })
            .collect();
        write_pgm(self.width, self.height, &px)
    }
}

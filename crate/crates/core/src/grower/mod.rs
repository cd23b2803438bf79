//! Root-apex agents: ballistic motion steered by attractant/repellent
//! gradients, downhill slope, swarm alignment and noise; specular reflection
//! off blocked cell faces; stochastic branching. Growth output is a
//! [`RootNetwork`] of trails.

mod network;
mod scenario;

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{grid_gradient, gradient_at, ScalarField, Terrain};
use crate::geometry::{Point, Vec2};

pub use network::{RootNetwork, Trail};
pub use scenario::{run_growth, set_growth_param, Scenario, SeedSpec};

/// Identifier of the random generator used everywhere in growth runs.
pub const RNG_ALGORITHM: &str = "chacha8";

pub type GrowthRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> GrowthRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApexState {
    Active,
    Stopped,
    Exited,
}

impl ApexState {
    pub fn as_str(self) -> &'static str {
        match self {
            ApexState::Active => "active",
            ApexState::Stopped => "stopped",
            ApexState::Exited => "exited",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "active" => Some(ApexState::Active),
            "stopped" => Some(ApexState::Stopped),
            "exited" => Some(ApexState::Exited),
            _ => None,
        }
    }
}

/// The growing tip of one root.
#[derive(Debug, Clone, PartialEq)]
pub struct Apex {
    pub position: Point,
    /// Unit direction of growth.
    pub heading: Vec2,
    /// Cells per step; constant for the lifetime of the apex.
    pub speed: f64,
    pub state: ApexState,
    pub root_id: usize,
    pub parent_id: Option<usize>,
    pub trail: Vec<Point>,
    blocked_steps: usize,
}

impl Apex {
    pub fn new(root_id: usize, position: Point, heading: Vec2, speed: f64) -> Self {
        let heading = heading.normalized().unwrap_or(Point::new(1.0, 0.0));
        Apex {
            position,
            heading,
            speed,
            state: ApexState::Active,
            root_id,
            parent_id: None,
            trail: vec![position],
            blocked_steps: 0,
        }
    }

    pub fn is_active(&self) -> bool {
        self.state == ApexState::Active
    }

    pub fn cell(&self) -> (usize, usize) {
        (self.position.x.floor() as usize, self.position.y.floor() as usize)
    }

    /// Consecutive steps this apex has spent reflecting in place.
    pub fn blocked_steps(&self) -> usize {
        self.blocked_steps
    }
}

/// Weights and rates of the heading update.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthParams {
    pub w_inertia: f64,
    pub w_gradient: f64,
    pub w_downhill: f64,
    pub w_noise: f64,
    pub w_align: f64,
    /// Expected branches per unit trail length.
    pub branch_rate: f64,
    /// Rotation of a branch relative to its parent heading, radians.
    pub branch_angle: f64,
    /// Cells above this elevation block apex motion.
    pub elevation_limit: f64,
    /// Neighbourhood radius for swarm alignment, cells.
    pub align_radius: f64,
    /// Passages narrower than this many cells are avoided (0 disables).
    pub min_corridor_width: usize,
    /// An apex that reflects in place this many steps in a row stops (0 disables).
    pub stall_limit: usize,
    /// Branching is suppressed once this many apexes exist.
    pub max_apexes: usize,
    /// Speed given to seeded apexes, cells per step.
    pub speed: f64,
    pub rng_seed: u64,
}

impl Default for GrowthParams {
    fn default() -> Self {
        GrowthParams {
            w_inertia: 1.0,
            w_gradient: 1.0,
            w_downhill: 0.0,
            w_noise: 0.0,
            w_align: 0.0,
            branch_rate: 0.0,
            branch_angle: std::f64::consts::FRAC_PI_4,
            elevation_limit: f64::INFINITY,
            align_radius: 3.0,
            min_corridor_width: 0,
            stall_limit: 0,
            max_apexes: 256,
            speed: 0.5,
            rng_seed: 0,
        }
    }
}

impl GrowthParams {
    pub fn validate(&self) -> Result<()> {
        let weights = [
            ("w_inertia", self.w_inertia),
            ("w_gradient", self.w_gradient),
            ("w_downhill", self.w_downhill),
            ("w_noise", self.w_noise),
            ("w_align", self.w_align),
        ];
        for (name, w) in weights {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::config(format!("{name} must be a finite non-negative weight")));
            }
        }
        if weights.iter().all(|(_, w)| *w == 0.0) {
            return Err(Error::config("at least one heading weight must be positive"));
        }
        if !(self.branch_rate >= 0.0 && self.branch_rate.is_finite()) {
            return Err(Error::config("branch_rate must be non-negative"));
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::config("apex speed must be positive"));
        }
        if self.elevation_limit.is_nan() || !(self.align_radius >= 0.0) {
            return Err(Error::config("elevation_limit and align_radius must be numbers"));
        }
        Ok(())
    }
}

/// Everything an apex senses: terrain, chemical fields and absorbing exits.
#[derive(Debug, Clone)]
pub struct Environment<'a> {
    terrain: &'a Terrain,
    attractant: Option<&'a ScalarField>,
    repellent: Option<&'a ScalarField>,
    blocked: Vec<bool>,
    exits: Vec<bool>,
}

impl<'a> Environment<'a> {
    pub fn new(terrain: &'a Terrain, params: &GrowthParams) -> Self {
        let mut blocked: Vec<bool> = (0..terrain.len())
            .map(|i| terrain.obstacle_grid()[i] || terrain.elevation_grid()[i] > params.elevation_limit)
            .collect();
        if params.min_corridor_width > 1 {
            let narrow = narrow_cells(terrain, &blocked, params.min_corridor_width);
            for (b, n) in blocked.iter_mut().zip(narrow) {
                *b |= n;
            }
        }
        Environment {
            terrain,
            attractant: None,
            repellent: None,
            blocked,
            exits: vec![false; terrain.len()],
        }
    }

    pub fn with_attractant(mut self, field: &'a ScalarField) -> Self {
        self.attractant = Some(field);
        self
    }

    pub fn with_repellent(mut self, field: &'a ScalarField) -> Self {
        self.repellent = Some(field);
        self
    }

    /// Marks cells whose entry absorbs an apex (state becomes `Exited`).
    pub fn with_exits(mut self, cells: impl IntoIterator<Item = (usize, usize)>) -> Self {
        for (x, y) in cells {
            let i = self.terrain.index(x, y);
            self.exits[i] = true;
        }
        self
    }

    pub fn set_attractant(&mut self, field: Option<&'a ScalarField>) {
        self.attractant = field;
    }

    pub fn terrain(&self) -> &Terrain {
        self.terrain
    }

    /// Whether an apex may occupy cell `(x, y)`; out-of-domain cells are blocked.
    pub fn is_blocked(&self, x: i64, y: i64) -> bool {
        !self.terrain.contains(x, y) || self.blocked[self.terrain.index(x as usize, y as usize)]
    }

    pub fn allows(&self, p: Point) -> bool {
        self.terrain
            .cell_of(p)
            .is_some_and(|(x, y)| !self.blocked[self.terrain.index(x, y)])
    }

    fn is_exit(&self, p: Point) -> bool {
        self.terrain
            .cell_of(p)
            .is_some_and(|(x, y)| self.exits[self.terrain.index(x, y)])
    }

    /// ∇attractant − ∇repellent at `p` (zero for absent fields).
    pub fn chemical_gradient(&self, p: Point) -> Result<Vec2> {
        let mut g = Point::ZERO;
        if let Some(a) = self.attractant {
            g += gradient_at(a, self.terrain, p)?;
        }
        if let Some(r) = self.repellent {
            g = g - gradient_at(r, self.terrain, p)?;
        }
        Ok(g)
    }

    fn downhill(&self, p: Point) -> Result<Vec2> {
        Ok(-grid_gradient(self.terrain.elevation_grid(), self.terrain, p)?)
    }
}

/// Cells lying in a horizontal or vertical passable run shorter than `min_width`.
fn narrow_cells(terrain: &Terrain, blocked: &[bool], min_width: usize) -> Vec<bool> {
    let (w, h) = (terrain.width(), terrain.height());
    let mut hrun = vec![0usize; w * h];
    let mut vrun = vec![0usize; w * h];
    for y in 0..h {
        let mut x = 0;
        while x < w {
            if blocked[y * w + x] {
                x += 1;
                continue;
            }
            let start = x;
            while x < w && !blocked[y * w + x] {
                x += 1;
            }
            for xi in start..x {
                hrun[y * w + xi] = x - start;
            }
        }
    }
    for x in 0..w {
        let mut y = 0;
        while y < h {
            if blocked[y * w + x] {
                y += 1;
                continue;
            }
            let start = y;
            while y < h && !blocked[y * w + x] {
                y += 1;
            }
            for yi in start..y {
                vrun[yi * w + x] = y - start;
            }
        }
    }
    (0..w * h)
        .map(|i| !blocked[i] && hrun[i].min(vrun[i]) < min_width)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Axis {
    X,
    Y,
}

/// Cells entered, in order, by the straight segment `p → q`, paired with the
/// axis of the face crossed to enter each. Exact corner crossings step along
/// x first, so consecutive cells are always 4-adjacent.
pub(crate) fn traverse_cells(p: Point, q: Point) -> Vec<((i64, i64), Axis)> {
    let mut cell = (p.x.floor() as i64, p.y.floor() as i64);
    let target = (q.x.floor() as i64, q.y.floor() as i64);
    let d = q - p;
    let (step_x, step_y) = (d.x.signum() as i64, d.y.signum() as i64);
    let next_boundary = |pos: f64, c: i64, step: i64| if step > 0 { (c + 1) as f64 - pos } else { pos - c as f64 };
    let mut t_max_x = if d.x != 0.0 { next_boundary(p.x, cell.0, step_x) / d.x.abs() } else { f64::INFINITY };
    let mut t_max_y = if d.y != 0.0 { next_boundary(p.y, cell.1, step_y) / d.y.abs() } else { f64::INFINITY };
    let t_dx = if d.x != 0.0 { 1.0 / d.x.abs() } else { f64::INFINITY };
    let t_dy = if d.y != 0.0 { 1.0 / d.y.abs() } else { f64::INFINITY };
    let mut out = Vec::new();
    let max_steps = (cell.0 - target.0).abs() + (cell.1 - target.1).abs();
    for _ in 0..max_steps {
        if cell == target {
            break;
        }
        let take_x = if cell.0 == target.0 {
            false
        } else if cell.1 == target.1 {
            true
        } else {
            t_max_x <= t_max_y
        };
        if take_x {
            cell.0 += step_x;
            t_max_x += t_dx;
            out.push((cell, Axis::X));
        } else {
            cell.1 += step_y;
            t_max_y += t_dy;
            out.push((cell, Axis::Y));
        }
    }
    out
}

/// Cell sequence visited by a polyline, consecutive duplicates removed.
pub fn trail_cells(points: &[Point]) -> Vec<(i64, i64)> {
    let mut cells = Vec::new();
    if let Some(first) = points.first() {
        cells.push((first.x.floor() as i64, first.y.floor() as i64));
    }
    for w in points.windows(2) {
        for (c, _) in traverse_cells(w[0], w[1]) {
            if cells.last() != Some(&c) {
                cells.push(c);
            }
        }
    }
    cells
}

fn random_unit(rng: &mut GrowthRng) -> Vec2 {
    Point::from_angle(rng.random::<f64>() * TAU)
}

/// Advances every active apex by one step. New branches are appended to
/// `apexes` and start moving on the next step.
pub fn grow_step(
    apexes: &mut Vec<Apex>,
    env: &Environment<'_>,
    params: &GrowthParams,
    rng: &mut GrowthRng,
) -> Result<()> {
    params.validate()?;
    for a in apexes.iter().filter(|a| a.is_active()) {
        if !env.allows(a.position) {
            return Err(Error::config(format!(
                "apex {} at ({:.3}, {:.3}) starts in a blocked cell",
                a.root_id, a.position.x, a.position.y
            )));
        }
    }
    let snapshot: Vec<(Point, Vec2)> = apexes
        .iter()
        .filter(|a| a.is_active())
        .map(|a| (a.position, a.heading))
        .collect();
    let existing = apexes.len();
    let mut next_id = apexes.iter().map(|a| a.root_id + 1).max().unwrap_or(0);
    let mut spawned = Vec::new();
    let r2 = params.align_radius * params.align_radius;

    for apex in apexes.iter_mut().filter(|a| a.is_active()) {
        let p = apex.position;
        let mut steer = apex.heading * params.w_inertia;
        if params.w_gradient > 0.0 {
            if let Some(g) = env.chemical_gradient(p)?.normalized() {
                steer += g * params.w_gradient;
            }
        }
        if params.w_downhill > 0.0 {
            if let Some(d) = env.downhill(p)?.normalized() {
                steer += d * params.w_downhill;
            }
        }
        if params.w_align > 0.0 {
            let mut sum = Point::ZERO;
            for &(q, h) in &snapshot {
                if q != p && q.dist2(p) <= r2 {
                    sum += h;
                }
            }
            if let Some(a) = sum.normalized() {
                steer += a * params.w_align;
            }
        }
        if params.w_noise > 0.0 {
            steer += random_unit(rng) * params.w_noise;
        }
        let heading = steer.normalized().unwrap_or(apex.heading);
        let target = p + heading * apex.speed;

        let blocked_face = traverse_cells(p, target)
            .into_iter()
            .find(|&((x, y), _)| env.is_blocked(x, y))
            .map(|(_, axis)| axis);
        match blocked_face {
            Some(axis) => {
                apex.heading = match axis {
                    Axis::X => Point::new(-heading.x, heading.y),
                    Axis::Y => Point::new(heading.x, -heading.y),
                };
                apex.blocked_steps += 1;
                if params.stall_limit > 0 && apex.blocked_steps >= params.stall_limit {
                    apex.state = ApexState::Stopped;
                }
            }
            None => {
                apex.heading = heading;
                apex.position = target;
                apex.trail.push(target);
                apex.blocked_steps = 0;
                if env.is_exit(target) {
                    apex.state = ApexState::Exited;
                }
            }
        }

        if params.branch_rate > 0.0 {
            let fire = rng.random::<f64>() < params.branch_rate * apex.speed;
            if fire && apex.is_active() && existing + spawned.len() < params.max_apexes {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let mut child = Apex::new(
                    next_id,
                    apex.position,
                    apex.heading.rotated(sign * params.branch_angle),
                    apex.speed,
                );
                child.parent_id = Some(apex.root_id);
                next_id += 1;
                spawned.push(child);
            }
        }
    }
    apexes.extend(spawned);
    Ok(())
}

/// Steps apexes until the budget is spent or none is active.
pub fn grow(
    apexes: &mut Vec<Apex>,
    env: &Environment<'_>,
    params: &GrowthParams,
    rng: &mut GrowthRng,
    steps: usize,
) -> Result<usize> {
    for step in 0..steps {
        if !apexes.iter().any(Apex::is_active) {
            return Ok(step);
        }
        grow_step(apexes, env, params, rng)?;
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Source;

    fn ballistic() -> GrowthParams {
        GrowthParams {
            w_inertia: 1.0,
            w_gradient: 0.0,
            ..GrowthParams::default()
        }
    }

    #[test]
    fn ballistic_trail_is_straight() {
        let t = Terrain::open(40, 40);
        let env = Environment::new(&t, &ballistic());
        let h = Point::new(3.0, 1.0).normalized().unwrap();
        let mut apexes = vec![Apex::new(0, Point::new(5.0, 5.0), h, 0.7)];
        let mut rng = rng_from_seed(1);
        grow(&mut apexes, &env, &ballistic(), &mut rng, 20).unwrap();
        let trail = &apexes[0].trail;
        assert_eq!(trail.len(), 21);
        for p in trail {
            let d = *p - Point::new(5.0, 5.0);
            assert!(d.cross(h).abs() < 1e-9);
        }
    }

    #[test]
    fn pure_gradient_heading_equals_normalized_gradient() {
        let t = Terrain::open(30, 30);
        let field = crate::field::build_field(&[Source::new(25, 20, 1.0)], &t, &Default::default())
            .unwrap()
            .field;
        let params = GrowthParams {
            w_inertia: 0.0,
            w_gradient: 1.0,
            ..GrowthParams::default()
        };
        let env = Environment::new(&t, &params).with_attractant(&field);
        let start = Point::new(10.2, 10.7);
        let expected = env.chemical_gradient(start).unwrap().normalized().unwrap();
        let mut apexes = vec![Apex::new(0, start, Point::new(-1.0, 0.0), 0.5)];
        grow_step(&mut apexes, &env, &params, &mut rng_from_seed(0)).unwrap();
        assert!((apexes[0].heading - expected).norm() < 1e-12);
    }

    #[test]
    fn specular_reflection_off_vertical_wall() {
        let mut t = Terrain::open(10, 5);
        for y in 0..5 {
            t.set_obstacle(6, y, true);
        }
        let env = Environment::new(&t, &ballistic());
        let mut apexes = vec![Apex::new(0, Point::new(5.8, 2.5), Point::new(1.0, 0.0), 0.5)];
        grow_step(&mut apexes, &env, &ballistic(), &mut rng_from_seed(0)).unwrap();
        assert_eq!(apexes[0].heading, Point::new(-1.0, 0.0));
        assert_eq!(apexes[0].position, Point::new(5.8, 2.5));
        assert_eq!(apexes[0].trail.len(), 1);
    }

    #[test]
    fn start_in_obstacle_is_config_error() {
        let mut t = Terrain::open(4, 4);
        t.set_obstacle(1, 1, true);
        let env = Environment::new(&t, &ballistic());
        let mut apexes = vec![Apex::new(0, Point::new(1.5, 1.5), Point::new(1.0, 0.0), 0.5)];
        let err = grow_step(&mut apexes, &env, &ballistic(), &mut rng_from_seed(0)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn corner_crossing_steps_x_first() {
        let cells = traverse_cells(Point::new(0.5, 0.5), Point::new(1.5, 1.5));
        assert_eq!(cells, vec![((1, 0), Axis::X), ((1, 1), Axis::Y)]);
        let cells = traverse_cells(Point::new(2.9, 0.2), Point::new(3.1, 0.4));
        assert_eq!(cells, vec![((3, 0), Axis::X)]);
        assert!(traverse_cells(Point::new(0.2, 0.2), Point::new(0.7, 0.9)).is_empty());
    }

    #[test]
    fn narrow_side_streets_are_avoided() {
        // 3-wide street along x with a 1-wide side street going up at x = 10
        let mut t = Terrain::open(20, 12);
        for y in 0..12 {
            for x in 0..20 {
                let street = (5..8).contains(&y);
                let side = x == 10 && y < 5;
                t.set_obstacle(x, y, !(street || side));
            }
        }
        let params = GrowthParams {
            min_corridor_width: 2,
            ..ballistic()
        };
        let env = Environment::new(&t, &params);
        assert!(env.is_blocked(10, 2));
        assert!(!env.is_blocked(10, 6));
        assert!(!Environment::new(&t, &ballistic()).is_blocked(10, 2));
    }

    #[test]
    fn branching_produces_children_on_parent_trail() {
        let t = Terrain::open(60, 60);
        let params = GrowthParams {
            w_noise: 0.3,
            branch_rate: 0.05,
            max_apexes: 10,
            ..ballistic()
        };
        let env = Environment::new(&t, &params);
        let mut apexes = vec![Apex::new(0, Point::new(30.0, 30.0), Point::new(1.0, 0.0), 0.5)];
        grow(&mut apexes, &env, &params, &mut rng_from_seed(9), 200).unwrap();
        assert!(apexes.len() > 1 && apexes.len() <= 10);
        let net = RootNetwork::from_apexes(&apexes);
        assert!(net.is_forest());
        assert!(net.children_start_on_parents());
    }
}

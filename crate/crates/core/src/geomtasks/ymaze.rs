use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::field::{build_field, FieldParams, ScalarField, Source, Terrain};
use crate::geometry::Point;
use crate::grower::{grow_step, rng_from_seed, Apex, ApexState, Environment, GrowthParams};

#[derive(Debug, Clone, PartialEq)]
pub struct YMazeParams {
    pub growth: GrowthParams,
    pub field: FieldParams,
    /// Channel width in cells.
    pub channel_width: f64,
    pub stem_length: f64,
    /// Length of each arm; arms leave the junction at ±45°.
    pub arm_length: f64,
    /// Elevation drop per cell towards the arm ends, standing in for gravity.
    pub slope: f64,
    /// Steps allowed per trial.
    pub budget: usize,
}

impl Default for YMazeParams {
    fn default() -> Self {
        YMazeParams {
            growth: GrowthParams {
                w_inertia: 1.0,
                w_gradient: 2.0,
                w_downhill: 0.5,
                w_noise: 0.6,
                ..GrowthParams::default()
            },
            field: FieldParams::default(),
            channel_width: 5.0,
            stem_length: 20.0,
            arm_length: 24.0,
            slope: 1.0,
            budget: 800,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArmChoice {
    Left,
    Right,
    Undecided,
}

impl ArmChoice {
    pub fn mirrored(self) -> Self {
        match self {
            ArmChoice::Left => ArmChoice::Right,
            ArmChoice::Right => ArmChoice::Left,
            ArmChoice::Undecided => ArmChoice::Undecided,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ArmChoice::Left => "left",
            ArmChoice::Right => "right",
            ArmChoice::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct YMazeOutcome {
    pub choices: Vec<ArmChoice>,
}

impl YMazeOutcome {
    pub fn count(&self, c: ArmChoice) -> usize {
        self.choices.iter().filter(|x| **x == c).count()
    }

    /// Share of all trials ending in the left arm.
    pub fn fraction_left(&self) -> f64 {
        self.count(ArmChoice::Left) as f64 / self.choices.len() as f64
    }
}

/// Geometry of a Y-maze: the stem runs down from the top edge, the arms
/// fan out below the junction. Left is towards smaller x.
#[derive(Debug, Clone)]
pub struct YMazeLayout {
    pub terrain: Terrain,
    pub start: Point,
    pub left_end: (usize, usize),
    pub right_end: (usize, usize),
    /// Row from which cells absorb the apex.
    pub exit_row: usize,
    /// Rows beyond this count as inside an arm.
    pub fork_row: f64,
    pub axis_x: f64,
}

fn seg_dist(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

pub fn ymaze_terrain(params: &YMazeParams) -> Result<YMazeLayout> {
    let hw = params.channel_width / 2.0;
    if !(hw >= 0.5 && params.stem_length > 0.0 && params.arm_length > 0.0) {
        return Err(Error::config("Y-maze channel width and lengths must be positive"));
    }
    let reach = params.arm_length * FRAC_1_SQRT_2;
    let half = (reach + hw + 2.0).ceil() as usize;
    let width = 2 * half + 1;
    let axis_x = half as f64 + 0.5;
    let junction = Point::new(axis_x, 1.0 + params.stem_length);
    let height = (junction.y + reach + hw + 2.0).ceil() as usize;
    let top = Point::new(axis_x, 0.0);
    let left = Point::new(axis_x - reach, junction.y + reach);
    let right = Point::new(axis_x + reach, junction.y + reach);
    let mut obstacle = vec![true; width * height];
    let mut elevation = vec![0.0; width * height];
    for y in 1..height - 1 {
        for x in 1..width - 1 {
            let c = Terrain::cell_center(x, y);
            let inside = seg_dist(c, top, junction) <= hw
                || seg_dist(c, junction, left) <= hw
                || seg_dist(c, junction, right) <= hw;
            obstacle[y * width + x] = !inside;
        }
    }
    for y in 0..height {
        for x in 0..width {
            elevation[y * width + x] = params.slope * (height - 1 - y) as f64;
        }
    }
    let terrain = Terrain::new(width, height, elevation, obstacle, 1.0)?;
    let cell = |p: Point| (p.x.floor() as usize, p.y.floor() as usize);
    let left_end = cell(left);
    Ok(YMazeLayout {
        start: Point::new(axis_x, 2.0),
        left_end,
        right_end: (width - 1 - left_end.0, left_end.1),
        exit_row: (left.y - 2.0).floor() as usize,
        fork_row: junction.y + hw / FRAC_1_SQRT_2 + 1.0,
        axis_x,
        terrain,
    })
}

/// Runs `trials` independent roots down a Y-maze with attractant of strength
/// `c_left` / `c_right` released at the end of each arm.
pub fn solve_ymaze(
    c_left: f64,
    c_right: f64,
    trials: usize,
    params: &YMazeParams,
    seed: u64,
) -> Result<YMazeOutcome> {
    if trials == 0 {
        return Err(Error::config("Y-maze needs at least one trial"));
    }
    if !(c_left >= 0.0 && c_right >= 0.0 && c_left.is_finite() && c_right.is_finite()) {
        return Err(Error::config("attractant strengths must be finite and non-negative"));
    }
    if c_left == c_right && params.growth.w_noise == 0.0 {
        return Err(Error::config(
            "equal attractant in both arms with zero noise leaves the choice undetermined",
        ));
    }
    params.growth.validate()?;
    // Trials always run with the stronger arm on the left; the mirror image
    // of a run is the run of the mirrored maze.
    let mirror = c_right > c_left;
    let (strong, weak) = if mirror { (c_right, c_left) } else { (c_left, c_right) };
    let layout = ymaze_terrain(params)?;
    let t = &layout.terrain;
    let mut sources = Vec::new();
    if strong > 0.0 {
        sources.push(Source::new(layout.left_end.0, layout.left_end.1, strong));
    }
    if weak > 0.0 {
        sources.push(Source::new(layout.right_end.0, layout.right_end.1, weak));
    }
    let field: Option<ScalarField> = if sources.is_empty() {
        None
    } else {
        Some(build_field(&sources, t, &params.field)?.field)
    };
    let exits: Vec<(usize, usize)> = (layout.exit_row..t.height())
        .flat_map(|y| (0..t.width()).map(move |x| (x, y)))
        .filter(|&(x, y)| t.is_passable(x, y))
        .collect();
    let mut env = Environment::new(t, &params.growth).with_exits(exits);
    env.set_attractant(field.as_ref());
    let mut growth = params.growth.clone();
    growth.branch_rate = 0.0;

    let mut choices = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = rng_from_seed(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut apexes = vec![Apex::new(0, layout.start, Point::new(0.0, 1.0), growth.speed)];
        for _ in 0..params.budget {
            if !apexes[0].is_active() {
                break;
            }
            grow_step(&mut apexes, &env, &growth, &mut rng)?;
        }
        let apex = &apexes[0];
        let p = apex.position;
        let decided = apex.state == ApexState::Exited || p.y > layout.fork_row;
        let choice = if !decided || p.x == layout.axis_x {
            ArmChoice::Undecided
        } else if p.x < layout.axis_x {
            ArmChoice::Left
        } else {
            ArmChoice::Right
        };
        choices.push(if mirror { choice.mirrored() } else { choice });
    }
    Ok(YMazeOutcome { choices })
}

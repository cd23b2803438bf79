use rand::seq::IndexedRandom;

use crate::error::{Error, Result};
use crate::field::{build_field, FieldParams, Source, Terrain};
use crate::geometry::Point;
use crate::grower::{grow_step, rng_from_seed, trail_cells, Apex, Environment, GrowthParams};
use crate::oracle::{dijkstra, grid_path_length, is_legal_move};

/// Perfect maze (exactly one route between any two passages) drawn on a
/// `(2n+1) × (2n+1)` grid with 1-cell corridors and walls. Passages sit at
/// odd coordinates. Carved by a seeded recursive backtracker.
pub fn generate_maze(n: usize, seed: u64) -> Result<Terrain> {
    if n == 0 {
        return Err(Error::config("maze needs at least one cell"));
    }
    let side = 2 * n + 1;
    let mut mask = vec![true; side * side];
    let mut visited = vec![false; n * n];
    let mut rng = rng_from_seed(seed);
    let mut stack = vec![(0usize, 0usize)];
    visited[0] = true;
    mask[side + 1] = false;
    while let Some(&(cx, cy)) = stack.last() {
        let mut next: Vec<(usize, usize)> = Vec::with_capacity(4);
        if cx > 0 {
            next.push((cx - 1, cy));
        }
        if cx + 1 < n {
            next.push((cx + 1, cy));
        }
        if cy > 0 {
            next.push((cx, cy - 1));
        }
        if cy + 1 < n {
            next.push((cx, cy + 1));
        }
        next.retain(|&(x, y)| !visited[y * n + x]);
        match next.choose(&mut rng) {
            None => {
                stack.pop();
            }
            Some(&(nx, ny)) => {
                visited[ny * n + nx] = true;
                let (gx, gy) = (2 * nx + 1, 2 * ny + 1);
                mask[gy * side + gx] = false;
                mask[(cy + ny + 1) * side + (cx + nx + 1)] = false;
                stack.push((nx, ny));
            }
        }
    }
    Terrain::new(side, side, vec![0.0; side * side], mask, 1.0)
}

/// Opposite corner passages of an `n`-cell maze.
pub fn maze_endpoints(n: usize) -> ((usize, usize), (usize, usize)) {
    ((1, 1), (2 * n - 1, 2 * n - 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MazeParams {
    pub growth: GrowthParams,
    pub field: FieldParams,
    /// Step budget; `None` means eight steps per passable cell over the apex speed.
    pub budget: Option<usize>,
}

impl Default for MazeParams {
    fn default() -> Self {
        MazeParams {
            growth: GrowthParams {
                w_inertia: 1.0,
                w_gradient: 1.0,
                w_noise: 0.2,
                stall_limit: 60,
                ..GrowthParams::default()
            },
            field: FieldParams::default(),
            budget: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StuckReason {
    /// The attractant never reached the start: the destination is walled off.
    NoGradient,
    /// The apex kept reflecting in place.
    Stalled,
    BudgetExhausted,
}

impl StuckReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StuckReason::NoGradient => "no-gradient",
            StuckReason::Stalled => "stalled",
            StuckReason::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MazeOutcome {
    Solved {
        /// Cells the root passed through, src first and dst last, consecutive
        /// cells 8-adjacent.
        path: Vec<(usize, usize)>,
        /// Length of `path` under the chamfer grid metric.
        length: f64,
        trail: Vec<Point>,
        steps: usize,
    },
    Stuck {
        reason: StuckReason,
        trail: Vec<Point>,
        steps: usize,
    },
}

impl MazeOutcome {
    pub fn is_solved(&self) -> bool {
        matches!(self, MazeOutcome::Solved { .. })
    }

    pub fn trail(&self) -> &[Point] {
        match self {
            MazeOutcome::Solved { trail, .. } | MazeOutcome::Stuck { trail, .. } => trail,
        }
    }

    /// Ratio of the root path length to the shortest path; `None` when stuck.
    pub fn length_ratio(&self, maze: &Terrain, src: (usize, usize), dst: (usize, usize)) -> Result<Option<f64>> {
        let MazeOutcome::Solved { length, .. } = self else {
            return Ok(None);
        };
        let Some(best) = dijkstra(maze, src, dst)? else {
            return Ok(None);
        };
        Ok(Some(if best.length == 0.0 { 1.0 } else { length / best.length }))
    }
}

/// Replaces each staircase corner by a diagonal step where the grid metric
/// allows it.
fn merge_corners(terrain: &Terrain, cells: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(cells.len());
    for c in cells {
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let diagonal = a.0.abs_diff(c.0) == 1 && a.1.abs_diff(c.1) == 1;
            if diagonal && is_legal_move(terrain, a, c) {
                out.pop();
            }
        }
        out.push(c);
    }
    out
}

/// Grows a single non-branching root from `src` up the attractant field
/// emitted at `dst`.
pub fn solve_maze(
    maze: &Terrain,
    src: (usize, usize),
    dst: (usize, usize),
    params: &MazeParams,
) -> Result<MazeOutcome> {
    for (x, y) in [src, dst] {
        if x >= maze.width() || y >= maze.height() {
            return Err(Error::OutOfDomain { x: x as f64, y: y as f64 });
        }
        if maze.is_obstacle(x, y) {
            return Err(Error::InObstacle { x: x as f64, y: y as f64 });
        }
    }
    let mut growth = params.growth.clone();
    growth.branch_rate = 0.0;
    growth.validate()?;
    let start = Terrain::cell_center(src.0, src.1);
    let built = build_field(&[Source::new(dst.0, dst.1, 1.0)], maze, &params.field)?;
    let field = built.field;
    if field.at(src.0, src.1) <= 0.0 {
        return Ok(MazeOutcome::Stuck {
            reason: StuckReason::NoGradient,
            trail: vec![start],
            steps: 0,
        });
    }
    let env = Environment::new(maze, &growth)
        .with_attractant(&field)
        .with_exits([dst]);
    let heading = env
        .chemical_gradient(start)?
        .normalized()
        .unwrap_or(Point::new(1.0, 0.0));
    let mut apexes = vec![Apex::new(0, start, heading, growth.speed)];
    if src == dst {
        return Ok(MazeOutcome::Solved {
            path: vec![src],
            length: 0.0,
            trail: vec![start],
            steps: 0,
        });
    }
    let passable = maze.obstacle_grid().iter().filter(|b| !**b).count();
    let budget = params
        .budget
        .unwrap_or(((8 * passable) as f64 / growth.speed).ceil() as usize);
    let mut rng = rng_from_seed(growth.rng_seed);
    let mut steps = 0;
    while steps < budget && apexes[0].is_active() {
        grow_step(&mut apexes, &env, &growth, &mut rng)?;
        steps += 1;
    }
    let apex = &apexes[0];
    let trail = apex.trail.clone();
    if apex.state == crate::grower::ApexState::Exited {
        let cells: Vec<(usize, usize)> = trail_cells(&trail)
            .into_iter()
            .map(|(x, y)| (x as usize, y as usize))
            .collect();
        let path = merge_corners(maze, cells);
        let length = grid_path_length(&path).ok_or_else(|| Error::config("root path is not 8-connected"))?;
        return Ok(MazeOutcome::Solved {
            path,
            length,
            trail,
            steps,
        });
    }
    let reason = if apex.is_active() {
        StuckReason::BudgetExhausted
    } else {
        StuckReason::Stalled
    };
    Ok(MazeOutcome::Stuck { reason, trail, steps })
}

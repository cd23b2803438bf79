//! Growth scenarios and their key-value text format.
//!
//! ```text
//! # comment
//! width = 64                  # or terrain.mask = walls.txt
//! height = 64
//! terrain.elevation = hills.pgm
//! terrain.elevation_scale = 0.1
//! field.diffusion = 0.25
//! field.decay = 0.01
//! attractant = 50 40 1.0      # cell x, cell y, emission per step (repeatable)
//! repellent = 10 10 0.5
//! seed = 5.5 5.5 1 0          # position, optional heading (repeatable)
//! exit = 60 60                # absorbing cell (repeatable)
//! steps = 400
//! rng = chacha8
//! growth.w_noise = 0.2        # any GrowthParams field
//! ```
//! Paths are resolved against the directory of the scenario file.

use std::path::Path;

use super::{grow, rng_from_seed, Apex, Environment, GrowthParams, RootNetwork, RNG_ALGORITHM};
use crate::error::{Error, Result};
use crate::field::{build_field, FieldParams, Source, Terrain};
use crate::geometry::{Point, Vec2};

#[derive(Debug, Clone, PartialEq)]
pub struct SeedSpec {
    pub position: Point,
    /// Initial heading; when absent the apex starts along the chemical
    /// gradient, or along +x if that vanishes.
    pub heading: Option<Vec2>,
}

/// Seeds, chemistry, terrain and parameters for one growth run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub terrain: Terrain,
    pub attractants: Vec<Source>,
    pub repellents: Vec<Source>,
    pub field: FieldParams,
    pub seeds: Vec<SeedSpec>,
    pub exits: Vec<(usize, usize)>,
    pub params: GrowthParams,
    pub steps: usize,
}

impl Scenario {
    pub fn new(terrain: Terrain, seeds: Vec<SeedSpec>, params: GrowthParams, steps: usize) -> Self {
        Scenario {
            terrain,
            attractants: Vec::new(),
            repellents: Vec::new(),
            field: FieldParams::default(),
            seeds,
            exits: Vec::new(),
            params,
            steps,
        }
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut width = None;
        let mut height = None;
        let mut mask = None;
        let mut elevation = None;
        let mut elevation_scale = 1.0;
        let mut field = FieldParams::default();
        let mut attractants = Vec::new();
        let mut repellents = Vec::new();
        let mut seeds = Vec::new();
        let mut exits = Vec::new();
        let mut steps = None;
        let mut params = GrowthParams::default();

        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::parse(line_no, "expected `key = value`"))?;
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(line_no, format!("bad number {s:?} for {key}")))
            };
            let int = |s: &str| -> Result<usize> {
                s.parse::<usize>()
                    .map_err(|_| Error::parse(line_no, format!("bad integer {s:?} for {key}")))
            };
            let nums = |s: &str| -> Result<Vec<f64>> { s.split_whitespace().map(num).collect() };
            match key {
                "width" => width = Some(int(value)?),
                "height" => height = Some(int(value)?),
                "terrain.mask" => mask = Some(base_dir.join(value)),
                "terrain.elevation" => elevation = Some(base_dir.join(value)),
                "terrain.elevation_scale" => elevation_scale = num(value)?,
                "field.diffusion" => field.diffusion = num(value)?,
                "field.decay" => field.decay = num(value)?,
                "field.tolerance" => field.tolerance = num(value)?,
                "field.max_iterations" => field.max_iterations = Some(int(value)?),
                "attractant" | "repellent" => {
                    let f: Vec<&str> = value.split_whitespace().collect();
                    if f.len() != 3 {
                        return Err(Error::parse(line_no, format!("{key} needs `x y rate`")));
                    }
                    let s = Source::new(int(f[0])?, int(f[1])?, num(f[2])?);
                    if key == "attractant" {
                        attractants.push(s);
                    } else {
                        repellents.push(s);
                    }
                }
                "seed" => {
                    let v = nums(value)?;
                    let heading = match v.len() {
                        2 => None,
                        4 => Some(Point::new(v[2], v[3])),
                        _ => return Err(Error::parse(line_no, "seed needs `x y [hx hy]`")),
                    };
                    seeds.push(SeedSpec {
                        position: Point::new(v[0], v[1]),
                        heading,
                    });
                }
                "exit" => {
                    let f: Vec<&str> = value.split_whitespace().collect();
                    if f.len() != 2 {
                        return Err(Error::parse(line_no, "exit needs `x y`"));
                    }
                    exits.push((int(f[0])?, int(f[1])?));
                }
                "steps" => steps = Some(int(value)?),
                "rng" => {
                    if value != RNG_ALGORITHM {
                        return Err(Error::parse(line_no, format!("unsupported rng {value:?}")));
                    }
                }
                _ => match key.strip_prefix("growth.") {
                    Some(name) => set_growth_param(&mut params, name, value)
                        .map_err(|msg| Error::parse(line_no, msg))?,
                    None => return Err(Error::parse(line_no, format!("unknown key {key:?}"))),
                },
            }
        }

        let mut terrain = match (mask, width, height) {
            (Some(path), _, _) => Terrain::from_ascii(&std::fs::read_to_string(path)?)?,
            (None, Some(w), Some(h)) if w > 0 && h > 0 => Terrain::open(w, h),
            _ => return Err(Error::config("scenario needs terrain.mask or width and height")),
        };
        if let Some(path) = elevation {
            terrain = terrain.with_elevation_pgm(&std::fs::read(path)?, elevation_scale)?;
        }
        let steps = steps.ok_or_else(|| Error::config("scenario needs `steps`"))?;
        Ok(Scenario {
            terrain,
            attractants,
            repellents,
            field,
            seeds,
            exits,
            params,
            steps,
        })
    }
}

/// Assigns one [`GrowthParams`] field by name.
pub fn set_growth_param(p: &mut GrowthParams, name: &str, value: &str) -> std::result::Result<(), String> {
    let f = || value.parse::<f64>().map_err(|_| format!("bad number {value:?} for {name}"));
    let u = || value.parse::<usize>().map_err(|_| format!("bad integer {value:?} for {name}"));
    match name {
        "w_inertia" => p.w_inertia = f()?,
        "w_gradient" => p.w_gradient = f()?,
        "w_downhill" => p.w_downhill = f()?,
        "w_noise" => p.w_noise = f()?,
        "w_align" => p.w_align = f()?,
        "branch_rate" => p.branch_rate = f()?,
        "branch_angle" => p.branch_angle = f()?,
        "elevation_limit" => p.elevation_limit = f()?,
        "align_radius" => p.align_radius = f()?,
        "min_corridor_width" => p.min_corridor_width = u()?,
        "stall_limit" => p.stall_limit = u()?,
        "max_apexes" => p.max_apexes = u()?,
        "speed" => p.speed = f()?,
        "rng_seed" => p.rng_seed = value.parse().map_err(|_| format!("bad seed {value:?}"))?,
        other => return Err(format!("unknown growth parameter {other:?}")),
    }
    Ok(())
}

/// Runs a scenario to completion: builds its fields, seeds one apex per seed
/// and grows until the step budget is spent or every apex has stopped.
pub fn run_growth(s: &Scenario) -> Result<RootNetwork> {
    if s.steps == 0 {
        return Err(Error::config("step budget must be at least 1"));
    }
    s.params.validate()?;
    let attract = build_field(&s.attractants, &s.terrain, &s.field)?.field;
    let repel = build_field(&s.repellents, &s.terrain, &s.field)?.field;
    let mut env = Environment::new(&s.terrain, &s.params).with_exits(s.exits.iter().copied());
    if !s.attractants.is_empty() {
        env = env.with_attractant(&attract);
    }
    if !s.repellents.is_empty() {
        env = env.with_repellent(&repel);
    }
    let mut apexes = Vec::with_capacity(s.seeds.len());
    for (id, seed) in s.seeds.iter().enumerate() {
        if !env.allows(seed.position) {
            return Err(Error::config(format!(
                "seed ({}, {}) lies in a blocked cell",
                seed.position.x, seed.position.y
            )));
        }
        let heading = match seed.heading {
            Some(h) => h,
            None => env
                .chemical_gradient(seed.position)?
                .normalized()
                .unwrap_or(Point::new(1.0, 0.0)),
        };
        apexes.push(Apex::new(id, seed.position, heading, s.params.speed));
    }
    let mut rng = rng_from_seed(s.params.rng_seed);
    grow(&mut apexes, &env, &s.params, &mut rng, s.steps)?;
    Ok(RootNetwork::from_apexes(&apexes))
}

use super::PointSet;
use crate::error::{Error, Result};
use crate::field::{build_field, FieldParams, ScalarField, Source, Terrain};
use crate::geometry::Point;
use crate::grower::{grow_step, rng_from_seed, Apex, ApexState, Environment, GrowthParams, RootNetwork};
use crate::oracle::exact_mst;

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningParams {
    pub growth: GrowthParams,
    pub field: FieldParams,
    /// A source is consumed once an apex comes this close, cells.
    pub capture_radius: f64,
    /// Step budget; `None` means ten domain perimeters over the apex speed.
    pub budget: Option<usize>,
}

impl Default for SpanningParams {
    fn default() -> Self {
        SpanningParams {
            growth: GrowthParams {
                w_inertia: 1.0,
                w_gradient: 2.0,
                w_noise: 0.1,
                stall_limit: 200,
                ..GrowthParams::default()
            },
            field: FieldParams::default(),
            capture_radius: 1.5,
            budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningOutcome {
    pub network: RootNetwork,
    /// Point indices in the order they were reached; starts with 0.
    pub visit_order: Vec<usize>,
    pub spans_all: bool,
    pub total_length: f64,
    pub mst_length: f64,
    /// `total_length / mst_length`.
    pub mst_ratio: f64,
}

/// Grows a root from `points[0]` towards the remaining points, which emit
/// attractant until an apex reaches them. The apex that consumes a source
/// ends there and a new branch sprouts from the site, steered by the
/// refreshed field. Coordinates are cells of an open domain spanning
/// `[0, max]` of the point-set bounds.
pub fn approximate_spanning_tree(points: &PointSet, params: &SpanningParams) -> Result<SpanningOutcome> {
    let pts = points.points();
    if pts.len() < 2 {
        return Err(Error::config("a spanning tree needs at least 2 points"));
    }
    if points.min().x < 0.0 || points.min().y < 0.0 {
        return Err(Error::config("spanning-tree bounds must start at the origin"));
    }
    if !(params.capture_radius > 0.0) {
        return Err(Error::config("capture radius must be positive"));
    }
    let mut growth = params.growth.clone();
    growth.branch_rate = 0.0;
    growth.validate()?;
    let width = points.max().x.floor() as usize + 1;
    let height = points.max().y.floor() as usize + 1;
    let terrain = Terrain::open(width, height);
    let cell = |p: Point| terrain.cell_of(p).ok_or(Error::OutOfDomain { x: p.x, y: p.y });

    // The field is linear in the sources, so each source's steady field is
    // built once and the live field is the sum over unconsumed sources.
    let mut per_source: Vec<Option<Vec<f64>>> = vec![None; pts.len()];
    for (i, &p) in pts.iter().enumerate().skip(1) {
        let (x, y) = cell(p)?;
        let built = build_field(&[Source::new(x, y, 1.0)], &terrain, &params.field)?;
        per_source[i] = Some(built.field.values().to_vec());
    }
    let live_field = |alive: &[bool]| -> Result<ScalarField> {
        let mut acc = vec![0.0; terrain.len()];
        for (i, vals) in per_source.iter().enumerate() {
            if let (true, Some(v)) = (alive[i], vals) {
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += b;
                }
            }
        }
        ScalarField::with_values(&terrain, acc, params.field.diffusion, params.field.decay, Vec::new())
    };

    let mut alive: Vec<bool> = (0..pts.len()).map(|i| i > 0).collect();
    let mut visit_order = vec![0];
    let capture = |p: Point, alive: &mut [bool], order: &mut Vec<usize>| -> bool {
        let mut any = false;
        for (i, q) in pts.iter().enumerate() {
            if alive[i] && q.dist(p) <= params.capture_radius {
                alive[i] = false;
                order.push(i);
                any = true;
            }
        }
        any
    };
    capture(pts[0], &mut alive, &mut visit_order);

    let budget = params
        .budget
        .unwrap_or(((20 * (width + height)) as f64 / growth.speed).ceil() as usize);
    let mut rng = rng_from_seed(growth.rng_seed);
    let mut field = live_field(&alive)?;
    let start_heading = |f: &ScalarField, p: Point| -> Result<Point> {
        let env = Environment::new(&terrain, &growth).with_attractant(f);
        Ok(env.chemical_gradient(p)?.normalized().unwrap_or(Point::new(1.0, 0.0)))
    };
    let mut apexes = vec![Apex::new(0, pts[0], start_heading(&field, pts[0])?, growth.speed)];
    let mut steps = 0;
    while alive.iter().any(|a| *a) && steps < budget {
        let current = apexes.len() - 1;
        if !apexes[current].is_active() {
            break;
        }
        let env = Environment::new(&terrain, &growth).with_attractant(&field);
        grow_step(&mut apexes, &env, &growth, &mut rng)?;
        steps += 1;
        let tip = apexes[current].position;
        if capture(tip, &mut alive, &mut visit_order) {
            apexes[current].state = ApexState::Stopped;
            if alive.iter().any(|a| *a) {
                field = live_field(&alive)?;
                let mut child = Apex::new(apexes.len(), tip, start_heading(&field, tip)?, growth.speed);
                child.parent_id = Some(apexes[current].root_id);
                apexes.push(child);
            }
        }
    }
    for a in apexes.iter_mut().filter(|a| a.is_active()) {
        a.state = ApexState::Stopped;
    }
    let network = RootNetwork::from_apexes(&apexes);
    let total_length = network.total_length();
    let mst_length = exact_mst(pts)?.total_length;
    Ok(SpanningOutcome {
        spans_all: !alive.iter().any(|a| *a),
        visit_order,
        total_length,
        mst_length,
        mst_ratio: total_length / mst_length,
        network,
    })
}

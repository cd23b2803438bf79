use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use rhizome::analog::{
    hysteresis_trace, imply_gate, nand_gate, solve_resistor_network, sum_amplifier, trace_to_csv, AmplifierConfig,
    MemristorState, Netlist,
};
use rhizome::channelgates::{builtin_layout, evaluate_layout, truth_table, BuiltinLayout, ChannelLayout, OccupancyKind};
use rhizome::field::{read_pgm, FieldParams, Terrain};
use rhizome::geometry::{signed_area, Point};
use rhizome::geomtasks::{
    approximate_hull, approximate_spanning_tree, generate_maze, maze_endpoints, read_points_csv, solve_maze,
    solve_ymaze, subdivide_polygon, write_points_csv, ArmChoice, HullParams, Label, Labeling, MazeOutcome,
    MazeParams, PointSet, SpanningParams, SubdivideParams, VoronoiFront, YMazeParams,
};
use rhizome::grower::{run_growth, set_growth_param, Scenario};
use rhizome::grower::{rng_from_seed, GrowthParams, RootNetwork, Trail};
use rhizome::miner::{census_report, mine_gates, MiningProtocol, SyntheticMaterial};
use rhizome::oracle::{convex_hull, dijkstra, exact_mst, exact_voronoi_label, is_convex_with_tolerance, is_legal_move};

use crate::params::{path, value, ParamSpec, Params};
use crate::svg::{render_svg, Artifact};
use crate::{CliError, CommandSpec, Outputs};

pub fn all() -> Vec<CommandSpec> {
    vec![
        CommandSpec {
            name: "ymaze",
            about: "Y-maze choice trials",
            params: ymaze_params(),
            run: ymaze,
        },
        CommandSpec {
            name: "maze",
            about: "grow a root through a generated perfect maze",
            params: maze_params(),
            run: maze,
        },
        CommandSpec {
            name: "voronoi",
            about: "Voronoi labelling by colliding growth fronts",
            params: voronoi_params(),
            run: voronoi,
        },
        CommandSpec {
            name: "mst",
            about: "spanning tree grown towards attractant points",
            params: mst_params(),
            run: mst,
        },
        CommandSpec {
            name: "hull",
            about: "alpha hull of a point set",
            params: hull_params(),
            run: hull,
        },
        CommandSpec {
            name: "subdivide",
            about: "convex subdivision of a simple polygon",
            params: subdivide_params(),
            run: subdivide,
        },
        CommandSpec {
            name: "gate",
            about: "evaluate a channel gate on one input row",
            params: gate_params(true),
            run: gate,
        },
        CommandSpec {
            name: "truthtable",
            about: "full truth table of a two-input channel gate",
            params: gate_params(false),
            run: truthtable,
        },
        CommandSpec {
            name: "amplifier",
            about: "inverting summing amplifier",
            params: vec![
                value("r0", 3e6, "feedback resistance, ohms"),
                value("r1", 2e6, "input 1 resistance, ohms"),
                value("r2", 4e6, "input 2 resistance, ohms"),
                value("v1", -1.0, "input 1 voltage"),
                value("v2", -1.0, "input 2 voltage"),
            ],
            run: amplifier,
        },
        CommandSpec {
            name: "netlist",
            about: "solve a resistor network",
            params: vec![path("netlist", "netlist file")],
            run: netlist,
        },
        CommandSpec {
            name: "memristor",
            about: "memristor hysteresis trace or IMPLY/NAND tables",
            params: vec![
                value("mode", "trace", "trace, imply or nand"),
                value("w0", 0.0, "initial state for traces"),
                value("amplitude", 2.0, "sinusoid amplitude, volts"),
                value("frequency", 1.0, "sinusoid frequency, Hz"),
                value("periods", 2, "periods to trace"),
                value("samples", 200, "samples per period"),
            ],
            run: memristor,
        },
        CommandSpec {
            name: "mine",
            about: "census of two-input gates mined from a material model",
            params: mine_params(),
            run: mine,
        },
        CommandSpec {
            name: "render",
            about: "render a network CSV, labelling PGM or layout file to SVG",
            params: vec![
                path("input", "artifact file"),
                value("kind", "auto", "network, labeling, layout or auto (by extension)"),
                value("inputs", "", "input bits for a layout, comma separated"),
            ],
            run: render,
        },
        CommandSpec {
            name: "grow",
            about: "run a growth scenario file",
            params: vec![path("scenario", "scenario file")],
            run: grow,
        },
    ]
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::Io(p.display().to_string(), e))
}

fn required_path(params: &Params, key: &str) -> Result<std::path::PathBuf, CliError> {
    params
        .optional_path(key)
        .ok_or_else(|| usage(format!("--{} is required", key.replace('_', "-"))))
}

const GROWTH_KEYS: [&str; 10] = [
    "w_inertia",
    "w_gradient",
    "w_downhill",
    "w_noise",
    "w_align",
    "branch_rate",
    "branch_angle",
    "stall_limit",
    "max_apexes",
    "speed",
];

fn growth_specs(g: &GrowthParams, f: &FieldParams) -> Vec<ParamSpec> {
    let growth = [
        g.w_inertia.to_string(),
        g.w_gradient.to_string(),
        g.w_downhill.to_string(),
        g.w_noise.to_string(),
        g.w_align.to_string(),
        g.branch_rate.to_string(),
        g.branch_angle.to_string(),
        g.stall_limit.to_string(),
        g.max_apexes.to_string(),
        g.speed.to_string(),
    ];
    let mut v: Vec<ParamSpec> = GROWTH_KEYS
        .iter()
        .zip(growth)
        .map(|(k, d)| value(k, d, "growth parameter"))
        .collect();
    v.push(value("diffusion", f.diffusion, "attractant diffusion rate"));
    v.push(value("decay", f.decay, "attractant decay per step"));
    v.push(value("tolerance", f.tolerance, "steady-state tolerance of the field"));
    v
}

fn apply_growth(params: &Params, g: &mut GrowthParams, f: &mut FieldParams) -> Result<(), CliError> {
    for k in GROWTH_KEYS {
        set_growth_param(g, k, params.str(k)).map_err(CliError::Usage)?;
    }
    f.diffusion = params.f64("diffusion")?;
    f.decay = params.f64("decay")?;
    f.tolerance = params.f64("tolerance")?;
    Ok(())
}

fn random_points(n: usize, w: f64, h: f64, seed: u64) -> Vec<Point> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| Point::new(rng.random_range(0.0..w), rng.random_range(0.0..h)))
        .collect()
}

/// Points from `points` if given, else `n` uniform random points.
fn load_points(params: &Params, w: f64, h: f64) -> Result<Vec<Point>, CliError> {
    match params.optional_path("points") {
        Some(p) => Ok(read_points_csv(&read(&p)?)?),
        None => Ok(random_points(params.usize("n")?, w, h, params.u64("seed")?)),
    }
}

fn ymaze_params() -> Vec<ParamSpec> {
    let d = YMazeParams::default();
    let mut v = vec![
        value("seed", 0, "random seed"),
        value("trials", 20, "number of trials"),
        value("attractant_left", 1.0, "emission at the left arm end"),
        value("attractant_right", 0.0, "emission at the right arm end"),
        value("channel_width", d.channel_width, "channel width, cells"),
        value("stem_length", d.stem_length, "stem length, cells"),
        value("arm_length", d.arm_length, "arm length, cells"),
        value("slope", d.slope, "elevation drop per cell towards the arm ends"),
        value("budget", d.budget, "steps per trial"),
    ];
    v.extend(growth_specs(&d.growth, &d.field));
    v
}

fn ymaze(params: &Params) -> Result<Outputs, CliError> {
    let mut p = YMazeParams {
        channel_width: params.f64("channel_width")?,
        stem_length: params.f64("stem_length")?,
        arm_length: params.f64("arm_length")?,
        slope: params.f64("slope")?,
        budget: params.usize("budget")?,
        ..YMazeParams::default()
    };
    apply_growth(params, &mut p.growth, &mut p.field)?;
    let outcome = solve_ymaze(
        params.f64("attractant_left")?,
        params.f64("attractant_right")?,
        params.usize("trials")?,
        &p,
        params.u64("seed")?,
    )?;
    let mut out = Outputs::default();
    let mut csv = String::from("trial,choice\n");
    for (i, c) in outcome.choices.iter().enumerate() {
        let _ = writeln!(csv, "{i},{}", c.as_str());
    }
    out.file("choices.csv", csv);
    let (l, r, u) = (
        outcome.count(ArmChoice::Left),
        outcome.count(ArmChoice::Right),
        outcome.count(ArmChoice::Undecided),
    );
    let summary = format!(
        "trials,left,right,undecided,fraction_left\n{},{l},{r},{u},{}\n",
        outcome.choices.len(),
        outcome.fraction_left()
    );
    out.say(format!("left={l} right={r} undecided={u} fraction_left={}", outcome.fraction_left()));
    out.file("summary.csv", summary);
    Ok(out)
}

fn maze_params() -> Vec<ParamSpec> {
    let d = MazeParams::default();
    let mut v = vec![
        value("seed", 0, "maze and growth seed"),
        value("n", 10, "maze size in rooms per side"),
        value("budget", "auto", "step budget or auto"),
    ];
    v.extend(growth_specs(&d.growth, &d.field));
    v
}

fn maze(params: &Params) -> Result<Outputs, CliError> {
    let seed = params.u64("seed")?;
    let n = params.usize("n")?;
    let mut p = MazeParams {
        budget: params.auto_usize("budget")?,
        ..MazeParams::default()
    };
    apply_growth(params, &mut p.growth, &mut p.field)?;
    p.growth.rng_seed = seed;
    let terrain = generate_maze(n, seed)?;
    let (src, dst) = maze_endpoints(n);
    let outcome = solve_maze(&terrain, src, dst, &p)?;
    let best = dijkstra(&terrain, src, dst)?;
    let mut out = Outputs::default();
    out.file("maze.txt", terrain.to_ascii());
    let mut metrics = String::from("solved,reason,steps,length,oracle_length,ratio,path_valid\n");
    let oracle = best.as_ref().map_or(f64::NAN, |b| b.length);
    match &outcome {
        MazeOutcome::Solved { path, length, steps, .. } => {
            let valid = path.first() == Some(&src)
                && path.last() == Some(&dst)
                && path.windows(2).all(|w| is_legal_move(&terrain, w[0], w[1]));
            let mut csv = String::from("x,y\n");
            for (x, y) in path {
                let _ = writeln!(csv, "{x},{y}");
            }
            out.file("path.csv", csv);
            let _ = writeln!(metrics, "true,-,{steps},{length},{oracle},{},{valid}", length / oracle);
            out.say(format!("solved length={length} oracle={oracle} ratio={}", length / oracle));
        }
        MazeOutcome::Stuck { reason, steps, .. } => {
            let _ = writeln!(metrics, "false,{},{steps},,{oracle},,", reason.as_str());
            out.say(format!("stuck: {}", reason.as_str()));
        }
    }
    out.file("metrics.csv", metrics);
    let network = RootNetwork {
        trails: vec![Trail {
            root_id: 0,
            parent_id: None,
            points: outcome.trail().to_vec(),
            state: if outcome.is_solved() {
                rhizome::grower::ApexState::Exited
            } else {
                rhizome::grower::ApexState::Stopped
            },
        }],
    };
    out.file("trail.csv", network.to_csv());
    out.file(
        "maze.svg",
        render_svg(&Artifact::Network {
            network: &network,
            terrain: Some(&terrain),
        }),
    );
    Ok(out)
}

fn voronoi_params() -> Vec<ParamSpec> {
    vec![
        value("seed", 0, "seed for random sites"),
        value("sites", 5, "number of random sites when no file is given"),
        path("seeds", "CSV of sites (x,y)"),
        value("domain", "256x256", "grid size WxH"),
        path("mask", "ASCII obstacle mask; overrides the domain size"),
    ]
}

fn voronoi(params: &Params) -> Result<Outputs, CliError> {
    let terrain = match params.optional_path("mask") {
        Some(p) => Terrain::from_ascii(&read(&p)?)?,
        None => {
            let (w, h) = params.dims("domain")?;
            Terrain::open(w, h)
        }
    };
    let (w, h) = (terrain.width() as f64, terrain.height() as f64);
    let sites = match params.optional_path("seeds") {
        Some(p) => read_points_csv(&read(&p)?)?,
        None => random_points(params.usize("sites")?, w, h, params.u64("seed")?),
    };
    let set = PointSet::in_domain(sites.clone(), w, h)?;
    let mut front = VoronoiFront::new(&set, &terrain)?;
    // Label each cell received when it resolved; finality means it never changes.
    let mut first: BTreeMap<usize, Label> = BTreeMap::new();
    let mut final_ok = true;
    while !front.is_done() {
        let resolved = front.step();
        let snapshot = front.labeling();
        for i in resolved {
            if first.insert(i, snapshot.labels()[i]).is_some() {
                final_ok = false;
            }
        }
    }
    let labeling = front.labeling();
    final_ok &= first.iter().all(|(i, l)| labeling.labels()[*i] == *l);
    let oracle = exact_voronoi_label(&sites, &terrain);
    let agreement = labeling.agreement_with(&oracle);
    let mut out = Outputs::default();
    out.file("seeds.csv", write_points_csv(&sites));
    out.file("labeling.pgm", labeling.to_pgm());
    out.file("oracle.pgm", oracle.to_pgm());
    out.file(
        "agreement.csv",
        format!(
            "steps,claimed,boundary,unclaimed,agreement,final\n{},{},{},{},{agreement},{final_ok}\n",
            front.step_count(),
            labeling.claimed(),
            labeling.count(|l| l == Label::Boundary),
            labeling.count(|l| l == Label::Unclaimed)
        ),
    );
    out.file("voronoi.svg", render_svg(&Artifact::Labeling(&labeling)));
    out.say(format!("agreement={agreement} final={final_ok}"));
    Ok(out)
}

fn mst_params() -> Vec<ParamSpec> {
    let d = SpanningParams::default();
    let mut v = vec![
        value("seed", 0, "seed for random points and growth noise"),
        value("n", 10, "number of random points when no file is given"),
        path("points", "CSV of points (x,y); the first one seeds the root"),
        value("domain", "64x64", "bounds WxH of random points"),
        value("capture_radius", d.capture_radius, "distance at which a point is reached"),
        value("budget", "auto", "step budget or auto"),
    ];
    v.extend(growth_specs(&d.growth, &d.field));
    v
}

fn mst(params: &Params) -> Result<Outputs, CliError> {
    let (w, h) = params.dims("domain")?;
    let pts = load_points(params, w as f64, h as f64)?;
    let set = PointSet::in_domain(pts.clone(), w as f64, h as f64)?;
    let mut p = SpanningParams {
        capture_radius: params.f64("capture_radius")?,
        budget: params.auto_usize("budget")?,
        ..SpanningParams::default()
    };
    apply_growth(params, &mut p.growth, &mut p.field)?;
    p.growth.rng_seed = params.u64("seed")?;
    let o = approximate_spanning_tree(&set, &p)?;
    let tree = exact_mst(&pts)?;
    let mut out = Outputs::default();
    out.file("points.csv", write_points_csv(&pts));
    out.file("network.csv", o.network.to_csv());
    out.file(
        "network.svg",
        render_svg(&Artifact::Network {
            network: &o.network,
            terrain: None,
        }),
    );
    let mut edges = String::from("a,b,length\n");
    for (a, b, l) in &tree.edges {
        let _ = writeln!(edges, "{a},{b},{l}");
    }
    out.file("oracle_mst.csv", edges);
    let order: Vec<String> = o.visit_order.iter().map(|i| i.to_string()).collect();
    out.file(
        "metrics.csv",
        format!(
            "spans_all,total_length,mst_length,mst_ratio,visit_order\n{},{},{},{},{}\n",
            o.spans_all,
            o.total_length,
            o.mst_length,
            o.mst_ratio,
            order.join(" ")
        ),
    );
    out.say(format!("spans_all={} mst_ratio={}", o.spans_all, o.mst_ratio));
    Ok(out)
}

fn hull_params() -> Vec<ParamSpec> {
    vec![
        value("seed", 0, "seed for random points"),
        value("n", 100, "number of random points, kept 1/alpha from the edges"),
        path("points", "CSV of points (x,y)"),
        value("domain", "64x64", "point-set bounds WxH"),
        value("alpha", 0.1, "inverse disc radius"),
        value("cell_size", 0.5, "raster resolution"),
    ]
}

fn hull(params: &Params) -> Result<Outputs, CliError> {
    let (w, h) = params.dims("domain")?;
    let (w, h) = (w as f64, h as f64);
    let hp = HullParams {
        alpha: params.f64("alpha")?,
        cell_size: params.f64("cell_size")?,
    };
    // The front needs room at the domain edge, so random points keep a margin.
    let pts = match params.optional_path("points") {
        Some(p) => read_points_csv(&read(&p)?)?,
        None => {
            let m = (1.0 / hp.alpha + hp.cell_size).min(w / 4.0).min(h / 4.0);
            random_points(params.usize("n")?, w - 2.0 * m, h - 2.0 * m, params.u64("seed")?)
                .into_iter()
                .map(|p| Point::new(p.x + m, p.y + m))
                .collect()
        }
    };
    let set = PointSet::in_domain(pts.clone(), w, h)?;
    let r = approximate_hull(&set, &hp)?;
    let convex = convex_hull(&pts).ok();
    let convex_area = convex.as_deref().map_or(0.0, signed_area);
    let mut out = Outputs::default();
    out.file("points.csv", write_points_csv(&pts));
    out.file("hull.csv", write_points_csv(&r.polygon));
    out.file(
        "metrics.csv",
        format!(
            "alpha,area,vertices,convex_area\n{},{},{},{convex_area}\n",
            hp.alpha,
            r.area,
            r.polygon.len()
        ),
    );
    out.file(
        "hull.svg",
        render_svg(&Artifact::Polygons {
            points: &pts,
            polygons: std::slice::from_ref(&r.polygon),
        }),
    );
    out.say(format!("area={} vertices={}", r.area, r.polygon.len()));
    Ok(out)
}

fn subdivide_params() -> Vec<ParamSpec> {
    let d = SubdivideParams::default();
    vec![
        value("shape", "plus", "built-in polygon: plus or l"),
        path("polygon", "CSV of polygon vertices (x,y), counterclockwise; overrides shape"),
        value("angular_resolution", d.angular_resolution, "turn step, radians"),
        value("eps", d.eps, "vertex snapping distance"),
    ]
}

fn builtin_shape(name: &str) -> Result<Vec<Point>, CliError> {
    let v: &[(f64, f64)] = match name {
        "plus" => &[
            (2.0, 0.0),
            (4.0, 0.0),
            (4.0, 2.0),
            (6.0, 2.0),
            (6.0, 4.0),
            (4.0, 4.0),
            (4.0, 6.0),
            (2.0, 6.0),
            (2.0, 4.0),
            (0.0, 4.0),
            (0.0, 2.0),
            (2.0, 2.0),
        ],
        "l" | "L" => &[(0.0, 0.0), (4.0, 0.0), (4.0, 2.0), (2.0, 2.0), (2.0, 4.0), (0.0, 4.0)],
        other => return Err(usage(format!("unknown shape {other:?}; expected plus or l"))),
    };
    Ok(v.iter().map(|&(x, y)| Point::new(x, y)).collect())
}

fn subdivide(params: &Params) -> Result<Outputs, CliError> {
    let poly = match params.optional_path("polygon") {
        Some(p) => read_points_csv(&read(&p)?)?,
        None => builtin_shape(params.str("shape"))?,
    };
    let sp = SubdivideParams {
        angular_resolution: params.f64("angular_resolution")?,
        eps: params.f64("eps")?,
    };
    let regions = subdivide_polygon(&poly, &sp)?;
    let mut csv = String::from("region,vertex,x,y\n");
    for (i, r) in regions.iter().enumerate() {
        for (k, p) in r.polygon.iter().enumerate() {
            let _ = writeln!(csv, "{i},{k},{},{}", p.x, p.y);
        }
    }
    let total: f64 = regions.iter().map(|r| r.area).sum();
    let convex = regions.iter().all(|r| is_convex_with_tolerance(&r.polygon, 1e-6));
    let mut out = Outputs::default();
    out.file("regions.csv", csv);
    out.file(
        "metrics.csv",
        format!(
            "regions,total_area,polygon_area,all_convex\n{},{total},{},{convex}\n",
            regions.len(),
            signed_area(&poly)
        ),
    );
    let polys: Vec<Vec<Point>> = regions.iter().map(|r| r.polygon.clone()).collect();
    out.file(
        "regions.svg",
        render_svg(&Artifact::Polygons {
            points: &poly,
            polygons: &polys,
        }),
    );
    out.say(format!("regions={} area={total}", regions.len()));
    Ok(out)
}

fn gate_params(with_inputs: bool) -> Vec<ParamSpec> {
    let mut v = vec![
        value("layout", "humidity", "built-in layout: humidity, gravity or half_adder"),
        path("layout_file", "layout text file; overrides the built-in choice"),
    ];
    if with_inputs {
        v.push(value("inputs", "1,1", "input bits in layout input order"));
    }
    v
}

fn load_layout(params: &Params) -> Result<ChannelLayout, CliError> {
    match params.optional_path("layout_file") {
        Some(p) => Ok(ChannelLayout::parse(&read(&p)?)?),
        None => Ok(builtin_layout(BuiltinLayout::parse(params.str("layout"))?)),
    }
}

fn parse_bits(s: &str, labels: &[String]) -> Result<Vec<bool>, CliError> {
    let bits: Vec<bool> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t {
            "1" | "true" => Ok(true),
            "0" | "false" => Ok(false),
            _ => Err(usage(format!("bad input bit {t:?}"))),
        })
        .collect::<Result<_, _>>()?;
    if bits.len() != labels.len() {
        return Err(usage(format!(
            "layout has {} inputs ({}), got {} bits",
            labels.len(),
            labels.join(","),
            bits.len()
        )));
    }
    Ok(bits)
}

fn gate(params: &Params) -> Result<Outputs, CliError> {
    let layout = load_layout(params)?;
    let labels = layout.inputs();
    let bits = parse_bits(params.str("inputs"), &labels)?;
    let assignment: Vec<(&str, bool)> = labels.iter().map(String::as_str).zip(bits).collect();
    let result = evaluate_layout(&layout, &assignment)?;
    let mut out = Outputs::default();
    let mut csv = String::from("output,value\n");
    let mut line = Vec::new();
    for (l, b) in &result.outputs {
        let _ = writeln!(csv, "{l},{}", *b as u8);
        line.push(format!("{l}={}", *b as u8));
    }
    out.say(line.join(" "));
    out.file("result.csv", csv);
    let mut trace = String::from("time,channel,root,kind\n");
    for e in &result.trace {
        let kind = match e.kind {
            OccupancyKind::Entered => "entered",
            OccupancyKind::Sealed => "sealed",
        };
        let _ = writeln!(trace, "{},{},{},{kind}", e.time, e.channel, e.root);
    }
    out.file("trace.csv", trace);
    out.file("layout.txt", layout.to_text());
    out.file(
        "gate.svg",
        render_svg(&Artifact::Layout {
            layout: &layout,
            result: Some(&result),
        }),
    );
    Ok(out)
}

fn truthtable(params: &Params) -> Result<Outputs, CliError> {
    let layout = load_layout(params)?;
    let table = truth_table(&layout)?;
    let mut out = Outputs::default();
    let csv = table.to_csv();
    out.stdout.push_str(&csv);
    out.file("truth_table.csv", csv);
    out.file("layout.txt", layout.to_text());
    out.file(
        "layout.svg",
        render_svg(&Artifact::Layout {
            layout: &layout,
            result: None,
        }),
    );
    Ok(out)
}

fn amplifier(params: &Params) -> Result<Outputs, CliError> {
    let cfg = AmplifierConfig {
        r0: params.f64("r0")?,
        r1: params.f64("r1")?,
        r2: params.f64("r2")?,
        v1: params.f64("v1")?,
        v2: params.f64("v2")?,
    };
    let v0 = sum_amplifier(&cfg)?;
    let (a, b) = cfg.gains();
    let mut out = Outputs::default();
    out.file(
        "amplifier.csv",
        format!(
            "r0,r1,r2,v1,v2,a,b,v0\n{},{},{},{},{},{a},{b},{v0}\n",
            cfg.r0, cfg.r1, cfg.r2, cfg.v1, cfg.v2
        ),
    );
    out.say(format!("v0={v0} a={a} b={b}"));
    Ok(out)
}

fn netlist(params: &Params) -> Result<Outputs, CliError> {
    let net = Netlist::parse(&read(&required_path(params, "netlist")?)?)?;
    let sol = solve_resistor_network(&net)?;
    let mut out = Outputs::default();
    out.stdout.push_str(&sol.to_csv());
    out.file("voltages.csv", sol.to_csv());
    let mut cur = String::from("a,b,ohms,amps\n");
    for (r, i) in net.resistors.iter().zip(&sol.currents) {
        let _ = writeln!(cur, "{},{},{},{i}", r.a, r.b, r.ohms);
    }
    out.file("currents.csv", cur);
    out.file(
        "summary.csv",
        format!("ground_current,residual\n{},{}\n", sol.ground_current, sol.residual),
    );
    Ok(out)
}

fn memristor(params: &Params) -> Result<Outputs, CliError> {
    let mut out = Outputs::default();
    match params.str("mode") {
        "trace" => {
            let trace = hysteresis_trace(
                MemristorState::with_w(params.f64("w0")?),
                params.f64("amplitude")?,
                params.f64("frequency")?,
                params.usize("periods")?,
                params.usize("samples")?,
            )?;
            let last = trace.last().map_or(0.0, |p| p.w);
            out.file("trace.csv", trace_to_csv(&trace));
            out.say(format!("samples={} final_w={last}", trace.len()));
        }
        mode @ ("imply" | "nand") => {
            let mut csv = String::from("p,q,out\n");
            for (p, q) in [(false, false), (false, true), (true, false), (true, true)] {
                let r = if mode == "imply" { imply_gate(p, q)? } else { nand_gate(p, q)? };
                let _ = writeln!(csv, "{},{},{}", p as u8, q as u8, r as u8);
            }
            out.stdout.push_str(&csv);
            out.file(&format!("{mode}.csv"), csv);
        }
        other => return Err(usage(format!("unknown memristor mode {other:?}; expected trace, imply or nand"))),
    }
    Ok(out)
}

fn mine_params() -> Vec<ParamSpec> {
    let d = MiningProtocol::default();
    let freqs: Vec<String> = d.frequencies.iter().map(u32::to_string).collect();
    vec![
        value("material_seed", 42, "seed of the random material"),
        value("material", "random", "random, planted_xor or constant_low"),
        value("frequencies", freqs.join(","), "square-wave frequencies, Hz"),
        value("amplitude", d.amplitude, "square-wave amplitude, volts"),
        value("window", d.window, "recording window, seconds"),
        value("threshold", d.threshold, "digital threshold, volts"),
        value("series_resistor", d.series_resistor, "series resistor on every input, ohms"),
        value("invert_output", d.invert_output, "complement every output bit"),
        value("gate", 7, "gate id broken down per frequency pair"),
    ]
}

fn mine(params: &Params) -> Result<Outputs, CliError> {
    let frequencies = params
        .str("frequencies")
        .split(',')
        .map(|f| f.trim().parse::<u32>().map_err(|_| usage(format!("bad frequency {f:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let protocol = MiningProtocol {
        frequencies,
        amplitude: params.f64("amplitude")?,
        window: params.f64("window")?,
        threshold: params.f64("threshold")?,
        series_resistor: params.f64("series_resistor")?,
        invert_output: params.bool("invert_output")?,
    };
    let material = match params.str("material") {
        "random" => SyntheticMaterial::random(params.u64("material_seed")?),
        "planted_xor" => SyntheticMaterial::planted_xor(),
        "constant_low" => SyntheticMaterial::constant_low(),
        other => return Err(usage(format!("unknown material {other:?}"))),
    };
    let gate: u8 = params.parse("gate")?;
    if !(1..=16).contains(&gate) {
        return Err(usage("gate id must be in 1..=16"));
    }
    let result = mine_gates(&material, &protocol)?;
    let (census, breakdown) = census_report(&result, gate);
    let mut out = Outputs::default();
    out.say(format!("total={}", result.census.total()));
    out.stdout.push_str(&census);
    out.file("census.csv", census);
    out.file("breakdown.csv", breakdown);
    Ok(out)
}

/// Grey levels back to labels: 0 unclaimed, the maximum boundary, other
/// levels seeds in increasing order.
fn labeling_from_pgm(data: &[u8]) -> Result<Labeling, CliError> {
    let img = read_pgm(data)?;
    let mut levels: Vec<u16> = img
        .pixels
        .iter()
        .copied()
        .filter(|&v| v != 0 && v != img.max_value)
        .collect();
    levels.sort_unstable();
    levels.dedup();
    let labels = img
        .pixels
        .iter()
        .map(|&v| {
            if v == 0 {
                Label::Unclaimed
            } else if v == img.max_value {
                Label::Boundary
            } else {
                Label::Seed(levels.binary_search(&v).expect("level collected above"))
            }
        })
        .collect();
    Ok(Labeling::new(img.width, img.height, labels))
}

fn render(params: &Params) -> Result<Outputs, CliError> {
    let input = required_path(params, "input")?;
    let kind = match params.str("kind") {
        "auto" => match input.extension().and_then(|e| e.to_str()) {
            Some("csv") => "network",
            Some("pgm") => "labeling",
            _ => "layout",
        },
        k => k,
    };
    let svg = match kind {
        "network" => {
            let net = RootNetwork::from_csv(&read(&input)?)?;
            render_svg(&Artifact::Network {
                network: &net,
                terrain: None,
            })
        }
        "labeling" => {
            let data = std::fs::read(&input).map_err(|e| CliError::Io(input.display().to_string(), e))?;
            render_svg(&Artifact::Labeling(&labeling_from_pgm(&data)?))
        }
        "layout" => {
            let layout = ChannelLayout::parse(&read(&input)?)?;
            let bits = params.str("inputs");
            let result = if bits.is_empty() {
                None
            } else {
                let labels = layout.inputs();
                let b = parse_bits(bits, &labels)?;
                let a: Vec<(&str, bool)> = labels.iter().map(String::as_str).zip(b).collect();
                Some(evaluate_layout(&layout, &a)?)
            };
            render_svg(&Artifact::Layout {
                layout: &layout,
                result: result.as_ref(),
            })
        }
        other => return Err(usage(format!("unknown artifact kind {other:?}"))),
    };
    let mut out = Outputs::default();
    out.file("render.svg", svg);
    Ok(out)
}

fn grow(params: &Params) -> Result<Outputs, CliError> {
    let file = required_path(params, "scenario")?;
    let base = file.parent().unwrap_or(Path::new("."));
    let scenario = Scenario::parse(&read(&file)?, base)?;
    let net = run_growth(&scenario)?;
    let mut out = Outputs::default();
    out.file("network.csv", net.to_csv());
    out.file(
        "network.svg",
        render_svg(&Artifact::Network {
            network: &net,
            terrain: Some(&scenario.terrain),
        }),
    );
    out.file(
        "metrics.csv",
        format!(
            "trails,total_length,forest\n{},{},{}\n",
            net.trails.len(),
            net.total_length(),
            net.is_forest()
        ),
    );
    out.say(format!("trails={} total_length={}", net.trails.len(), net.total_length()));
    Ok(out)
}


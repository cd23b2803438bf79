//! Deterministic SVG rendering. Coordinates are written with three decimals
//! and elements are emitted in a fixed order, so equal inputs give equal bytes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use rhizome::channelgates::{ChannelLayout, Endpoint, GateResult, OccupancyKind};
use rhizome::field::Terrain;
use rhizome::geometry::Point;
use rhizome::geomtasks::{Label, Labeling};
use rhizome::grower::RootNetwork;

pub const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

const SCALE: f64 = 4.0;

pub enum Artifact<'a> {
    Network {
        network: &'a RootNetwork,
        terrain: Option<&'a Terrain>,
    },
    Labeling(&'a Labeling),
    Layout {
        layout: &'a ChannelLayout,
        result: Option<&'a GateResult>,
    },
    /// Point cloud with outlines, e.g. hulls or subdivisions.
    Polygons {
        points: &'a [Point],
        polygons: &'a [Vec<Point>],
    },
}

fn header(w: f64, h: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">\n",
        (w * SCALE).ceil(),
        (h * SCALE).ceil()
    )
}

fn empty(what: &str) -> String {
    let mut s = header(40.0, 10.0);
    let _ = writeln!(s, "<text x=\"1\" y=\"6\" font-size=\"3\">empty {what}</text>");
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Horizontal runs of cells satisfying `pred`, as a path outline.
fn runs_path(w: usize, h: usize, pred: impl Fn(usize, usize) -> bool) -> String {
    let mut d = String::new();
    for y in 0..h {
        let mut x = 0;
        while x < w {
            if !pred(x, y) {
                x += 1;
                continue;
            }
            let start = x;
            while x < w && pred(x, y) {
                x += 1;
            }
            let _ = write!(d, "M{start} {y}h{}v1h-{}z", x - start, x - start);
        }
    }
    d
}

pub fn render_svg(artifact: &Artifact) -> String {
    match artifact {
        Artifact::Network { network, terrain } => network_svg(network, *terrain),
        Artifact::Labeling(l) => labeling_svg(l),
        Artifact::Layout { layout, result } => layout_svg(layout, *result),
        Artifact::Polygons { points, polygons } => polygons_svg(points, polygons),
    }
}

fn network_svg(net: &RootNetwork, terrain: Option<&Terrain>) -> String {
    let pts = net.trails.iter().flat_map(|t| t.points.iter());
    if net.is_empty() && terrain.is_none() {
        return empty("network");
    }
    let (w, h) = match terrain {
        Some(t) => (t.width() as f64, t.height() as f64),
        None => pts.fold((1.0f64, 1.0f64), |(w, h), p| (w.max(p.x + 1.0), h.max(p.y + 1.0))),
    };
    let mut s = header(w, h);
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    if let Some(t) = terrain {
        let d = runs_path(t.width(), t.height(), |x, y| t.is_obstacle(x, y));
        if !d.is_empty() {
            let _ = writeln!(s, "<path id=\"obstacles\" fill=\"#333333\" d=\"{d}\"/>");
        }
    }
    if net.is_empty() {
        s.push_str("<text x=\"1\" y=\"3\" font-size=\"2\">empty network</text>\n");
    }
    for t in &net.trails {
        if t.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (i, p) in t.points.iter().enumerate() {
            let _ = write!(d, "{}{:.3} {:.3}", if i == 0 { "M" } else { "L" }, p.x, p.y);
        }
        let _ = writeln!(
            s,
            "<path id=\"trail-{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"0.3\" d=\"{d}\"/>",
            t.root_id,
            PALETTE[t.root_id % PALETTE.len()]
        );
    }
    s.push_str("</svg>\n");
    s
}

fn labeling_svg(l: &Labeling) -> String {
    let (w, h) = (l.width(), l.height());
    if w == 0 || h == 0 {
        return empty("labeling");
    }
    let seeds: BTreeSet<usize> = l
        .labels()
        .iter()
        .filter_map(|x| match x {
            Label::Seed(i) => Some(*i),
            _ => None,
        })
        .collect();
    let mut s = header(w as f64, h as f64);
    for i in &seeds {
        let d = runs_path(w, h, |x, y| l.get(x, y) == Label::Seed(*i));
        let _ = writeln!(
            s,
            "<path id=\"region-{i}\" class=\"region\" fill=\"{}\" d=\"{d}\"/>",
            PALETTE[i % PALETTE.len()]
        );
    }
    // Boundary cells joined to their 8-neighbours, centre to centre.
    let mut d = String::new();
    for y in 0..h {
        for x in 0..w {
            if l.get(x, y) != Label::Boundary {
                continue;
            }
            let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
            let mut linked = false;
            for (dx, dy) in [(1i64, 0i64), (0, 1), (1, 1), (-1, 1)] {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                if l.get(nx as usize, ny as usize) == Label::Boundary {
                    let _ = write!(d, "M{cx:.1} {cy:.1}L{:.1} {:.1}", cx + dx as f64, cy + dy as f64);
                    linked = true;
                }
            }
            if !linked {
                let _ = write!(d, "M{:.1} {cy:.1}h0.4", cx - 0.2);
            }
        }
    }
    if !d.is_empty() {
        let _ = writeln!(
            s,
            "<path id=\"boundary\" class=\"boundary\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.5\" d=\"{d}\"/>"
        );
    }
    s.push_str("</svg>\n");
    s
}

fn layout_svg(layout: &ChannelLayout, result: Option<&GateResult>) -> String {
    if layout.channels.is_empty() {
        return empty("layout");
    }
    // Columns by hop count from the inputs.
    let mut nodes: BTreeSet<Endpoint> = BTreeSet::new();
    for c in &layout.channels {
        nodes.insert(c.from.clone());
        nodes.insert(c.to.clone());
    }
    let mut depth: BTreeMap<Endpoint, usize> = BTreeMap::new();
    let mut queue: VecDeque<Endpoint> = nodes.iter().filter(|n| matches!(n, Endpoint::Input(_))).cloned().collect();
    for n in &queue {
        depth.insert(n.clone(), 0);
    }
    while let Some(n) = queue.pop_front() {
        let d = depth[&n];
        for c in layout.channels.iter().filter(|c| c.from == n) {
            if !depth.contains_key(&c.to) {
                depth.insert(c.to.clone(), d + 1);
                queue.push_back(c.to.clone());
            }
        }
    }
    let max_depth = depth.values().copied().max().unwrap_or(0);
    for n in &nodes {
        if !depth.contains_key(n) {
            let d = if matches!(n, Endpoint::Output(_)) { max_depth + 1 } else { max_depth };
            depth.insert(n.clone(), d);
        }
    }
    let mut rows: BTreeMap<usize, usize> = BTreeMap::new();
    let mut pos: BTreeMap<Endpoint, Point> = BTreeMap::new();
    for n in &nodes {
        let d = depth[n];
        let r = rows.entry(d).or_insert(0);
        pos.insert(n.clone(), Point::new(10.0 + 30.0 * d as f64, 10.0 + 20.0 * *r as f64));
        *r += 1;
    }
    let w = 20.0 + 30.0 * depth.values().copied().max().unwrap_or(0) as f64 + 20.0;
    let h = 20.0 + 20.0 * (rows.values().copied().max().unwrap_or(1) - 1) as f64 + 10.0;

    let mut entered = BTreeSet::new();
    let mut sealed = BTreeSet::new();
    if let Some(r) = result {
        for e in &r.trace {
            match e.kind {
                OccupancyKind::Entered => entered.insert(e.channel.clone()),
                OccupancyKind::Sealed => sealed.insert(e.channel.clone()),
            };
        }
    }
    let mut s = header(w, h);
    let _ = writeln!(s, "<title>{}</title>", escape(&layout.name));
    for c in &layout.channels {
        let (a, b) = (pos[&c.from], pos[&c.to]);
        let (stroke, dash) = if entered.contains(&c.name) {
            ("#2b8a3e", "")
        } else if sealed.contains(&c.name) {
            ("#c92a2a", " stroke-dasharray=\"1 1\"")
        } else {
            ("#868e96", "")
        };
        let _ = writeln!(
            s,
            "<line id=\"channel-{}\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{stroke}\" stroke-width=\"0.8\"{dash}/>",
            escape(&c.name),
            a.x,
            a.y,
            b.x,
            b.y
        );
        let m = (a + b) * 0.5;
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"3\">{} ({})</text>",
            m.x,
            m.y - 1.0,
            escape(&c.name),
            c.length
        );
    }
    for (n, p) in &pos {
        let (fill, label) = match n {
            Endpoint::Input(l) => ("#4e79a7", format!("in {l}")),
            Endpoint::Output(l) => {
                let bit = result.and_then(|r| r.output(l)).map(|b| format!(" = {}", b as u8)).unwrap_or_default();
                ("#f28e2b", format!("out {l}{bit}"))
            }
            Endpoint::Junction(j) => ("#bab0ac", j.clone()),
        };
        let _ = writeln!(
            s,
            "<circle id=\"node-{}\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"2\" fill=\"{fill}\"/>",
            escape(&n.to_string()),
            p.x,
            p.y
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"3\">{}</text>",
            p.x - 2.0,
            p.y + 5.5,
            escape(&label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn polygons_svg(points: &[Point], polygons: &[Vec<Point>]) -> String {
    let all = points.iter().chain(polygons.iter().flatten());
    let mut any = false;
    let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in all {
        any = true;
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    if !any {
        return empty("geometry");
    }
    let pad = 1.0;
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let mut s = header(w, h);
    let _ = writeln!(s, "<g transform=\"translate({:.3} {:.3})\">", pad - lo.x, pad - lo.y);
    for (i, poly) in polygons.iter().enumerate() {
        let mut d = String::new();
        for (k, p) in poly.iter().enumerate() {
            let _ = write!(d, "{}{:.3} {:.3}", if k == 0 { "M" } else { "L" }, p.x, p.y);
        }
        d.push('z');
        let _ = writeln!(
            s,
            "<path id=\"polygon-{i}\" fill=\"{}\" fill-opacity=\"0.5\" stroke=\"#000000\" stroke-width=\"0.1\" d=\"{d}\"/>",
            PALETTE[i % PALETTE.len()]
        );
    }
    for p in points {
        let _ = writeln!(s, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"0.3\" fill=\"#000000\"/>", p.x, p.y);
    }
    s.push_str("</g>\n</svg>\n");
    s
}

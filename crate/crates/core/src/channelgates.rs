//! Collision-based root logic in channel networks.
//!
//! Roots are injected at the inputs that are true and grow through channels
//! at unit speed. A channel is occupied from the moment a tip enters it and
//! stays occupied (the root body remains). At a junction a root takes the
//! first free channel of its preference list; an entry may also seal other
//! channels of the junction, modelling a root body that crosses their mouth.
//! A root with no free channel stops.
//!
//! # Layout text format
//!
//! ```text
//! # comment
//! layout humidity
//! junction j
//! channel x in:x j 1        # name, from, to, length
//! channel y in:y j 2
//! channel p j out:p 1
//! channel q j out:q 1
//! prefer j x q/p p          # at j, a root from x takes q (sealing p), else p
//! prefer j y p q
//! ```
//!
//! Endpoints are `in:<label>`, `out:<label>` or a declared junction.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Arrivals closer than this are simultaneous.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Endpoint {
    Input(String),
    Output(String),
    Junction(String),
}

impl Endpoint {
    fn parse(s: &str) -> Self {
        if let Some(l) = s.strip_prefix("in:") {
            Endpoint::Input(l.to_string())
        } else if let Some(l) = s.strip_prefix("out:") {
            Endpoint::Output(l.to_string())
        } else {
            Endpoint::Junction(s.to_string())
        }
    }

    fn junction(&self) -> Option<&str> {
        match self {
            Endpoint::Junction(j) => Some(j),
            _ => None,
        }
    }
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endpoint::Input(l) => write!(f, "in:{l}"),
            Endpoint::Output(l) => write!(f, "out:{l}"),
            Endpoint::Junction(j) => f.write_str(j),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub name: String,
    pub from: Endpoint,
    pub to: Endpoint,
    pub length: f64,
}

/// One entry of a junction preference list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Choice {
    pub channel: String,
    /// Channels blocked as a side effect of taking `channel`.
    pub seals: Vec<String>,
}

impl Choice {
    pub fn to(channel: &str) -> Self {
        Choice {
            channel: channel.to_string(),
            seals: Vec::new(),
        }
    }

    pub fn sealing(channel: &str, seals: &[&str]) -> Self {
        Choice {
            channel: channel.to_string(),
            seals: seals.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelLayout {
    pub name: String,
    pub junctions: Vec<String>,
    pub channels: Vec<Channel>,
    /// Keyed by (junction, incoming channel).
    pub preferences: BTreeMap<(String, String), Vec<Choice>>,
}

impl ChannelLayout {
    pub fn new(name: &str) -> Self {
        ChannelLayout {
            name: name.to_string(),
            junctions: Vec::new(),
            channels: Vec::new(),
            preferences: BTreeMap::new(),
        }
    }

    pub fn junction(&mut self, j: &str) -> &mut Self {
        self.junctions.push(j.to_string());
        self
    }

    pub fn channel(&mut self, name: &str, from: &str, to: &str, length: f64) -> &mut Self {
        self.channels.push(Channel {
            name: name.to_string(),
            from: Endpoint::parse(from),
            to: Endpoint::parse(to),
            length,
        });
        self
    }

    pub fn prefer(&mut self, junction: &str, incoming: &str, choices: Vec<Choice>) -> &mut Self {
        self.preferences
            .insert((junction.to_string(), incoming.to_string()), choices);
        self
    }

    fn channel_by_name(&self, name: &str) -> Option<&Channel> {
        self.channels.iter().find(|c| c.name == name)
    }

    /// Input labels in order of first appearance.
    pub fn inputs(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.channels {
            if let Endpoint::Input(l) = &c.from {
                if !out.contains(l) {
                    out.push(l.clone());
                }
            }
        }
        out
    }

    /// Output labels in order of first appearance.
    pub fn outputs(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.channels {
            if let Endpoint::Output(l) = &c.to {
                if !out.contains(l) {
                    out.push(l.clone());
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Layout(m));
        let junctions: BTreeSet<&str> = self.junctions.iter().map(String::as_str).collect();
        if junctions.len() != self.junctions.len() {
            return bad("duplicate junction".into());
        }
        let mut names = BTreeSet::new();
        for c in &self.channels {
            if !names.insert(c.name.as_str()) {
                return bad(format!("duplicate channel `{}`", c.name));
            }
            if !(c.length > 0.0 && c.length.is_finite()) {
                return bad(format!("channel `{}` needs a positive length", c.name));
            }
            if matches!(c.from, Endpoint::Output(_)) || matches!(c.to, Endpoint::Input(_)) {
                return bad(format!("channel `{}` runs against its endpoints", c.name));
            }
            for end in [&c.from, &c.to] {
                if let Some(j) = end.junction() {
                    if !junctions.contains(j) {
                        return bad(format!("channel `{}` uses undeclared junction `{j}`", c.name));
                    }
                }
            }
            if let (Endpoint::Input(_), Endpoint::Output(_)) = (&c.from, &c.to) {
                return bad(format!("input channel `{}` reaches no junction", c.name));
            }
        }
        let mut outputs = BTreeSet::new();
        for c in &self.channels {
            if let Endpoint::Output(l) = &c.to {
                if !outputs.insert(l) {
                    return bad(format!("output `{l}` is fed by two channels"));
                }
            }
        }
        for j in &self.junctions {
            let outgoing: BTreeSet<&str> = self
                .channels
                .iter()
                .filter(|c| c.from.junction() == Some(j))
                .map(|c| c.name.as_str())
                .collect();
            let attached: BTreeSet<&str> = self
                .channels
                .iter()
                .filter(|c| c.from.junction() == Some(j) || c.to.junction() == Some(j))
                .map(|c| c.name.as_str())
                .collect();
            for c in self.channels.iter().filter(|c| c.to.junction() == Some(j)) {
                let Some(list) = self.preferences.get(&(j.clone(), c.name.clone())) else {
                    return bad(format!("no preference list at `{j}` for `{}`", c.name));
                };
                let listed: BTreeSet<&str> = list.iter().map(|ch| ch.channel.as_str()).collect();
                if listed.len() != list.len() {
                    return bad(format!("preference list at `{j}` for `{}` repeats a channel", c.name));
                }
                if listed != outgoing {
                    return bad(format!(
                        "preference list at `{j}` for `{}` must list exactly the outgoing channels",
                        c.name
                    ));
                }
                for s in list.iter().flat_map(|ch| &ch.seals) {
                    if !attached.contains(s.as_str()) {
                        return bad(format!("`{s}` sealed at `{j}` is not attached there"));
                    }
                }
            }
        }
        for (j, inc) in self.preferences.keys() {
            let ok = self.channel_by_name(inc).is_some_and(|c| c.to.junction() == Some(j));
            if !ok {
                return bad(format!("preference at `{j}` names `{inc}`, which does not end there"));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut layout = ChannelLayout::new("layout");
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let err = |m: &str| Error::parse(n + 1, m);
            match f[0] {
                "layout" if f.len() == 2 => layout.name = f[1].to_string(),
                "junction" if f.len() == 2 => {
                    layout.junction(f[1]);
                }
                "channel" if f.len() == 5 => {
                    let len: f64 = f[4].parse().map_err(|_| err("channel length must be a number"))?;
                    layout.channel(f[1], f[2], f[3], len);
                }
                "prefer" if f.len() >= 4 => {
                    let choices = f[3..]
                        .iter()
                        .map(|e| {
                            let mut parts = e.split('/');
                            let ch = parts.next().unwrap_or_default();
                            Choice::sealing(ch, &parts.collect::<Vec<_>>())
                        })
                        .collect();
                    layout.prefer(f[1], f[2], choices);
                }
                _ => return Err(err(&format!("unrecognised line {line:?}"))),
            }
        }
        layout.validate()?;
        Ok(layout)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "layout {}", self.name);
        for j in &self.junctions {
            let _ = writeln!(out, "junction {j}");
        }
        for c in &self.channels {
            let _ = writeln!(out, "channel {} {} {} {}", c.name, c.from, c.to, c.length);
        }
        for ((j, inc), list) in &self.preferences {
            let entries: Vec<String> = list
                .iter()
                .map(|c| std::iter::once(c.channel.as_str()).chain(c.seals.iter().map(String::as_str)).collect::<Vec<_>>().join("/"))
                .collect();
            let _ = writeln!(out, "prefer {j} {inc} {}", entries.join(" "));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OccupancyKind {
    Entered,
    Sealed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyEvent {
    pub time: f64,
    pub channel: String,
    pub root: usize,
    pub kind: OccupancyKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RootFate {
    Exited { output: String, time: f64 },
    Blocked { junction: String, time: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootRecord {
    pub input: String,
    /// Channels in the order the root grew through them.
    pub path: Vec<String>,
    /// (junction, arrival time) pairs.
    pub arrivals: Vec<(String, f64)>,
    pub fate: RootFate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateResult {
    /// Output labels with their bits, in layout order.
    pub outputs: Vec<(String, bool)>,
    pub roots: Vec<RootRecord>,
    /// Occupancy changes in time order.
    pub trace: Vec<OccupancyEvent>,
}

impl GateResult {
    pub fn output(&self, label: &str) -> Option<bool> {
        self.outputs.iter().find(|(l, _)| l == label).map(|(_, b)| *b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Arrival {
    time: f64,
    seq: usize,
    root: usize,
    channel: usize,
}

impl Eq for Arrival {}

impl Ord for Arrival {
    fn cmp(&self, o: &Self) -> Ordering {
        o.time.total_cmp(&self.time).then_with(|| o.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Arrival {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Runs the event simulation with the given input bits (by label).
pub fn evaluate_layout(layout: &ChannelLayout, inputs: &[(&str, bool)]) -> Result<GateResult> {
    layout.validate()?;
    let labels = layout.inputs();
    for (l, _) in inputs {
        if !labels.iter().any(|x| x == l) {
            return Err(Error::Unknown {
                kind: "input",
                name: l.to_string(),
            });
        }
    }
    for l in &labels {
        if !inputs.iter().any(|(x, _)| x == l) {
            return Err(Error::Layout(format!("no value given for input `{l}`")));
        }
    }
    let index: BTreeMap<&str, usize> = layout
        .channels
        .iter()
        .enumerate()
        .map(|(i, c)| (c.name.as_str(), i))
        .collect();
    let mut occupied = vec![false; layout.channels.len()];
    let mut trace = Vec::new();
    let mut roots: Vec<RootRecord> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    for (ci, c) in layout.channels.iter().enumerate() {
        let Endpoint::Input(l) = &c.from else { continue };
        let on = inputs.iter().any(|(x, b)| x == l && *b);
        if !on {
            continue;
        }
        let root = roots.len();
        roots.push(RootRecord {
            input: l.clone(),
            path: vec![c.name.clone()],
            arrivals: Vec::new(),
            fate: RootFate::Blocked {
                junction: String::new(),
                time: 0.0,
            },
        });
        occupied[ci] = true;
        trace.push(OccupancyEvent {
            time: 0.0,
            channel: c.name.clone(),
            root,
            kind: OccupancyKind::Entered,
        });
        heap.push(Arrival {
            time: c.length,
            seq,
            root,
            channel: ci,
        });
        seq += 1;
    }

    while let Some(ev) = heap.pop() {
        let ch = &layout.channels[ev.channel];
        match &ch.to {
            Endpoint::Output(l) => {
                roots[ev.root].fate = RootFate::Exited {
                    output: l.clone(),
                    time: ev.time,
                };
            }
            Endpoint::Junction(j) => {
                let clash = heap.iter().any(|o| {
                    (o.time - ev.time).abs() <= TIE_TOLERANCE
                        && layout.channels[o.channel].to.junction() == Some(j)
                });
                if clash {
                    return Err(Error::JunctionTie {
                        junction: j.clone(),
                        time: ev.time,
                    });
                }
                roots[ev.root].arrivals.push((j.clone(), ev.time));
                let list = &layout.preferences[&(j.clone(), ch.name.clone())];
                let pick = list.iter().find(|c| !occupied[index[c.channel.as_str()]]);
                match pick {
                    None => {
                        roots[ev.root].fate = RootFate::Blocked {
                            junction: j.clone(),
                            time: ev.time,
                        };
                    }
                    Some(choice) => {
                        let next = index[choice.channel.as_str()];
                        occupied[next] = true;
                        trace.push(OccupancyEvent {
                            time: ev.time,
                            channel: choice.channel.clone(),
                            root: ev.root,
                            kind: OccupancyKind::Entered,
                        });
                        for s in &choice.seals {
                            let si = index[s.as_str()];
                            if !occupied[si] {
                                occupied[si] = true;
                                trace.push(OccupancyEvent {
                                    time: ev.time,
                                    channel: s.clone(),
                                    root: ev.root,
                                    kind: OccupancyKind::Sealed,
                                });
                            }
                        }
                        roots[ev.root].path.push(choice.channel.clone());
                        heap.push(Arrival {
                            time: ev.time + layout.channels[next].length,
                            seq,
                            root: ev.root,
                            channel: next,
                        });
                        seq += 1;
                    }
                }
            }
            Endpoint::Input(_) => unreachable!("validated: channels never end at an input"),
        }
    }
    let outputs = layout
        .outputs()
        .into_iter()
        .map(|l| {
            let hit = roots
                .iter()
                .any(|r| matches!(&r.fate, RootFate::Exited { output, .. } if *output == l));
            (l, hit)
        })
        .collect();
    Ok(GateResult { outputs, roots, trace })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub inputs: [String; 2],
    pub outputs: Vec<String>,
    /// Rows in order 00, 01, 10, 11 (first input is the high bit).
    pub rows: Vec<([bool; 2], Vec<bool>)>,
}

impl TruthTable {
    /// Column of one output over the four rows.
    pub fn column(&self, output: &str) -> Option<[bool; 4]> {
        let k = self.outputs.iter().position(|o| o == output)?;
        Some([0, 1, 2, 3].map(|r| self.rows[r].1[k]))
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}", self.inputs[0], self.inputs[1]);
        for o in &self.outputs {
            let _ = write!(out, ",{o}");
        }
        out.push('\n');
        for (ins, outs) in &self.rows {
            let _ = write!(out, "{},{}", ins[0] as u8, ins[1] as u8);
            for b in outs {
                let _ = write!(out, ",{}", *b as u8);
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluates a two-input layout on all four input rows.
pub fn truth_table(layout: &ChannelLayout) -> Result<TruthTable> {
    let ins = layout.inputs();
    let [a, b] = ins.as_slice() else {
        return Err(Error::Layout(format!("truth tables need exactly 2 inputs, layout has {}", ins.len())));
    };
    let mut rows = Vec::with_capacity(4);
    for (x, y) in [(false, false), (false, true), (true, false), (true, true)] {
        let r = evaluate_layout(layout, &[(a, x), (b, y)])?;
        rows.push(([x, y], r.outputs.iter().map(|(_, v)| *v).collect()));
    }
    Ok(TruthTable {
        inputs: [a.clone(), b.clone()],
        outputs: layout.outputs(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinLayout {
    HumidityGate,
    GravityGate,
    HalfAdder,
}

impl BuiltinLayout {
    pub const ALL: [BuiltinLayout; 3] = [
        BuiltinLayout::HumidityGate,
        BuiltinLayout::GravityGate,
        BuiltinLayout::HalfAdder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinLayout::HumidityGate => "HUMIDITY_GATE",
            BuiltinLayout::GravityGate => "GRAVITY_GATE",
            BuiltinLayout::HalfAdder => "HALF_ADDER",
        }
    }

    /// Accepts the canonical names and short lowercase forms.
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().replace('-', "_").as_str() {
            "humidity_gate" | "humidity" => Ok(BuiltinLayout::HumidityGate),
            "gravity_gate" | "gravity" => Ok(BuiltinLayout::GravityGate),
            "half_adder" => Ok(BuiltinLayout::HalfAdder),
            _ => Err(Error::Unknown {
                kind: "layout",
                name: name.to_string(),
            }),
        }
    }
}

/// ⟨x, y⟩ → ⟨x̄y, x⟩. The x channel is the shorter one; the x root grows
/// straight on into q and its body closes the mouth of p.
fn humidity_gate() -> ChannelLayout {
    let mut l = ChannelLayout::new("humidity");
    l.junction("j")
        .channel("x", "in:x", "j", 1.0)
        .channel("y", "in:y", "j", 2.0)
        .channel("p", "j", "out:p", 1.0)
        .channel("q", "j", "out:q", 1.0)
        .prefer("j", "x", vec![Choice::sealing("q", &["p"]), Choice::to("p")])
        .prefer("j", "y", vec![Choice::to("p"), Choice::to("q")]);
    l
}

/// ⟨x, y⟩ → ⟨xy, x+y⟩: both roots head for q first; whoever arrives second
/// is deflected into p.
fn gravity_gate() -> ChannelLayout {
    let mut l = ChannelLayout::new("gravity");
    l.junction("j")
        .channel("x", "in:x", "j", 1.0)
        .channel("y", "in:y", "j", 2.0)
        .channel("p", "j", "out:p", 1.0)
        .channel("q", "j", "out:q", 1.0)
        .prefer("j", "x", vec![Choice::to("q"), Choice::to("p")])
        .prefer("j", "y", vec![Choice::to("q"), Choice::to("p")]);
    l
}

/// Half adder from two copies of a one-junction humidity-style gate
/// (inputs x, y; outputs p, q). The northern copy j1 sees x on its short
/// channel, the southern copy j4 sees y there. Their p outputs (x̄y and
/// xȳ) merge at j2 into p; their q outputs (x and y) meet at j3, where the
/// first root takes q and a second one r.
pub fn compose_half_adder(gate: &ChannelLayout) -> Result<ChannelLayout> {
    gate.validate()?;
    if gate.junctions.len() != 1 || gate.inputs() != ["x", "y"] || gate.outputs() != ["p", "q"] {
        return Err(Error::Layout(
            "half-adder composition needs a one-junction gate with inputs x, y and outputs p, q".into(),
        ));
    }
    let j = &gate.junctions[0];
    let mut ha = ChannelLayout::new("half_adder");
    for name in ["j1", "j2", "j3", "j4"] {
        ha.junction(name);
    }
    // (copy junction, input relabel, suffix, length of the q link)
    let copies = [("j1", ["x", "y"], "N", 3.0), ("j4", ["y", "x"], "S", 4.0)];
    for (junction, relabel, tag, q_len) in copies {
        let rename = |c: &str| -> String {
            match c {
                "p" | "q" => format!("c{}{}", &junction[1..], if c == "p" { 2 } else { 3 }),
                other => {
                    let k = if other == "x" { 0 } else { 1 };
                    format!("{}{tag}", relabel[k])
                }
            }
        };
        for c in &gate.channels {
            let (from, to, len) = match (&c.from, &c.to) {
                (Endpoint::Input(l), _) => {
                    let k = if l == "x" { 0 } else { 1 };
                    (format!("in:{}", relabel[k]), junction.to_string(), c.length)
                }
                (_, Endpoint::Output(l)) if l == "p" => (junction.to_string(), "j2".to_string(), c.length),
                (_, Endpoint::Output(_)) => (junction.to_string(), "j3".to_string(), q_len),
                _ => return Err(Error::Layout("gate channel is neither input nor output".into())),
            };
            ha.channel(&rename(&c.name), &from, &to, len);
        }
        for ((pj, inc), list) in &gate.preferences {
            debug_assert_eq!(pj, j);
            let list = list
                .iter()
                .map(|ch| Choice {
                    channel: rename(&ch.channel),
                    seals: ch.seals.iter().map(|s| rename(s)).collect(),
                })
                .collect();
            ha.prefer(junction, &rename(inc), list);
        }
    }
    ha.channel("p", "j2", "out:p", 1.0)
        .channel("q", "j3", "out:q", 1.0)
        .channel("r", "j3", "out:r", 1.0)
        .prefer("j2", "c12", vec![Choice::to("p")])
        .prefer("j2", "c42", vec![Choice::to("p")])
        .prefer("j3", "c13", vec![Choice::to("q"), Choice::to("r")])
        .prefer("j3", "c43", vec![Choice::to("q"), Choice::to("r")]);
    ha.validate()?;
    Ok(ha)
}

pub fn builtin_layout(which: BuiltinLayout) -> ChannelLayout {
    match which {
        BuiltinLayout::HumidityGate => humidity_gate(),
        BuiltinLayout::GravityGate => gravity_gate(),
        BuiltinLayout::HalfAdder => compose_half_adder(&humidity_gate()).expect("humidity gate composes"),
    }
}

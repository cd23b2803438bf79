//! Plant-electronics arithmetic: the root-wire transfer function, qualitative
//! nanomaterial effects, the summing amplifier, resistor networks by nodal
//! analysis and an idealised threshold memristor with IMPLY logic.
//!
//! # Netlist text format
//!
//! ```text
//! # comment
//! ground gnd
//! resistor a b 1e6      # nodes and ohms
//! source a 3            # node held at 3 V relative to ground
//! ```

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::TAU;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Inverting summing amplifier with an ideal op-amp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierConfig {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub v1: f64,
    pub v2: f64,
}

impl AmplifierConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, r) in [("R0", self.r0), ("R1", self.r1), ("R2", self.r2)] {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::config(format!("{name} must be a positive resistance")));
            }
        }
        if !(self.v1.is_finite() && self.v2.is_finite()) {
            return Err(Error::config("input voltages must be finite"));
        }
        Ok(())
    }

    /// Gains `(a, b) = (R0/R1, R0/R2)` of `z = a·x + b·y` with `v1 = −x`, `v2 = −y`.
    pub fn gains(&self) -> (f64, f64) {
        (self.r0 / self.r1, self.r0 / self.r2)
    }
}

/// `v0 = −(R0/R1·v1 + R0/R2·v2)`.
pub fn sum_amplifier(cfg: &AmplifierConfig) -> Result<f64> {
    cfg.validate()?;
    let (a, b) = cfg.gains();
    Ok(-(a * cfg.v1 + b * cfg.v2))
}

/// Typical resistance of an unmodified root segment, ohms.
pub const ROOT_WIRE_RESISTANCE: f64 = 3e6;
/// Band of the potential drop along a root wire, volts.
pub const WIRE_DROP_RANGE: (f64, f64) = (1.5, 2.0);

/// Output potential of a root wire: the input less the drop, never negative.
pub fn wire_transfer(v_in: f64, drop: f64) -> Result<f64> {
    if !(WIRE_DROP_RANGE.0..=WIRE_DROP_RANGE.1).contains(&drop) {
        return Err(Error::config(format!(
            "wire drop {drop} V outside [{}, {}] V",
            WIRE_DROP_RANGE.0, WIRE_DROP_RANGE.1
        )));
    }
    if !v_in.is_finite() {
        return Err(Error::config("input potential must be finite"));
    }
    Ok((v_in - drop).max(0.0))
}

/// Ordinal change of a measured property relative to untreated controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    StrongDown,
    Down,
    Unchanged,
    Up,
    StrongUp,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::StrongDown => "strong-down",
            Level::Down => "down",
            Level::Unchanged => "unchanged",
            Level::Up => "up",
            Level::StrongUp => "strong-up",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Material {
    Graphene,
    Cnt,
    CaPh,
    Ao,
}

impl Material {
    pub const ALL: [Material; 4] = [Material::Graphene, Material::Cnt, Material::CaPh, Material::Ao];

    pub fn name(self) -> &'static str {
        match self {
            Material::Graphene => "graphene",
            Material::Cnt => "CNT",
            Material::CaPh => "CaPh",
            Material::Ao => "AO",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "graphene" | "graphene-oxide" => Ok(Material::Graphene),
            "cnt" | "cnts" => Ok(Material::Cnt),
            "caph" | "calcium-phosphate" => Ok(Material::CaPh),
            "ao" | "aluminium-oxide" => Ok(Material::Ao),
            _ => Err(Error::Unknown {
                kind: "material",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MaterialEffect {
    pub potential: Level,
    pub resistance: Level,
    pub capacitance: Level,
}

/// Effect of loading seedlings with a nanomaterial.
pub fn material_effect(material: &str) -> Result<MaterialEffect> {
    use Level::*;
    let (potential, resistance, capacitance) = match Material::parse(material)? {
        Material::Graphene => (Down, StrongDown, Up),
        Material::Cnt => (Unchanged, Up, Unchanged),
        Material::CaPh => (StrongUp, Up, Down),
        Material::Ao => (Unchanged, Unchanged, Up),
    };
    Ok(MaterialEffect {
        potential,
        resistance,
        capacitance,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resistor {
    pub a: String,
    pub b: String,
    pub ohms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub ground: String,
    pub resistors: Vec<Resistor>,
    /// Nodes held at fixed potentials relative to ground.
    pub sources: Vec<(String, f64)>,
}

impl Netlist {
    pub fn new(ground: &str) -> Self {
        Netlist {
            ground: ground.to_string(),
            resistors: Vec::new(),
            sources: Vec::new(),
        }
    }

    pub fn resistor(&mut self, a: &str, b: &str, ohms: f64) -> &mut Self {
        self.resistors.push(Resistor {
            a: a.to_string(),
            b: b.to_string(),
            ohms,
        });
        self
    }

    pub fn source(&mut self, node: &str, volts: f64) -> &mut Self {
        self.sources.push((node.to_string(), volts));
        self
    }

    /// All node names, sorted.
    pub fn nodes(&self) -> BTreeSet<String> {
        let mut n = BTreeSet::new();
        n.insert(self.ground.clone());
        for r in &self.resistors {
            n.insert(r.a.clone());
            n.insert(r.b.clone());
        }
        for (s, _) in &self.sources {
            n.insert(s.clone());
        }
        n
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut ground = None;
        let mut net = Netlist::new("");
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(n + 1, format!("bad number {s:?}")));
            match f.as_slice() {
                ["ground", g] => ground = Some(g.to_string()),
                ["resistor" | "R", a, b, ohms] => {
                    net.resistor(a, b, num(ohms)?);
                }
                ["source" | "V", node, volts] => {
                    net.source(node, num(volts)?);
                }
                _ => return Err(Error::parse(n + 1, format!("unrecognised line {line:?}"))),
            }
        }
        net.ground = ground.ok_or_else(|| Error::config("netlist declares no ground node"))?;
        Ok(net)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("ground {}\n", self.ground);
        for r in &self.resistors {
            let _ = writeln!(out, "resistor {} {} {}", r.a, r.b, r.ohms);
        }
        for (n, v) in &self.sources {
            let _ = writeln!(out, "source {n} {v}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSolution {
    pub voltages: BTreeMap<String, f64>,
    /// Current through each resistor from `a` to `b`, amperes, in netlist order.
    pub currents: Vec<f64>,
    /// Current delivered by each source into the network, in netlist order.
    pub source_currents: Vec<f64>,
    /// Current flowing into the ground node.
    pub ground_current: f64,
    /// Largest KCL imbalance at a free node relative to the largest branch current.
    pub residual: f64,
}

impl NetworkSolution {
    pub fn voltage(&self, node: &str) -> Option<f64> {
        self.voltages.get(node).copied()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,volts\n");
        for (n, v) in &self.voltages {
            let _ = writeln!(out, "{n},{v}");
        }
        out
    }
}

/// Nodal analysis: potentials at free nodes solve Kirchhoff's current law.
pub fn solve_resistor_network(net: &Netlist) -> Result<NetworkSolution> {
    if net.sources.is_empty() {
        return Err(Error::config("netlist needs at least one source"));
    }
    for r in &net.resistors {
        if !(r.ohms > 0.0 && r.ohms.is_finite()) {
            return Err(Error::config(format!("resistor {}-{} needs positive ohms", r.a, r.b)));
        }
        if r.a == r.b {
            return Err(Error::config(format!("resistor {}-{} is shorted onto one node", r.a, r.b)));
        }
    }
    let mut fixed: BTreeMap<String, f64> = BTreeMap::new();
    fixed.insert(net.ground.clone(), 0.0);
    for (n, v) in &net.sources {
        if !v.is_finite() {
            return Err(Error::config(format!("source at {n} must be finite")));
        }
        if let Some(old) = fixed.insert(n.clone(), *v) {
            if old != *v {
                return Err(Error::config(format!("node {n} is held at two potentials")));
            }
        }
    }
    let nodes = net.nodes();
    let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in &net.resistors {
        adj.entry(&r.a).or_default().push(&r.b);
        adj.entry(&r.b).or_default().push(&r.a);
    }
    let mut reached: BTreeSet<&str> = fixed.keys().map(String::as_str).collect();
    let mut queue: VecDeque<&str> = reached.iter().copied().collect();
    while let Some(n) = queue.pop_front() {
        for &m in adj.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            if !fixed.contains_key(m) && reached.insert(m) {
                queue.push_back(m);
            }
        }
    }
    let floating: Vec<String> = nodes.iter().filter(|n| !reached.contains(n.as_str())).cloned().collect();
    if !floating.is_empty() {
        return Err(Error::SingularNetwork(floating));
    }

    let free: Vec<&String> = nodes.iter().filter(|n| !fixed.contains_key(*n)).collect();
    let idx: BTreeMap<&str, usize> = free.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let k = free.len();
    let mut g = DMatrix::<f64>::zeros(k, k);
    let mut rhs = DVector::<f64>::zeros(k);
    for r in &net.resistors {
        let c = 1.0 / r.ohms;
        match (idx.get(r.a.as_str()), idx.get(r.b.as_str())) {
            (Some(&i), Some(&j)) => {
                g[(i, i)] += c;
                g[(j, j)] += c;
                g[(i, j)] -= c;
                g[(j, i)] -= c;
            }
            (Some(&i), None) => {
                g[(i, i)] += c;
                rhs[i] += c * fixed[&r.b];
            }
            (None, Some(&j)) => {
                g[(j, j)] += c;
                rhs[j] += c * fixed[&r.a];
            }
            (None, None) => {}
        }
    }
    let x = if k == 0 {
        DVector::zeros(0)
    } else {
        g.clone()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::SingularNetwork(free.iter().map(|s| s.to_string()).collect()))?
    };
    let mut voltages: BTreeMap<String, f64> = fixed.clone();
    for (n, &i) in &idx {
        voltages.insert(n.to_string(), x[i]);
    }
    let currents: Vec<f64> = net
        .resistors
        .iter()
        .map(|r| (voltages[&r.a] - voltages[&r.b]) / r.ohms)
        .collect();
    let mut injected: BTreeMap<&str, f64> = BTreeMap::new();
    for (r, i) in net.resistors.iter().zip(&currents) {
        *injected.entry(&r.a).or_default() += i;
        *injected.entry(&r.b).or_default() -= i;
    }
    let scale = currents.iter().fold(0.0f64, |m, i| m.max(i.abs()));
    let residual = free
        .iter()
        .map(|n| injected.get(n.as_str()).copied().unwrap_or(0.0).abs())
        .fold(0.0, f64::max)
        / if scale > 0.0 { scale } else { 1.0 };
    let source_currents = net
        .sources
        .iter()
        .map(|(n, _)| injected.get(n.as_str()).copied().unwrap_or(0.0))
        .collect();
    let ground_current = -injected.get(net.ground.as_str()).copied().unwrap_or(0.0);
    Ok(NetworkSolution {
        voltages,
        currents,
        source_currents,
        ground_current,
        residual,
    })
}

/// Threshold memristor with linear drift of the conductance state `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemristorState {
    pub w: f64,
    pub r_on: f64,
    pub r_off: f64,
    pub v_t: f64,
    /// Drift of `w` per volt above threshold per second.
    pub mobility: f64,
}

impl Default for MemristorState {
    fn default() -> Self {
        MemristorState {
            w: 0.0,
            r_on: 1e6,
            r_off: 1e8,
            v_t: 1.0,
            mobility: 1e4,
        }
    }
}

impl MemristorState {
    pub fn with_w(w: f64) -> Self {
        MemristorState {
            w: w.clamp(0.0, 1.0),
            ..MemristorState::default()
        }
    }

    pub fn from_bit(b: bool) -> Self {
        MemristorState::with_w(if b { 1.0 } else { 0.0 })
    }

    pub fn resistance(&self) -> f64 {
        self.r_off + self.w * (self.r_on - self.r_off)
    }

    pub fn bit(&self) -> bool {
        self.w >= 0.5
    }
}

/// Applies voltage `v` (positive sets, negative resets) for `dt` seconds.
pub fn memristor_step(state: MemristorState, v: f64, dt: f64) -> MemristorState {
    let over = if v > state.v_t {
        v - state.v_t
    } else if v < -state.v_t {
        v + state.v_t
    } else {
        return state;
    };
    MemristorState {
        w: (state.w + state.mobility * over * dt).clamp(0.0, 1.0),
        ..state
    }
}

/// Voltages and timing of the IMPLY pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplyCircuit {
    pub v_cond: f64,
    pub v_set: f64,
    /// Load resistor from the shared node to ground.
    pub r_g: f64,
    pub pulse: f64,
    pub substeps: usize,
    /// Voltage of the reset (constant-false) pulse.
    pub v_reset: f64,
}

impl Default for ImplyCircuit {
    fn default() -> Self {
        ImplyCircuit {
            v_cond: 0.9,
            v_set: 1.4,
            r_g: 1e7,
            pulse: 1e-3,
            substeps: 1000,
            v_reset: -3.0,
        }
    }
}

/// One IMPLY pulse: P sits at `v_cond`, Q at `v_set`, both joined through
/// the load to ground. The circuit is re-solved every sub-step; `q` ends
/// as `¬p ∨ q`.
pub fn imply_step(
    p: MemristorState,
    q: MemristorState,
    circuit: &ImplyCircuit,
) -> Result<(MemristorState, MemristorState)> {
    let (mut p, mut q) = (p, q);
    let dt = circuit.pulse / circuit.substeps as f64;
    for _ in 0..circuit.substeps {
        let mut net = Netlist::new("gnd");
        net.resistor("vp", "n", p.resistance())
            .resistor("vq", "n", q.resistance())
            .resistor("n", "gnd", circuit.r_g)
            .source("vp", circuit.v_cond)
            .source("vq", circuit.v_set);
        let vn = solve_resistor_network(&net)?.voltages["n"];
        p = memristor_step(p, circuit.v_cond - vn, dt);
        q = memristor_step(q, circuit.v_set - vn, dt);
    }
    Ok((p, q))
}

/// Constant false: a strong reset pulse.
pub fn false_op(m: MemristorState, circuit: &ImplyCircuit) -> MemristorState {
    memristor_step(m, circuit.v_reset, circuit.pulse)
}

/// `p → q` on bits encoded as fully set or reset memristors.
pub fn imply_gate(p: bool, q: bool) -> Result<bool> {
    let (_, q) = imply_step(MemristorState::from_bit(p), MemristorState::from_bit(q), &ImplyCircuit::default())?;
    Ok(q.bit())
}

/// NAND from IMPLY and constant false: `s = 0; s = q → s; s = p → s`.
pub fn nand_gate(p: bool, q: bool) -> Result<bool> {
    let c = ImplyCircuit::default();
    let (pm, qm) = (MemristorState::from_bit(p), MemristorState::from_bit(q));
    let s = false_op(MemristorState::with_w(0.5), &c);
    let (_, s) = imply_step(qm, s, &c)?;
    let (_, s) = imply_step(pm, s, &c)?;
    Ok(s.bit())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub v: f64,
    pub i: f64,
    pub w: f64,
}

/// Drives a memristor with `amplitude·sin(2πft)` and records the current.
pub fn hysteresis_trace(
    start: MemristorState,
    amplitude: f64,
    frequency: f64,
    periods: usize,
    samples_per_period: usize,
) -> Result<Vec<TracePoint>> {
    if !(frequency > 0.0 && samples_per_period >= 4 && amplitude.is_finite()) {
        return Err(Error::config("sinusoid needs positive frequency and at least 4 samples per period"));
    }
    let dt = 1.0 / (frequency * samples_per_period as f64);
    let mut m = start;
    let mut out = Vec::with_capacity(periods * samples_per_period + 1);
    for k in 0..=periods * samples_per_period {
        let t = k as f64 * dt;
        let v = amplitude * (TAU * frequency * t).sin();
        out.push(TracePoint {
            t,
            v,
            i: v / m.resistance(),
            w: m.w,
        });
        m = memristor_step(m, v, dt);
    }
    Ok(out)
}

pub fn trace_to_csv(trace: &[TracePoint]) -> String {
    let mut out = String::from("t,v,i,w\n");
    for p in trace {
        let _ = writeln!(out, "{},{},{},{}", p.t, p.v, p.i, p.w);
    }
    out
}

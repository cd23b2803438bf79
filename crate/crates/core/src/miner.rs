//! Gate mining on a stimulated material: Boolean inputs are encoded as
//! square-wave frequencies on the input pins, the output pin is sampled and
//! thresholded, and every configuration of pins, context bits and frequency
//! pairs is enumerated into a census of the 16 two-input functions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Number of input pins; pin 0 is the output.
pub const INPUT_PINS: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct MiningProtocol {
    /// Candidate square-wave frequencies, Hz.
    pub frequencies: Vec<u32>,
    pub amplitude: f64,
    /// Recording window, seconds.
    pub window: f64,
    /// Samples strictly above this voltage are high.
    pub threshold: f64,
    /// Current-limiting resistor in series with every input pin, ohms.
    pub series_resistor: f64,
    /// Complement every mined output bit.
    pub invert_output: bool,
}

impl Default for MiningProtocol {
    fn default() -> Self {
        MiningProtocol {
            frequencies: vec![250, 500, 1000, 2500],
            amplitude: 3.3,
            window: 0.032,
            threshold: 0.75,
            series_resistor: 4700.0,
            invert_output: false,
        }
    }
}

impl MiningProtocol {
    pub fn validate(&self) -> Result<()> {
        if self.frequencies.len() < 2 || self.frequencies.contains(&0) {
            return Err(Error::config("need at least two positive frequencies"));
        }
        let mut f = self.frequencies.clone();
        f.sort_unstable();
        f.dedup();
        if f.len() != self.frequencies.len() {
            return Err(Error::config("frequencies must be distinct"));
        }
        if !(self.window > 0.0 && self.amplitude.is_finite() && self.threshold.is_finite()) {
            return Err(Error::config("window must be positive, amplitude and threshold finite"));
        }
        if !(self.series_resistor >= 0.0) {
            return Err(Error::config("series resistor must be non-negative"));
        }
        Ok(())
    }

    /// Ordered pairs (A, B) of distinct frequencies; A encodes false.
    pub fn frequency_pairs(&self) -> Vec<(u32, u32)> {
        let f = &self.frequencies;
        f.iter()
            .flat_map(|&a| f.iter().filter(move |&&b| b != a).map(move |&b| (a, b)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stimulus {
    /// Square wave with phase 0 (high during the first half period).
    Square(u32),
    Low,
}

/// A material answering with an output voltage to instantaneous pin voltages.
pub trait Material: Sync {
    /// `volts[i]` is the source voltage on input pin `i + 1`.
    fn respond(&self, volts: &[f64; INPUT_PINS], protocol: &MiningProtocol) -> f64;
}

/// Passes one input pin straight through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityMaterial {
    pub pin: usize,
}

impl Material for IdentityMaterial {
    fn respond(&self, volts: &[f64; INPUT_PINS], _: &MiningProtocol) -> f64 {
        volts[self.pin - 1]
    }
}

/// Static nonlinear mixer: `3.3·tanh(gain·(bias + Σ wᵢuᵢ + Σ wᵢⱼuᵢuⱼ))`,
/// with `uᵢ` the pin voltage after the series resistor divides it against
/// the material's input resistance, scaled to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticMaterial {
    pub linear: [f64; INPUT_PINS],
    /// Product weights; only entries with `i < j` are used.
    pub pairwise: [[f64; INPUT_PINS]; INPUT_PINS],
    pub bias: f64,
    pub gain: f64,
    pub input_resistance: f64,
}

impl SyntheticMaterial {
    /// Weights and bias uniform in [−1, 1] and [−0.5, 0.5], gain in [0.5, 3].
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut linear = [0.0; INPUT_PINS];
        for w in &mut linear {
            *w = rng.random_range(-1.0..=1.0);
        }
        let mut pairwise = [[0.0; INPUT_PINS]; INPUT_PINS];
        for i in 0..INPUT_PINS {
            for j in i + 1..INPUT_PINS {
                pairwise[i][j] = rng.random_range(-1.0..=1.0);
            }
        }
        SyntheticMaterial {
            linear,
            pairwise,
            bias: rng.random_range(-0.5..=0.5),
            gain: rng.random_range(0.5..=3.0),
            input_resistance: 47e3,
        }
    }

    /// Zero response to everything.
    pub fn constant_low() -> Self {
        SyntheticMaterial {
            linear: [0.0; INPUT_PINS],
            pairwise: [[0.0; INPUT_PINS]; INPUT_PINS],
            bias: 0.0,
            gain: 1.0,
            input_resistance: 47e3,
        }
    }

    /// `u₁ + u₂ − u₁u₂` through gain 2: high whenever pin 1 or pin 2 is high,
    /// so two in-phase equal waves give a 50% duty output and different
    /// frequencies a majority-high one.
    pub fn planted_xor() -> Self {
        let mut m = SyntheticMaterial::constant_low();
        m.linear[0] = 1.0;
        m.linear[1] = 1.0;
        m.pairwise[0][1] = -1.0;
        m.gain = 2.0;
        m
    }
}

impl Material for SyntheticMaterial {
    fn respond(&self, volts: &[f64; INPUT_PINS], protocol: &MiningProtocol) -> f64 {
        let atten = self.input_resistance / (self.input_resistance + protocol.series_resistor);
        let scale = if protocol.amplitude != 0.0 { atten / protocol.amplitude } else { 0.0 };
        let u = volts.map(|v| v * scale);
        let mut s = self.bias;
        for i in 0..INPUT_PINS {
            s += self.linear[i] * u[i];
            for j in i + 1..INPUT_PINS {
                s += self.pairwise[i][j] * u[i] * u[j];
            }
        }
        3.3 * (self.gain * s).tanh()
    }
}

/// Sampling rate for a stimulus set: twice the highest applied frequency,
/// or twice the highest protocol frequency when no pin is driven.
pub fn sampling_rate(stimuli: &[Stimulus], protocol: &MiningProtocol) -> u64 {
    let top = stimuli
        .iter()
        .filter_map(|s| match s {
            Stimulus::Square(f) => Some(*f),
            Stimulus::Low => None,
        })
        .max()
        .unwrap_or_else(|| protocol.frequencies.iter().copied().max().unwrap_or(1));
    2 * top as u64
}

/// Reads one output bit: the response is sampled at `t = k/fs` over the
/// window, each sample is high when strictly above the threshold, and the
/// bit is set when strictly more than half the samples are high.
pub fn sample_response(material: &dyn Material, stimuli: &[Stimulus], protocol: &MiningProtocol) -> Result<bool> {
    if stimuli.len() != INPUT_PINS {
        return Err(Error::config(format!(
            "stimuli must cover exactly {INPUT_PINS} input pins, got {}",
            stimuli.len()
        )));
    }
    if stimuli.contains(&Stimulus::Square(0)) {
        return Err(Error::config("square-wave frequency must be positive"));
    }
    let fs = sampling_rate(stimuli, protocol);
    let n = (protocol.window * fs as f64).floor() as u64;
    let mut high = 0u64;
    let mut volts = [0.0; INPUT_PINS];
    for k in 0..n {
        for (v, s) in volts.iter_mut().zip(stimuli) {
            *v = match *s {
                Stimulus::Square(f) if (k * f as u64) % fs < fs / 2 => protocol.amplitude,
                _ => 0.0,
            };
        }
        if material.respond(&volts, protocol) > protocol.threshold {
            high += 1;
        }
    }
    let bit = 2 * high > n;
    Ok(bit != protocol.invert_output)
}

/// Output bits for inputs (FF, FT, TF, TT).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable4(pub [bool; 4]);

impl TruthTable4 {
    pub fn complement(self) -> Self {
        TruthTable4(self.0.map(|b| !b))
    }

    /// The table of configuration `id` (1..=16).
    pub fn from_id(id: u8) -> Option<Self> {
        (1..=16)
            .contains(&id)
            .then(|| {
                let k = id - 1;
                TruthTable4([k & 1 != 0, k & 2 != 0, k & 4 != 0, k & 8 != 0])
            })
    }
}

const GATE_NAMES: [&str; 16] = [
    "Constant False",
    "x NOR y",
    "NOT x AND y",
    "NOT x",
    "x AND NOT y",
    "NOT y",
    "x XOR y",
    "x NAND y",
    "x AND y",
    "x XNOR y",
    "y",
    "NOT x OR y",
    "x",
    "x OR NOT y",
    "x OR y",
    "Constant True",
];

/// Configuration id (1..=16) in the order FF + 2·FT + 4·TF + 8·TT + 1.
pub fn classify_truth_table(tt: TruthTable4) -> (u8, &'static str) {
    let [ff, ft, tf, tt] = tt.0;
    let id = 1 + ff as u8 + 2 * ft as u8 + 4 * tf as u8 + 8 * tt as u8;
    (id, gate_name(id))
}

pub fn gate_name(id: u8) -> &'static str {
    GATE_NAMES[(id - 1) as usize]
}

/// Alternative spellings of gate names.
pub fn gate_aliases(id: u8) -> &'static [&'static str] {
    match id {
        12 => &["NOT x AND NOT y OR y"],
        _ => &[],
    }
}

/// Number of mined configurations per gate id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateCensus {
    pub counts: [u64; 16],
}

impl GateCensus {
    pub fn empty() -> Self {
        GateCensus { counts: [0; 16] }
    }

    pub fn count(&self, id: u8) -> u64 {
        self.counts[(id - 1) as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn add(&mut self, id: u8) {
        self.counts[(id - 1) as usize] += 1;
    }

    pub fn merge(&mut self, other: &GateCensus) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningResult {
    pub census: GateCensus,
    /// Census per (frequency A, frequency B).
    pub by_frequency: BTreeMap<(u32, u32), GateCensus>,
}

/// Number of configurations [`mine_gates`] enumerates.
pub fn configuration_count(protocol: &MiningProtocol) -> u64 {
    let n = protocol.frequencies.len() as u64;
    (INPUT_PINS * (INPUT_PINS - 1)) as u64 * (1 << (INPUT_PINS - 2)) * n * (n - 1)
}

/// Exhaustive search over ordered (x, y) pin pairs, the bits on the other
/// five pins and ordered frequency pairs. Every pin carries frequency A for
/// false and B for true.
pub fn mine_gates(material: &dyn Material, protocol: &MiningProtocol) -> Result<MiningResult> {
    protocol.validate()?;
    // One worker per frequency pair; the merge below is order independent.
    let pairs = protocol.frequency_pairs();
    let locals: Vec<Result<GateCensus>> = std::thread::scope(|scope| {
        let handles: Vec<_> = pairs
            .iter()
            .map(|&(a, b)| scope.spawn(move || mine_pair(material, protocol, a, b)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("mining worker panicked")).collect()
    });
    let mut census = GateCensus::empty();
    let mut by_frequency = BTreeMap::new();
    for (pair, local) in pairs.into_iter().zip(locals) {
        let local = local?;
        census.merge(&local);
        by_frequency.insert(pair, local);
    }
    Ok(MiningResult { census, by_frequency })
}

fn mine_pair(material: &dyn Material, protocol: &MiningProtocol, a: u32, b: u32) -> Result<GateCensus> {
    let mut local = GateCensus::empty();
    for xp in 0..INPUT_PINS {
        for yp in (0..INPUT_PINS).filter(|&p| p != xp) {
            let others: Vec<usize> = (0..INPUT_PINS).filter(|&p| p != xp && p != yp).collect();
            for context in 0u32..1 << others.len() {
                let mut stimuli = [Stimulus::Square(a); INPUT_PINS];
                for (bit, &p) in others.iter().enumerate() {
                    if context >> bit & 1 == 1 {
                        stimuli[p] = Stimulus::Square(b);
                    }
                }
                let mut bits = [false; 4];
                for (row, (x, y)) in [(false, false), (false, true), (true, false), (true, true)]
                    .into_iter()
                    .enumerate()
                {
                    stimuli[xp] = Stimulus::Square(if x { b } else { a });
                    stimuli[yp] = Stimulus::Square(if y { b } else { a });
                    bits[row] = sample_response(material, &stimuli, protocol)?;
                }
                local.add(classify_truth_table(TruthTable4(bits)).0);
            }
        }
    }
    Ok(local)
}

/// Census table with columns `cfg,FF,FT,TF,TT,count,gate`; zero rows omitted.
pub fn census_csv(census: &GateCensus) -> String {
    let mut out = String::from("cfg,FF,FT,TF,TT,count,gate\n");
    for id in 1..=16u8 {
        let c = census.count(id);
        if c == 0 {
            continue;
        }
        let t = TruthTable4::from_id(id).expect("id in range").0;
        let tf = |b: bool| if b { 'T' } else { 'F' };
        let _ = writeln!(
            out,
            "{id},{},{},{},{},{c},{}",
            tf(t[0]),
            tf(t[1]),
            tf(t[2]),
            tf(t[3]),
            gate_name(id)
        );
    }
    out
}

/// Count of one gate per frequency pair, `frequency_a,frequency_b,count`,
/// largest first; zero rows omitted.
pub fn frequency_csv(by_frequency: &BTreeMap<(u32, u32), GateCensus>, gate: u8) -> String {
    let mut rows: Vec<((u32, u32), u64)> = by_frequency
        .iter()
        .map(|(k, c)| (*k, c.count(gate)))
        .filter(|(_, c)| *c > 0)
        .collect();
    rows.sort_by(|x, y| y.1.cmp(&x.1).then(y.0.cmp(&x.0)));
    let mut out = String::from("frequency_a,frequency_b,count\n");
    for ((a, b), c) in rows {
        let _ = writeln!(out, "{a},{b},{c}");
    }
    out
}

/// Both report tables; the breakdown is for `gate` (XOR is id 7).
pub fn census_report(result: &MiningResult, gate: u8) -> (String, String) {
    (census_csv(&result.census), frequency_csv(&result.by_frequency, gate))
}

//! Discrete memoryless multiple access channels as explicit transition tables.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::prob::{index_labels, Axis, JointPmf, Pmf, ProbValue};

const ROW_TOLERANCE: f64 = 1e-12;

/// A `k`-sender, `r`-receiver channel `p(y_1..y_r | x_1..x_k)`.
///
/// Input and output tuples are flattened in mixed radix with the first
/// sender (receiver) most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    inputs: Vec<Vec<String>>,
    outputs: Vec<Vec<String>>,
    transition: Vec<f64>,
    /// Nonzero entries of each row with running cumulative mass, for sampling.
    support: Vec<Vec<(usize, f64)>>,
}

fn product_of(sizes: impl Iterator<Item = usize>) -> Result<usize> {
    sizes
        .into_iter()
        .try_fold(1usize, |acc, s| acc.checked_mul(s))
        .filter(|&n| n <= 1 << 28)
        .ok_or_else(|| Error::InvalidChannel("transition table too large".into()))
}

fn split_index(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for i in (0..radices.len()).rev() {
        out[i] = index % radices[i];
        index /= radices[i];
    }
    out
}

fn join_index(tuple: &[usize], radices: &[usize]) -> usize {
    tuple.iter().zip(radices).fold(0, |acc, (&s, &r)| acc * r + s)
}

impl ChannelSpec {
    pub fn new(inputs: Vec<Vec<String>>, outputs: Vec<Vec<String>>, transition: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() || outputs.is_empty() {
            return Err(Error::InvalidChannel("need at least one sender and one receiver".into()));
        }
        if inputs.iter().chain(&outputs).any(|a| a.is_empty()) {
            return Err(Error::InvalidChannel("empty alphabet".into()));
        }
        let nin = product_of(inputs.iter().map(Vec::len))?;
        let nout = product_of(outputs.iter().map(Vec::len))?;
        if nin.checked_mul(nout) != Some(transition.len()) {
            return Err(Error::InvalidChannel(format!(
                "table has {} entries, expected {nin} x {nout}",
                transition.len()
            )));
        }
        let mut support = Vec::with_capacity(nin);
        for (x, row) in transition.chunks(nout).enumerate() {
            if let Some(w) = row.iter().find(|w| !(0.0..=1.0).contains(*w)) {
                return Err(Error::InvalidChannel(format!("entry {w} outside [0, 1] in row {x}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::InvalidChannel(format!("row {x} sums to {sum}")));
            }
            let mut acc = 0.0;
            let s: Vec<(usize, f64)> = row
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(y, &w)| {
                    acc += w;
                    (y, acc)
                })
                .collect();
            support.push(s);
        }
        Ok(ChannelSpec {
            inputs,
            outputs,
            transition,
            support,
        })
    }

    /// Builds the table from the conditional output law of each input tuple.
    pub fn from_fn(
        inputs: Vec<Vec<String>>,
        outputs: Vec<Vec<String>>,
        f: impl Fn(&[usize]) -> Vec<f64>,
    ) -> Result<Self> {
        let in_radices: Vec<usize> = inputs.iter().map(Vec::len).collect();
        let nin = product_of(in_radices.iter().copied())?;
        let nout = product_of(outputs.iter().map(Vec::len))?;
        let mut transition = Vec::with_capacity(nin * nout);
        for x in 0..nin {
            let row = f(&split_index(x, &in_radices));
            if row.len() != nout {
                return Err(Error::InvalidChannel(format!(
                    "row of length {} for {nout} outputs",
                    row.len()
                )));
            }
            transition.extend(row);
        }
        Self::new(inputs, outputs, transition)
    }

    /// A single-receiver channel with independent rows drawn uniformly from
    /// the probability simplex.
    pub fn random<R: Rng + ?Sized>(input_sizes: &[usize], num_outputs: usize, rng: &mut R) -> Result<Self> {
        if num_outputs == 0 {
            return Err(Error::InvalidChannel("empty output alphabet".into()));
        }
        let inputs: Vec<Vec<String>> = input_sizes.iter().map(|&s| index_labels(s)).collect();
        let nin = product_of(input_sizes.iter().copied())?;
        let mut transition = Vec::with_capacity(nin * num_outputs);
        for _ in 0..nin {
            let mut row: Vec<f64> = (0..num_outputs).map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|w| *w /= total);
            let last = num_outputs - 1;
            row[last] = (1.0 - row[..last].iter().sum::<f64>()).max(0.0);
            transition.extend(row);
        }
        Self::new(inputs, vec![index_labels(num_outputs)], transition)
    }

    /// A channel whose output tuple is a function of the input tuple.
    pub fn deterministic(
        inputs: Vec<Vec<String>>,
        outputs: Vec<Vec<String>>,
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        let out_radices: Vec<usize> = outputs.iter().map(Vec::len).collect();
        let nout = product_of(out_radices.iter().copied())?;
        Self::from_fn(inputs, outputs, |x| {
            let mut row = vec![0.0; nout];
            let y = f(x);
            if y.len() == out_radices.len() && y.iter().zip(&out_radices).all(|(a, b)| a < b) {
                row[join_index(&y, &out_radices)] = 1.0;
            }
            row
        })
    }

    pub fn k(&self) -> usize {
        self.inputs.len()
    }

    pub fn r(&self) -> usize {
        self.outputs.len()
    }

    pub fn inputs(&self) -> &[Vec<String>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vec<String>] {
        &self.outputs
    }

    pub fn input_sizes(&self) -> Vec<usize> {
        self.inputs.iter().map(Vec::len).collect()
    }

    pub fn output_sizes(&self) -> Vec<usize> {
        self.outputs.iter().map(Vec::len).collect()
    }

    pub fn num_outputs(&self) -> usize {
        self.output_sizes().iter().product()
    }

    pub fn transition(&self) -> &[f64] {
        &self.transition
    }

    /// Conditional output law of one input tuple.
    pub fn row(&self, x: &[usize]) -> &[f64] {
        let n = self.num_outputs();
        let i = join_index(x, &self.input_sizes());
        &self.transition[i * n..(i + 1) * n]
    }

    pub fn prob(&self, x: &[usize], y: &[usize]) -> f64 {
        self.row(x)[join_index(y, &self.output_sizes())]
    }

    pub fn is_deterministic(&self) -> bool {
        self.support.iter().all(|s| s.len() == 1)
    }

    /// The single-receiver channel seen by receiver `i`.
    pub fn receiver(&self, i: usize) -> Result<ChannelSpec> {
        if i >= self.r() {
            return Err(Error::InvalidChannel(format!("no receiver {i}")));
        }
        let out_radices = self.output_sizes();
        let ni = out_radices[i];
        let nout = self.num_outputs();
        let mut transition = Vec::with_capacity(self.transition.len() / nout * ni);
        for row in self.transition.chunks(nout) {
            let mut marg = vec![0.0; ni];
            for (y, &w) in row.iter().enumerate() {
                marg[split_index(y, &out_radices)[i]] += w;
            }
            transition.extend(marg);
        }
        ChannelSpec::new(self.inputs.clone(), vec![self.outputs[i].clone()], transition)
    }

    /// Joint law of inputs (independent, with the given marginals) and outputs.
    /// Axes are `X1..Xk` followed by `Y` (one receiver) or `Y1..Yr`.
    pub fn joint(&self, input_pmfs: &[Pmf]) -> Result<JointPmf> {
        if input_pmfs.len() != self.k()
            || input_pmfs.iter().zip(&self.inputs).any(|(p, a)| p.len() != a.len())
        {
            return Err(Error::InvalidChannel("input pmfs do not match the input alphabets".into()));
        }
        let mut axes: Vec<Axis> = self
            .inputs
            .iter()
            .enumerate()
            .map(|(j, a)| Axis::new(&format!("X{}", j + 1), a.clone()))
            .collect();
        axes.extend(self.output_axes());
        let k = self.k();
        let out_radices = self.output_sizes();
        JointPmf::from_fn(axes, |t| {
            let px: f64 = input_pmfs.iter().zip(&t[..k]).map(|(p, &x)| p.prob(x)).product();
            if px == 0.0 {
                return 0.0;
            }
            px * self.row(&t[..k])[join_index(&t[k..], &out_radices)]
        })
    }

    pub fn output_axes(&self) -> Vec<Axis> {
        if self.r() == 1 {
            vec![Axis::new("Y", self.outputs[0].clone())]
        } else {
            self.outputs
                .iter()
                .enumerate()
                .map(|(i, a)| Axis::new(&format!("Y{}", i + 1), a.clone()))
                .collect()
        }
    }

    /// Virtual channel with inputs `u_j` and law `p(y | φ_1(u_1), ..., φ_k(u_k))`.
    pub fn transform(&self, maps: &TransformMap) -> Result<ChannelSpec> {
        if maps.maps.len() != self.k() {
            return Err(Error::InvalidChannel(format!(
                "{} maps for {} senders",
                maps.maps.len(),
                self.k()
            )));
        }
        for (j, (m, a)) in maps.maps.iter().zip(&self.inputs).enumerate() {
            if m.is_empty() || m.iter().any(|&x| x >= a.len()) {
                return Err(Error::InvalidChannel(format!(
                    "map for sender {} leaves the input alphabet",
                    j + 1
                )));
            }
        }
        let inputs: Vec<Vec<String>> = maps.maps.iter().map(|m| index_labels(m.len())).collect();
        Self::from_fn(inputs, self.outputs.clone(), |u| {
            let x: Vec<usize> = u.iter().zip(&maps.maps).map(|(&s, m)| m[s]).collect();
            self.row(&x).to_vec()
        })
    }

    /// Passes aligned input sequences through the channel, one output
    /// sequence per receiver.
    pub fn transmit<R: Rng + ?Sized>(&self, inputs: &[&[usize]], rng: &mut R) -> Result<Vec<Vec<usize>>> {
        if inputs.len() != self.k() {
            return Err(Error::DimensionMismatch(format!(
                "{} input sequences for {} senders",
                inputs.len(),
                self.k()
            )));
        }
        let n = inputs[0].len();
        if inputs.iter().any(|s| s.len() != n) {
            return Err(Error::DimensionMismatch("input sequences of unequal length".into()));
        }
        let in_radices = self.input_sizes();
        let out_radices = self.output_sizes();
        let mut out = vec![Vec::with_capacity(n); self.r()];
        let mut x = vec![0; self.k()];
        for i in 0..n {
            for (slot, (s, &r)) in x.iter_mut().zip(inputs.iter().zip(&in_radices)) {
                if s[i] >= r {
                    return Err(Error::InvalidChannel(format!("input symbol {} out of range", s[i])));
                }
                *slot = s[i];
            }
            let support = &self.support[join_index(&x, &in_radices)];
            let y = if support.len() == 1 {
                support[0].0
            } else {
                let u: f64 = rng.gen::<f64>() * support.last().unwrap().1;
                support
                    .iter()
                    .find(|(_, c)| u < *c)
                    .unwrap_or(support.last().unwrap())
                    .0
            };
            for (o, s) in out.iter_mut().zip(split_index(y, &out_radices)) {
                o.push(s);
            }
        }
        Ok(out)
    }
}

/// Per-sender symbol maps from a virtual alphabet into the physical one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformMap {
    pub maps: Vec<Vec<usize>>,
}

impl TransformMap {
    pub fn new(maps: Vec<Vec<usize>>) -> Self {
        TransformMap { maps }
    }

    /// The map `φ(u) = (least significant coefficient of u)` on GF(2^m),
    /// used by every sender. On GF(4) this sends 0, α to 0 and 1, α+1 to 1.
    pub fn parity(q: usize, k: usize) -> Self {
        TransformMap {
            maps: vec![(0..q).map(|u| u % 2).collect(); k],
        }
    }

    /// Pushes per-sender virtual pmfs through the maps.
    pub fn push_forward(&self, pmfs: &[Pmf], sizes: &[usize]) -> Result<Vec<Pmf>> {
        self.maps
            .iter()
            .zip(pmfs)
            .zip(sizes)
            .map(|((m, p), &size)| {
                let mut probs = vec![0.0; size];
                for (u, &x) in m.iter().enumerate() {
                    probs[x] += p.prob(u);
                }
                probs.iter_mut().for_each(|w| *w = w.min(1.0));
                Pmf::indexed(probs)
            })
            .collect()
    }
}

/// Channels from the worked examples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Builtin {
    /// `Y = X1 ⊕ X2`.
    BinaryAdder,
    /// `Y = X1 + X2` over the integers.
    BinaryErasure,
    /// `Y = (2X1 - 1) + Z (2X2 - 1)` with `Z ~ Bern(p)`.
    OnOffErasure { p: f64 },
    /// Receivers see the erasure MAC and the on-off erasure MAC.
    TwoReceiver { p: f64 },
    /// Receivers see the adder, the erasure MAC and the on-off erasure MAC.
    ComputeCommunicate { p: f64 },
}

/// Switching probability used by the multi-receiver examples.
pub const EXAMPLE_SWITCH_PROB: f64 = 2.0 / 3.0;

impl Builtin {
    /// Parses names like `binary_adder` or `onoff_erasure`, with optional parameter.
    pub fn parse(name: &str, p: Option<f64>) -> Result<Self> {
        let b = match name {
            "binary_adder" => Builtin::BinaryAdder,
            "binary_erasure" => Builtin::BinaryErasure,
            "onoff_erasure" => Builtin::OnOffErasure {
                p: p.ok_or_else(|| Error::InvalidParameter("onoff_erasure needs p".into()))?,
            },
            "two_receiver" => Builtin::TwoReceiver {
                p: p.unwrap_or(EXAMPLE_SWITCH_PROB),
            },
            "compute_communicate" => Builtin::ComputeCommunicate {
                p: p.unwrap_or(EXAMPLE_SWITCH_PROB),
            },
            other => return Err(Error::InvalidChannel(format!("unknown channel {other:?}"))),
        };
        Ok(b)
    }

    pub fn names() -> &'static [&'static str] {
        &["binary_adder", "binary_erasure", "onoff_erasure", "two_receiver", "compute_communicate"]
    }

    pub fn build(self) -> Result<ChannelSpec> {
        let binary = || vec![index_labels(2), index_labels(2)];
        let check = |p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(p)
            } else {
                Err(Error::InvalidParameter(format!("switching probability {p} outside [0, 1]")))
            }
        };
        match self {
            Builtin::BinaryAdder => {
                ChannelSpec::deterministic(binary(), vec![index_labels(2)], |x| vec![x[0] ^ x[1]])
            }
            Builtin::BinaryErasure => {
                ChannelSpec::deterministic(binary(), vec![index_labels(3)], |x| vec![x[0] + x[1]])
            }
            Builtin::OnOffErasure { p } => {
                let p = check(p)?;
                ChannelSpec::from_fn(binary(), vec![signed_labels()], |x| onoff_row(x, p))
            }
            Builtin::TwoReceiver { p } => {
                let p = check(p)?;
                ChannelSpec::from_fn(binary(), vec![index_labels(3), signed_labels()], |x| {
                    let mut row = vec![0.0; 15];
                    for (y2, w) in onoff_row(x, p).into_iter().enumerate() {
                        row[(x[0] + x[1]) * 5 + y2] = w;
                    }
                    row
                })
            }
            Builtin::ComputeCommunicate { p } => {
                let p = check(p)?;
                ChannelSpec::from_fn(
                    binary(),
                    vec![index_labels(2), index_labels(3), signed_labels()],
                    |x| {
                        let mut row = vec![0.0; 30];
                        let base = ((x[0] ^ x[1]) * 3 + (x[0] + x[1])) * 5;
                        for (y3, w) in onoff_row(x, p).into_iter().enumerate() {
                            row[base + y3] = w;
                        }
                        row
                    },
                )
            }
        }
    }
}

fn signed_labels() -> Vec<String> {
    (-2..=2).map(|v: i32| v.to_string()).collect()
}

/// Output law over `{-2, ..., 2}` (index `y + 2`) of the on-off erasure MAC.
fn onoff_row(x: &[usize], p: f64) -> Vec<f64> {
    let a = 2 * x[0] as i32 - 1;
    let b = 2 * x[1] as i32 - 1;
    let mut row = vec![0.0; 5];
    row[(a + b + 2) as usize] += p;
    row[(a + 2) as usize] += 1.0 - p;
    row
}

pub fn builtin(name: &str, p: Option<f64>) -> Result<ChannelSpec> {
    Builtin::parse(name, p)?.build()
}

/// A Gaussian MAC discretized by input and output quantiles.
#[derive(Clone, Debug)]
pub struct QuantizedGaussian {
    pub channel: ChannelSpec,
    /// Uniform law on the quantile points, `2^{-j}` each.
    pub input_pmf: Pmf,
    pub input_points: Vec<f64>,
    /// Interior output bin edges, increasing.
    pub output_edges: Vec<f64>,
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// `P(a < Z <= b)` for standard normal `Z`, accurate in both tails.
fn normal_mass(a: f64, b: f64) -> f64 {
    let upper = |t: f64| 0.5 * erfc(t / std::f64::consts::SQRT_2);
    if a >= 0.0 {
        upper(a) - upper(b)
    } else if b <= 0.0 {
        upper(-b) - upper(-a)
    } else {
        1.0 - upper(-a) - upper(b)
    }
}

/// Discretizes `Y = g1 X1 + g2 X2 + Z`, `Z ~ N(0, 1)`, `Xj ~ N(0, power)`.
///
/// Inputs take the `2^j` points `sqrt(power) Φ⁻¹((i + 1/2) / 2^j)`, each with
/// mass `2^{-j}`. The output is binned into the `2^kq` equal-probability
/// cells of `N(0, 1 + g1² power + g2² power)`, so bins at depth `kq + 1`
/// refine those at depth `kq`.
pub fn gaussian_quantize(power: f64, g1: f64, g2: f64, j: u32, kq: u32) -> Result<QuantizedGaussian> {
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::InvalidParameter(format!("power must be positive, got {power}")));
    }
    if !(g1.is_finite() && g2.is_finite()) {
        return Err(Error::InvalidParameter("gains must be finite".into()));
    }
    if j == 0 || kq == 0 {
        return Err(Error::InvalidParameter("quantization depths must be at least 1".into()));
    }
    if 2 * j + kq > 26 {
        return Err(Error::GuardExceeded {
            size: 2f64.powi((2 * j + kq) as i32),
            limit: 2f64.powi(26),
        });
    }
    let normal = std_normal();
    let nx = 1usize << j;
    let ny = 1usize << kq;
    let input_points: Vec<f64> = (0..nx)
        .map(|i| power.sqrt() * normal.inverse_cdf((i as f64 + 0.5) / nx as f64))
        .collect();
    let sigma_y = (1.0 + (g1 * g1 + g2 * g2) * power).sqrt();
    let output_edges: Vec<f64> = (1..ny)
        .map(|b| sigma_y * normal.inverse_cdf(b as f64 / ny as f64))
        .collect();
    let edge = |b: usize| -> f64 {
        match b {
            0 => f64::NEG_INFINITY,
            b if b == ny => f64::INFINITY,
            b => output_edges[b - 1],
        }
    };
    let labels = index_labels(nx);
    let channel = ChannelSpec::from_fn(vec![labels.clone(), labels], vec![index_labels(ny)], |x| {
        let mean = g1 * input_points[x[0]] + g2 * input_points[x[1]];
        let mut row: Vec<f64> = (0..ny)
            .map(|b| normal_mass(edge(b) - mean, edge(b + 1) - mean).max(0.0))
            .collect();
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|w| *w /= total);
        row
    })?;
    Ok(QuantizedGaussian {
        channel,
        input_pmf: Pmf::uniform(nx)?,
        input_points,
        output_edges,
    })
}

/// Gaussian capacity function `½ log2(1 + x)`.
pub fn gaussian_capacity(x: f64) -> f64 {
    0.5 * (1.0 + x).log2()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelJson {
    k: usize,
    r: usize,
    inputs: Vec<Vec<String>>,
    outputs: Vec<Vec<String>>,
    transition: BTreeMap<String, BTreeMap<String, ProbValue>>,
}

fn parse_tuple(key: &str, alphabets: &[Vec<String>]) -> Result<usize> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != alphabets.len() {
        return Err(Error::Parse(format!("key {key:?} has {} symbols, expected {}", parts.len(), alphabets.len())));
    }
    let mut idx = 0;
    for (part, a) in parts.iter().zip(alphabets) {
        let s = a
            .iter()
            .position(|x| x == part)
            .ok_or_else(|| Error::Parse(format!("unknown symbol {part:?} in {key:?}")))?;
        idx = idx * a.len() + s;
    }
    Ok(idx)
}

impl ChannelSpec {
    /// Parses `{"k", "r", "inputs", "outputs", "transition": {"x1,x2": {"y": p}}}`.
    /// Every input tuple needs a row; omitted outputs have probability zero.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ChannelJson = serde_json::from_str(text)?;
        if raw.k != raw.inputs.len() || raw.r != raw.outputs.len() {
            return Err(Error::InvalidChannel("k or r disagrees with the alphabet lists".into()));
        }
        for a in raw.inputs.iter().chain(&raw.outputs) {
            if a.is_empty() {
                return Err(Error::InvalidChannel("empty alphabet".into()));
            }
            let mut sorted = a.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != a.len() {
                return Err(Error::InvalidChannel("repeated alphabet symbol".into()));
            }
        }
        let nin = product_of(raw.inputs.iter().map(Vec::len))?;
        let nout = product_of(raw.outputs.iter().map(Vec::len))?;
        product_of([nin, nout].into_iter())?;
        let mut transition = vec![0.0; nin * nout];
        let mut seen = vec![false; nin];
        for (xkey, row) in &raw.transition {
            let x = parse_tuple(xkey, &raw.inputs)?;
            if seen[x] {
                return Err(Error::Parse(format!("duplicate row {xkey:?}")));
            }
            seen[x] = true;
            for (ykey, w) in row {
                let y = parse_tuple(ykey, &raw.outputs)?;
                transition[x * nout + y] = w.value()?;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidChannel(format!("no row for input tuple {missing}")));
        }
        ChannelSpec::new(raw.inputs, raw.outputs, transition)
    }

    pub fn to_json(&self) -> String {
        let in_radices = self.input_sizes();
        let out_radices = self.output_sizes();
        let nout = self.num_outputs();
        let label = |t: &[usize], a: &[Vec<String>]| -> String {
            t.iter().zip(a).map(|(&s, al)| al[s].as_str()).collect::<Vec<_>>().join(",")
        };
        let transition = self
            .transition
            .chunks(nout)
            .enumerate()
            .map(|(x, row)| {
                let xs = label(&split_index(x, &in_radices), &self.inputs);
                let ys = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w > 0.0)
                    .map(|(y, &w)| (label(&split_index(y, &out_radices), &self.outputs), ProbValue::Number(w)))
                    .collect();
                (xs, ys)
            })
            .collect();
        serde_json::to_string_pretty(&ChannelJson {
            k: self.k(),
            r: self.r(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            transition,
        })
        .expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builtin_tables() {
        let adder = builtin("binary_adder", None).unwrap();
        assert_eq!(adder.prob(&[0, 0], &[0]), 1.0);
        assert_eq!(adder.prob(&[0, 1], &[1]), 1.0);
        assert_eq!(adder.prob(&[1, 1], &[0]), 1.0);
        let erasure = builtin("binary_erasure", None).unwrap();
        assert_eq!(erasure.prob(&[0, 1], &[1]), 1.0);
        assert_eq!(erasure.outputs()[0].len(), 3);
        let onoff = builtin("onoff_erasure", Some(0.3)).unwrap();
        // y = 0 sits at index 2.
        assert!((onoff.prob(&[1, 0], &[2]) - 0.3).abs() < 1e-15);
        assert!(builtin("onoff_erasure", Some(1.5)).is_err());
        assert!(builtin("nope", None).is_err());
    }

    #[test]
    fn transmit_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let adder = builtin("binary_adder", None).unwrap();
        assert_eq!(adder.transmit(&[&[0, 1], &[1, 1]], &mut rng).unwrap(), vec![vec![1, 0]]);
        let erasure = builtin("binary_erasure", None).unwrap();
        assert_eq!(erasure.transmit(&[&[1, 1], &[1, 0]], &mut rng).unwrap(), vec![vec![2, 1]]);
        let onoff = builtin("onoff_erasure", Some(1.0)).unwrap();
        let y = onoff.transmit(&[&[1], &[1]], &mut rng).unwrap();
        assert_eq!(onoff.outputs()[0][y[0][0]], "2");
        assert!(adder.transmit(&[&[0, 1], &[1]], &mut rng).is_err());
    }

    #[test]
    fn transmit_frequencies_follow_row() {
        let onoff = builtin("onoff_erasure", Some(0.25)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 40_000;
        let x1 = vec![1; n];
        let x2 = vec![0; n];
        let y = onoff.transmit(&[&x1, &x2], &mut rng).unwrap();
        let erased = y[0].iter().filter(|&&s| s == 2).count() as f64 / n as f64;
        assert!((erased - 0.25).abs() < 0.01);
    }

    #[test]
    fn identity_and_constant_transforms() {
        let c = builtin("onoff_erasure", Some(0.4)).unwrap();
        let id = c.transform(&TransformMap::new(vec![vec![0, 1], vec![0, 1]])).unwrap();
        assert_eq!(id.transition(), c.transition());
        let constant = c.transform(&TransformMap::new(vec![vec![0, 1], vec![0, 0, 0]])).unwrap();
        for u1 in 0..2 {
            for u2 in 1..3 {
                assert_eq!(constant.row(&[u1, u2]), constant.row(&[u1, 0]));
            }
        }
    }

    #[test]
    fn parity_map_on_gf4_gives_fair_bits() {
        let maps = TransformMap::parity(4, 2);
        assert_eq!(maps.maps[0], vec![0, 1, 0, 1]);
        let u = Pmf::uniform(4).unwrap();
        let x = maps.push_forward(&[u.clone(), u], &[2, 2]).unwrap();
        assert_eq!(x[0].probs(), &[0.5, 0.5]);
    }

    #[test]
    fn multi_receiver_marginals() {
        let c = builtin("compute_communicate", None).unwrap();
        assert_eq!(c.receiver(0).unwrap().transition(), builtin("binary_adder", None).unwrap().transition());
        assert_eq!(c.receiver(1).unwrap().transition(), builtin("binary_erasure", None).unwrap().transition());
        let onoff = builtin("onoff_erasure", Some(2.0 / 3.0)).unwrap();
        assert_eq!(c.receiver(2).unwrap().transition(), onoff.transition());
        let two = builtin("two_receiver", None).unwrap();
        assert_eq!(two.receiver(1).unwrap().transition(), onoff.transition());
    }

    #[test]
    fn onoff_at_one_matches_erasure_informations() {
        let onoff = builtin("onoff_erasure", Some(1.0)).unwrap();
        let erasure = builtin("binary_erasure", None).unwrap();
        for &(a, b) in &[(0.5, 0.5), (0.2, 0.7), (0.9, 0.1)] {
            let pmfs = [Pmf::bernoulli(a).unwrap(), Pmf::bernoulli(b).unwrap()];
            let j1 = onoff.joint(&pmfs).unwrap();
            let j2 = erasure.joint(&pmfs).unwrap();
            for (l, c) in [(vec![0], vec![]), (vec![0], vec![1]), (vec![1], vec![0]), (vec![0, 1], vec![])] {
                let i1 = j1.mutual_information(&l, &[2], &c, 2.0).unwrap();
                let i2 = j2.mutual_information(&l, &[2], &c, 2.0).unwrap();
                assert!((i1 - i2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for name in Builtin::names() {
            let c = builtin(name, Some(0.75)).unwrap();
            let back = ChannelSpec::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c, "{name}");
        }
        let text = r#"{"k":1,"r":1,"inputs":[["a","b"]],"outputs":[["0","1"]],
            "transition":{"a":{"0":"1/3","1":"2/3"},"b":{"1":1}}}"#;
        let c = ChannelSpec::from_json(text).unwrap();
        assert!((c.prob(&[0], &[1]) - 2.0 / 3.0).abs() < 1e-15);
        let missing = r#"{"k":1,"r":1,"inputs":[["a","b"]],"outputs":[["0"]],"transition":{"a":{"0":1}}}"#;
        assert!(ChannelSpec::from_json(missing).is_err());
    }

    #[test]
    fn gaussian_inputs() {
        let g = gaussian_quantize(1.0, 1.0, 1.0, 1, 2).unwrap();
        assert_eq!(g.input_points.len(), 2);
        assert!((g.input_points[0] + g.input_points[1]).abs() < 1e-12);
        assert_eq!(g.input_pmf.probs(), &[0.5, 0.5]);
        for j in 1..=8 {
            let g = gaussian_quantize(2.5, 1.0, 1.0, j, 1).unwrap();
            let second: f64 = g.input_points.iter().map(|x| x * x).sum::<f64>() / g.input_points.len() as f64;
            assert!(second <= 2.5, "j={j}: {second}");
            let scale = (1u64 << j) as f64;
            for &p in g.input_pmf.probs() {
                assert_eq!((p * scale).fract(), 0.0);
            }
        }
        assert!(gaussian_quantize(0.0, 1.0, 1.0, 1, 1).is_err());
    }

    #[test]
    fn gaussian_sum_rate_grows_with_output_depth() {
        let mut last = 0.0;
        for kq in 1..=6 {
            let g = gaussian_quantize(1.0, 1.0, 1.0, 3, kq).unwrap();
            let pmf = g.input_pmf.clone();
            let joint = g.channel.joint(&[pmf.clone(), pmf]).unwrap();
            let i = joint.mutual_information(&[0, 1], &[2], &[], 2.0).unwrap();
            assert!(i >= last - 1e-12);
            last = i;
        }
        assert!(last < gaussian_capacity(2.0));
    }

    proptest! {
        #[test]
        fn transform_matches_push_forward(
            w1 in prop::collection::vec(0.01f64..1.0, 4),
            w2 in prop::collection::vec(0.01f64..1.0, 3),
            m1 in prop::collection::vec(0usize..2, 4),
            m2 in prop::collection::vec(0usize..2, 3),
            p in 0.0f64..=1.0,
        ) {
            let norm = |w: Vec<f64>| {
                let s: f64 = w.iter().sum();
                let mut v: Vec<f64> = w.iter().map(|x| x / s).collect();
                let rest: f64 = v[1..].iter().sum();
                v[0] = 1.0 - rest;
                Pmf::indexed(v).unwrap()
            };
            let (q1, q2) = (norm(w1), norm(w2));
            let c = builtin("onoff_erasure", Some(p)).unwrap();
            let maps = TransformMap::new(vec![m1, m2]);
            let virt = c.transform(&maps).unwrap();
            let y_virtual = virt.joint(&[q1.clone(), q2.clone()]).unwrap().marginal_table(&[2]);
            let pushed = maps.push_forward(&[q1, q2], &[2, 2]).unwrap();
            let y_direct = c.joint(&pushed).unwrap().marginal_table(&[2]);
            for (a, b) in y_virtual.iter().zip(&y_direct) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

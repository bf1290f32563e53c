//! Finite probability tables, information measures and typicality.
//!
//! Symbols are referred to by their index into an axis alphabet; the
//! alphabet strings only matter for display and serialization. Entropies are
//! accumulated in nats and converted to the requested base on the way out.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::FieldSpec;

/// Allowed deviation of a table's total mass from one.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Slack added to typicality bounds so that exact types survive float rounding.
const TYPICAL_SLACK: f64 = 1e-12;

/// Parses a probability written either as a decimal or as a fraction `a/b`.
pub fn parse_prob(s: &str) -> Result<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let b: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            if b == 0.0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            a / b
        }
        None => s.parse().map_err(|_| Error::Parse(format!("bad probability {s:?}")))?,
    };
    if !value.is_finite() {
        return Err(Error::Parse(format!("non-finite probability {s:?}")));
    }
    Ok(value)
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidPmf(format!("probability {p} outside [0, 1]")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidPmf(format!("probabilities sum to {sum}")));
    }
    Ok(())
}

fn check_alphabet(alphabet: &[String]) -> Result<()> {
    if alphabet.is_empty() {
        return Err(Error::InvalidPmf("empty alphabet".into()));
    }
    let distinct: HashSet<&String> = alphabet.iter().collect();
    if distinct.len() != alphabet.len() {
        return Err(Error::InvalidPmf("alphabet symbols are not distinct".into()));
    }
    Ok(())
}

/// `-Σ p ln p` over the given masses.
fn entropy_nats(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

fn check_base(base: f64) {
    assert!(base > 1.0, "logarithm base must exceed 1, got {base}");
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    entropy_nats([x, 1.0 - x]) / std::f64::consts::LN_2
}

/// The unique `x ∈ [0, 1/2]` with `binary_entropy(x) = h`.
pub fn binary_entropy_inverse(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::InvalidParameter(format!("binary entropy {h} outside [0, 1]")));
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    if h == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A distribution over a single finite alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    alphabet: Vec<String>,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(alphabet: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        check_alphabet(&alphabet)?;
        if alphabet.len() != probs.len() {
            return Err(Error::InvalidPmf(format!(
                "{} symbols but {} probabilities",
                alphabet.len(),
                probs.len()
            )));
        }
        check_probs(&probs)?;
        Ok(Pmf { alphabet, probs })
    }

    /// Symbols labelled `0..len`.
    pub fn indexed(probs: Vec<f64>) -> Result<Self> {
        Self::new(index_labels(probs.len()), probs)
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        Self::indexed(vec![1.0 / size as f64; size])
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPmf(format!("Bernoulli parameter {p} outside [0, 1]")));
        }
        Self::indexed(vec![1.0 - p, p])
    }

    pub fn point_mass(size: usize, at: usize) -> Result<Self> {
        if at >= size {
            return Err(Error::InvalidPmf(format!("symbol {at} outside alphabet of size {size}")));
        }
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Self::indexed(probs)
    }

    /// A distribution on the elements of `field`, indexed by their encoding.
    pub fn over_field(field: &FieldSpec, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != field.order() {
            return Err(Error::InvalidPmf(format!(
                "{} probabilities for a field of order {}",
                probs.len(),
                field.q()
            )));
        }
        Self::indexed(probs)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }

    pub fn entropy(&self, base: f64) -> f64 {
        check_base(base);
        entropy_nats(self.probs.iter().copied()) / base.ln()
    }

    pub fn into_joint(self, name: &str) -> JointPmf {
        JointPmf {
            axes: vec![Axis::new(name, self.alphabet)],
            table: self.probs,
        }
    }
}

pub fn index_labels(size: usize) -> Vec<String> {
    (0..size).map(|i| i.to_string()).collect()
}

/// A named alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub alphabet: Vec<String>,
}

impl Axis {
    pub fn new(name: &str, alphabet: Vec<String>) -> Self {
        Axis {
            name: name.to_string(),
            alphabet,
        }
    }

    pub fn indexed(name: &str, size: usize) -> Self {
        Self::new(name, index_labels(size))
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }
}

/// A dense joint distribution; the last axis varies fastest in `table`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPmf {
    axes: Vec<Axis>,
    table: Vec<f64>,
}

impl JointPmf {
    pub fn new(axes: Vec<Axis>, table: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidPmf("no axes".into()));
        }
        let names: HashSet<&String> = axes.iter().map(|a| &a.name).collect();
        if names.len() != axes.len() {
            return Err(Error::InvalidPmf("axis names are not distinct".into()));
        }
        for a in &axes {
            check_alphabet(&a.alphabet)?;
        }
        let size = table_size(&axes)?;
        if table.len() != size {
            return Err(Error::InvalidPmf(format!(
                "table has {} cells, axes need {size}",
                table.len()
            )));
        }
        check_probs(&table)?;
        Ok(JointPmf { axes, table })
    }

    /// Builds the table cell by cell from a function of the symbol tuple.
    pub fn from_fn(axes: Vec<Axis>, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let size = table_size(&axes)?;
        let radices: Vec<usize> = axes.iter().map(Axis::len).collect();
        let mut tuple = vec![0; axes.len()];
        let mut table = Vec::with_capacity(size);
        for _ in 0..size {
            table.push(f(&tuple));
            advance(&mut tuple, &radices);
        }
        Self::new(axes, table)
    }

    /// Independent product of named marginals.
    pub fn product(parts: &[(&str, &Pmf)]) -> Result<Self> {
        let axes: Vec<Axis> = parts
            .iter()
            .map(|(name, p)| Axis::new(name, p.alphabet.clone()))
            .collect();
        Self::from_fn(axes, |t| {
            t.iter().zip(parts).map(|(&s, (_, p))| p.probs[s]).product()
        })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn num_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn radices(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::InvalidPmf(format!("no axis named {name:?}")))
    }

    pub fn axis_indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.axis_index(n)).collect()
    }

    /// Flat table index of a symbol tuple.
    pub fn cell(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(&self.axes)
            .fold(0, |acc, (&s, a)| acc * a.len() + s)
    }

    pub fn prob(&self, tuple: &[usize]) -> f64 {
        self.table[self.cell(tuple)]
    }

    /// Visits every cell with its symbol tuple.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], f64)) {
        let radices = self.radices();
        let mut tuple = vec![0; self.axes.len()];
        for &p in &self.table {
            f(&tuple, p);
            advance(&mut tuple, &radices);
        }
    }

    /// Marginal masses over `axes` in the order given, last axis fastest.
    pub fn marginal_table(&self, axes: &[usize]) -> Vec<f64> {
        let radices = self.radices();
        let size: usize = axes.iter().map(|&a| radices[a]).product();
        let mut out = vec![0.0; size];
        self.for_each(|t, p| {
            let idx = axes.iter().fold(0, |acc, &a| acc * radices[a] + t[a]);
            out[idx] += p;
        });
        out
    }

    pub fn marginal(&self, axes: &[usize]) -> Result<JointPmf> {
        self.check_axes(axes)?;
        let mut seen = HashSet::new();
        if !axes.iter().all(|a| seen.insert(*a)) {
            return Err(Error::InvalidPmf("repeated axis in marginal".into()));
        }
        Ok(JointPmf {
            axes: axes.iter().map(|&a| self.axes[a].clone()).collect(),
            table: self.marginal_table(axes),
        })
    }

    /// Single-axis marginal as a [`Pmf`].
    pub fn marginal_pmf(&self, axis: usize) -> Result<Pmf> {
        self.check_axes(&[axis])?;
        Ok(Pmf {
            alphabet: self.axes[axis].alphabet.clone(),
            probs: self.marginal_table(&[axis]),
        })
    }

    /// Joint entropy of the selected axes. An empty selection has entropy 0.
    pub fn entropy(&self, axes: &[usize], base: f64) -> Result<f64> {
        check_base(base);
        self.check_axes(axes)?;
        let axes = dedup(axes);
        Ok(entropy_nats(self.marginal_table(&axes)) / base.ln())
    }

    /// `H(left | given)`.
    pub fn conditional_entropy(&self, left: &[usize], given: &[usize], base: f64) -> Result<f64> {
        let both: Vec<usize> = left.iter().chain(given).copied().collect();
        let h = self.entropy(&both, base)? - self.entropy(given, base)?;
        Ok(h.max(0.0))
    }

    /// `I(left; right | cond)`, clamped at zero.
    pub fn mutual_information(
        &self,
        left: &[usize],
        right: &[usize],
        cond: &[usize],
        base: f64,
    ) -> Result<f64> {
        let overlap = left.iter().any(|a| right.contains(a) || cond.contains(a))
            || right.iter().any(|a| cond.contains(a));
        if overlap {
            return Err(Error::InvalidParameter("overlapping axis sets".into()));
        }
        let lc: Vec<usize> = left.iter().chain(cond).copied().collect();
        let rc: Vec<usize> = right.iter().chain(cond).copied().collect();
        let lrc: Vec<usize> = left.iter().chain(right).chain(cond).copied().collect();
        let i = self.entropy(&lc, base)? + self.entropy(&rc, base)?
            - self.entropy(&lrc, base)?
            - self.entropy(cond, base)?;
        Ok(i.max(0.0))
    }

    /// Appends an axis whose symbol is a deterministic function of the others.
    pub fn with_derived_axis(
        &self,
        axis: Axis,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<JointPmf> {
        let n = axis.len();
        self.with_conditional_axis(axis, |t| {
            let mut row = vec![0.0; n];
            row[f(t)] = 1.0;
            row
        })
    }

    /// Appends an axis drawn from the conditional law `f(tuple)`.
    pub fn with_conditional_axis(
        &self,
        axis: Axis,
        f: impl Fn(&[usize]) -> Vec<f64>,
    ) -> Result<JointPmf> {
        if self.axes.iter().any(|a| a.name == axis.name) {
            return Err(Error::InvalidPmf(format!("axis {:?} already present", axis.name)));
        }
        let n = axis.len();
        let mut table = Vec::with_capacity(self.table.len() * n);
        let mut err = None;
        self.for_each(|t, p| {
            let row = f(t);
            if row.len() == n {
                table.extend(row.iter().map(|w| p * w));
            } else {
                err.get_or_insert(Error::InvalidPmf(format!(
                    "conditional row has {} entries, alphabet has {n}",
                    row.len()
                )));
                table.extend(std::iter::repeat_n(0.0, n));
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let mut axes = self.axes.clone();
        axes.push(axis);
        JointPmf::new(axes, table)
    }

    /// Joint typicality of aligned sequences, one per axis.
    pub fn is_typical(&self, seqs: &[&[usize]], eps: f64) -> Result<bool> {
        if seqs.len() != self.axes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} sequences for {} axes",
                seqs.len(),
                self.axes.len()
            )));
        }
        let n = seqs.first().map_or(0, |s| s.len());
        if n == 0 || seqs.iter().any(|s| s.len() != n) {
            return Err(Error::DimensionMismatch("sequences must be nonempty and aligned".into()));
        }
        let radices = self.radices();
        let mut counts = vec![0u64; self.table.len()];
        for i in 0..n {
            let mut idx = 0;
            for (s, &r) in seqs.iter().zip(&radices) {
                if s[i] >= r {
                    return Err(Error::InvalidPmf(format!("symbol {} outside alphabet of size {r}", s[i])));
                }
                idx = idx * r + s[i];
            }
            counts[idx] += 1;
        }
        Ok(counts_typical(&self.table, &counts, n, eps))
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        match axes.iter().find(|&&a| a >= self.axes.len()) {
            Some(a) => Err(Error::InvalidPmf(format!("axis {a} out of range"))),
            None => Ok(()),
        }
    }
}

/// Multiplicative typicality of a count vector against masses `probs`.
pub fn counts_typical(probs: &[f64], counts: &[u64], n: usize, eps: f64) -> bool {
    probs.iter().zip(counts).all(|(&p, &c)| {
        if p == 0.0 {
            c == 0
        } else {
            (p - c as f64 / n as f64).abs() <= eps * p + TYPICAL_SLACK
        }
    })
}

/// Inclusive count range `[lo, hi]` a cell of mass `p` may take in an
/// `eps`-typical sequence of length `n`.
pub fn typical_count_range(p: f64, n: usize, eps: f64) -> (u64, u64) {
    if p == 0.0 {
        return (0, 0);
    }
    let n_f = n as f64;
    let lo = ((p - eps * p - TYPICAL_SLACK) * n_f).ceil().max(0.0) as u64;
    let hi = ((p + eps * p + TYPICAL_SLACK) * n_f).floor().min(n_f) as u64;
    (lo, hi)
}

/// Empirical type of a sequence over an alphabet of `size` symbols.
pub fn type_of(x: &[usize], size: usize) -> Result<Pmf> {
    if x.is_empty() {
        return Err(Error::InvalidParameter("empty sequence".into()));
    }
    let mut counts = vec![0usize; size];
    for &s in x {
        if s >= size {
            return Err(Error::InvalidPmf(format!("symbol {s} outside alphabet of size {size}")));
        }
        counts[s] += 1;
    }
    let n = x.len() as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    // Rounding can leave the sum a few ulps from one; renormalize the last cell.
    Pmf::indexed(probs).or_else(|_| {
        let mut probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let rest: f64 = probs[..size - 1].iter().sum();
        probs[size - 1] = (1.0 - rest).max(0.0);
        Pmf::indexed(probs)
    })
}

/// Single-sequence typicality against a [`Pmf`].
pub fn is_typical(x: &[usize], p: &Pmf, eps: f64) -> Result<bool> {
    p.clone().into_joint("X").is_typical(&[x], eps)
}

fn table_size(axes: &[Axis]) -> Result<usize> {
    axes.iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
        .filter(|&s| s <= 1 << 28)
        .ok_or_else(|| Error::InvalidPmf("joint table too large".into()))
}

fn advance(tuple: &mut [usize], radices: &[usize]) {
    for i in (0..tuple.len()).rev() {
        tuple[i] += 1;
        if tuple[i] < radices[i] {
            return;
        }
        tuple[i] = 0;
    }
}

fn dedup(axes: &[usize]) -> Vec<usize> {
    let mut seen = HashSet::new();
    axes.iter().copied().filter(|a| seen.insert(*a)).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointPmfJson {
    axes: Vec<Axis>,
    probs: BTreeMap<String, ProbValue>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum ProbValue {
    Number(f64),
    Text(String),
}

impl ProbValue {
    pub(crate) fn value(&self) -> Result<f64> {
        match self {
            ProbValue::Number(x) if x.is_finite() => Ok(*x),
            ProbValue::Number(x) => Err(Error::Parse(format!("non-finite probability {x}"))),
            ProbValue::Text(s) => parse_prob(s),
        }
    }
}

impl JointPmf {
    /// Parses `{"axes": [{"name", "alphabet"}], "probs": {"a,b": p}}`.
    /// Missing tuples have probability zero.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: JointPmfJson = serde_json::from_str(text)?;
        if raw.axes.is_empty() {
            return Err(Error::InvalidPmf("no axes".into()));
        }
        for a in &raw.axes {
            check_alphabet(&a.alphabet)?;
        }
        let size = table_size(&raw.axes)?;
        let lookup: Vec<BTreeMap<&str, usize>> = raw
            .axes
            .iter()
            .map(|a| a.alphabet.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect())
            .collect();
        let mut table = vec![0.0; size];
        let mut filled = vec![false; size];
        for (key, value) in &raw.probs {
            let parts: Vec<&str> = key.split(',').map(str::trim).collect();
            if parts.len() != raw.axes.len() {
                return Err(Error::Parse(format!("key {key:?} has {} symbols", parts.len())));
            }
            let mut idx = 0;
            for ((part, map), axis) in parts.iter().zip(&lookup).zip(&raw.axes) {
                let s = map
                    .get(part)
                    .ok_or_else(|| Error::Parse(format!("unknown symbol {part:?} on axis {:?}", axis.name)))?;
                idx = idx * axis.len() + s;
            }
            if filled[idx] {
                return Err(Error::Parse(format!("duplicate entry for {key:?}")));
            }
            filled[idx] = true;
            table[idx] = value.value()?;
        }
        JointPmf::new(raw.axes, table)
    }

    pub fn to_json(&self) -> String {
        let mut probs = BTreeMap::new();
        self.for_each(|t, p| {
            if p > 0.0 {
                let key: Vec<&str> = t
                    .iter()
                    .zip(&self.axes)
                    .map(|(&s, a)| a.alphabet[s].as_str())
                    .collect();
                probs.insert(key.join(","), ProbValue::Number(p));
            }
        });
        serde_json::to_string_pretty(&JointPmfJson {
            axes: self.axes.clone(),
            probs,
        })
        .expect("serializable")
    }
}

impl Pmf {
    pub fn from_json(text: &str) -> Result<Self> {
        let joint = JointPmf::from_json(text)?;
        if joint.num_axes() != 1 {
            return Err(Error::InvalidPmf(format!("expected one axis, found {}", joint.num_axes())));
        }
        joint.marginal_pmf(0)
    }

    pub fn to_json(&self, name: &str) -> String {
        self.clone().into_joint(name).to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_input_joint(outputs: usize, f: impl Fn(&[usize]) -> usize) -> JointPmf {
        let b = Pmf::bernoulli(0.5).unwrap();
        JointPmf::product(&[("X1", &b), ("X2", &b)])
            .unwrap()
            .with_derived_axis(Axis::indexed("Y", outputs), f)
            .unwrap()
    }

    fn adder_joint() -> JointPmf {
        two_input_joint(2, |t| t[0] ^ t[1])
    }

    fn erasure_joint() -> JointPmf {
        two_input_joint(3, |t| t[0] + t[1])
    }

    #[test]
    fn entropy_examples() {
        assert!((Pmf::bernoulli(0.5).unwrap().entropy(2.0) - 1.0).abs() < 1e-15);
        assert!((Pmf::uniform(4).unwrap().entropy(4.0) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.174) - 0.6667).abs() < 1e-3);
    }

    #[test]
    fn adder_information() {
        let j = adder_joint();
        assert!(j.mutual_information(&[0], &[2], &[], 2.0).unwrap().abs() < 1e-12);
        assert!((j.mutual_information(&[0], &[2], &[1], 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(j.mutual_information(&[0], &[0], &[], 2.0).is_err());
    }

    #[test]
    fn erasure_information() {
        let j = erasure_joint();
        assert!((j.mutual_information(&[0, 1], &[2], &[], 2.0).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn entropy_inverse() {
        assert_eq!(binary_entropy_inverse(1.0).unwrap(), 0.5);
        assert_eq!(binary_entropy_inverse(0.0).unwrap(), 0.0);
        let g = binary_entropy_inverse(2.0 / 3.0).unwrap();
        assert!((g - 0.1740).abs() < 1e-4);
        assert!((binary_entropy(g) - 2.0 / 3.0).abs() < 1e-10);
        assert!(binary_entropy_inverse(1.5).is_err());
    }

    #[test]
    fn types() {
        let t = type_of(&[0, 1, 0, 1], 2).unwrap();
        assert_eq!(t.probs(), &[0.5, 0.5]);
        let t = type_of(&[3, 3, 3], 4).unwrap();
        assert_eq!(t.probs(), &[0.0, 0.0, 0.0, 1.0]);
        let t = type_of(&[0, 0, 1, 2], 4).unwrap();
        assert_eq!(t.probs(), &[0.5, 0.25, 0.25, 0.0]);
        assert!(type_of(&[], 2).is_err());
    }

    #[test]
    fn typicality_examples() {
        let p = Pmf::bernoulli(0.3).unwrap();
        let mut x = vec![0usize; 100];
        x[..27].iter_mut().for_each(|s| *s = 1);
        assert!(is_typical(&x, &p, 0.2).unwrap());
        assert!(!is_typical(&x, &p, 0.05).unwrap());
        let point = Pmf::point_mass(2, 0).unwrap();
        assert!(!is_typical(&[0, 0, 1], &point, 0.9).unwrap());
        let third = Pmf::indexed(vec![1.0 / 3.0; 3]).unwrap();
        assert!(is_typical(&[0, 1, 2], &third, 1e-9).unwrap());
    }

    #[test]
    fn count_range_agrees_with_check() {
        for &(p, n, eps) in &[(0.3, 100, 0.2), (0.25, 64, 0.1), (1.0 / 3.0, 30, 0.05)] {
            let (lo, hi) = typical_count_range(p, n, eps);
            for c in 0..=n as u64 {
                let ok = counts_typical(&[p], &[c], n, eps);
                assert_eq!(ok, (lo..=hi).contains(&c), "p={p} n={n} c={c}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let j = erasure_joint();
        let back = JointPmf::from_json(&j.to_json()).unwrap();
        assert_eq!(back, j);
        let text = r#"{"axes":[{"name":"X","alphabet":["a","b","c"]}],"probs":{"a":"1/3","b":"2/3"}}"#;
        let p = Pmf::from_json(text).unwrap();
        assert_eq!(p.alphabet(), &["a", "b", "c"]);
        assert!((p.prob(1) - 2.0 / 3.0).abs() < 1e-15);
        assert!(Pmf::from_json(r#"{"axes":[{"name":"X","alphabet":["a"]}],"probs":{"a":0.5}}"#).is_err());
        assert!(Pmf::from_json(r#"{"axes":[{"name":"X","alphabet":["a"]}],"probs":{"z":1}}"#).is_err());
    }

    #[test]
    fn invalid_tables_rejected() {
        assert!(Pmf::indexed(vec![0.5, 0.6]).is_err());
        assert!(Pmf::indexed(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]).is_err());
    }

    fn random_joint(weights: Vec<f64>) -> JointPmf {
        let total: f64 = weights.iter().sum();
        let table: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut table = table;
        let rest: f64 = table[..11].iter().sum();
        table[11] = (1.0 - rest).max(0.0);
        JointPmf::new(
            vec![Axis::indexed("A", 2), Axis::indexed("B", 3), Axis::indexed("C", 2)],
            table,
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn chain_rule(weights in prop::collection::vec(0.01f64..1.0, 12)) {
            let j = random_joint(weights);
            let hab = j.entropy(&[0, 1], 2.0).unwrap();
            let ha = j.entropy(&[0], 2.0).unwrap();
            let hb_a = j.conditional_entropy(&[1], &[0], 2.0).unwrap();
            prop_assert!((hab - ha - hb_a).abs() < 1e-12);
        }

        #[test]
        fn mutual_information_symmetric(weights in prop::collection::vec(0.01f64..1.0, 12)) {
            let j = random_joint(weights);
            let i1 = j.mutual_information(&[0], &[1], &[2], 3.0).unwrap();
            let i2 = j.mutual_information(&[1], &[0], &[2], 3.0).unwrap();
            prop_assert!((i1 - i2).abs() < 1e-12);
        }

        #[test]
        fn joint_typicality_implies_marginal(
            seq in prop::collection::vec((0usize..2, 0usize..3), 1..60),
            eps in 0.01f64..1.0,
        ) {
            let a: Vec<usize> = seq.iter().map(|s| s.0).collect();
            let b: Vec<usize> = seq.iter().map(|s| s.1).collect();
            // Test against the joint type perturbed slightly so both outcomes occur.
            let n = seq.len() as f64;
            let mut weights = [0.0; 6];
            for &(x, y) in &seq { weights[x * 3 + y] += 1.0 / n; }
            let w: Vec<f64> = weights.iter().map(|w| 0.9 * w + 0.1 / 6.0).collect();
            let j = JointPmf::new(vec![Axis::indexed("A", 2), Axis::indexed("B", 3)], w).unwrap();
            if j.is_typical(&[&a, &b], eps).unwrap() {
                prop_assert!(j.marginal(&[0]).unwrap().is_typical(&[&a], eps).unwrap());
                prop_assert!(j.marginal(&[1]).unwrap().is_typical(&[&b], eps).unwrap());
            }
        }

        #[test]
        fn own_type_is_typical(x in prop::collection::vec(0usize..4, 1..80), eps in 1e-9f64..1.0) {
            let t = type_of(&x, 4).unwrap();
            prop_assert!(is_typical(&x, &t, eps).unwrap());
        }
    }
}

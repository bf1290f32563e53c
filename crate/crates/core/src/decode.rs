//! Exhaustive joint-typicality decoders.
//!
//! The message decoder searches every codebook tuple. Partial tuples are
//! pruned by typicality of the corresponding marginal, which any jointly
//! typical tuple must satisfy.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::code::{CodewordIter, HomologousEnsemble, Shaping};
use crate::error::{Error, Result};
use crate::gf::{vec_add, vec_scale, Fq};
use crate::prob::{counts_typical, JointPmf};

/// Default bound on the number of codeword tuples a decoder may search.
pub const DECODE_GUARD: f64 = (1u64 << 28) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Ok,
    NoCandidate,
    Ambiguous,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecodeOptions {
    pub eps: f64,
    /// Largest admissible search space.
    pub guard: f64,
    /// Keep scanning after a second message tuple appears.
    pub exhaustive: bool,
}

impl DecodeOptions {
    pub fn new(eps: f64) -> Self {
        DecodeOptions {
            eps,
            guard: DECODE_GUARD,
            exhaustive: true,
        }
    }

    /// Stop as soon as the outcome is known to be ambiguous.
    pub fn fast(mut self) -> Self {
        self.exhaustive = false;
        self
    }
}

/// A jointly typical codebook tuple: message and shaping indices per sender.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Candidate {
    pub messages: Vec<usize>,
    pub shaping: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    /// The decoded messages, present exactly when `status` is `Ok`.
    pub messages: Option<Vec<Vec<Fq>>>,
    pub candidates: Vec<Candidate>,
}

impl DecodeResult {
    /// Distinct message tuples among the candidates.
    pub fn message_tuples(&self) -> BTreeSet<Vec<usize>> {
        self.candidates.iter().map(|c| c.messages.clone()).collect()
    }
}

fn check_eps(e: &HomologousEnsemble, eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("decoding eps {eps} must be positive")));
    }
    for j in 0..e.senders() {
        if let Shaping::Typicality { eps_prime, .. } = e.shaping(j) {
            if eps <= *eps_prime {
                return Err(Error::InvalidParameter(format!(
                    "decoding eps {eps} must exceed the shaping eps {eps_prime}"
                )));
            }
        }
    }
    Ok(())
}

fn check_law(e: &HomologousEnsemble, law: &JointPmf, senders: usize) -> Result<usize> {
    let radices = law.radices();
    if radices.len() != senders + 1 || radices[..senders].iter().any(|&r| r != e.field().order()) {
        return Err(Error::DimensionMismatch(format!(
            "law needs {senders} axes over {} followed by one output axis",
            e.field()
        )));
    }
    Ok(radices[senders])
}

fn check_output(e: &HomologousEnsemble, ny: usize, y: &[usize]) -> Result<()> {
    if y.len() != e.n() {
        return Err(Error::DimensionMismatch(format!(
            "output sequence of length {}, blocklength {}",
            y.len(),
            e.n()
        )));
    }
    if let Some(s) = y.iter().find(|&&s| s >= ny) {
        return Err(Error::InvalidChannel(format!("output symbol {s} outside alphabet of size {ny}")));
    }
    Ok(())
}

type Entry = (usize, usize, Vec<Fq>);

struct Level<'a> {
    /// Masses of the marginal on `(X_0..X_depth, Y)`.
    probs: &'a [f64],
    survivors: Vec<&'a Entry>,
}

/// Message decoder for one code and law; codebooks and marginals are built
/// once and reused across outputs.
pub struct MessageDecoder<'a> {
    e: &'a HomologousEnsemble,
    opts: DecodeOptions,
    ny: usize,
    codebooks: Vec<Vec<Entry>>,
    /// Marginal of `(X_j, Y)` per sender.
    pairs: Vec<Vec<f64>>,
    /// Marginal of `(X_0..X_j, Y)` per sender.
    prefixes: Vec<Vec<f64>>,
}

impl<'a> MessageDecoder<'a> {
    pub fn new(e: &'a HomologousEnsemble, law: &JointPmf, opts: &DecodeOptions) -> Result<Self> {
        check_eps(e, opts.eps)?;
        let k = e.senders();
        let ny = check_law(e, law, k)?;
        let space: f64 = (0..k).map(|j| e.codebook_size(j)).product();
        if space > opts.guard {
            return Err(Error::GuardExceeded { size: space, limit: opts.guard });
        }
        let trivial = e.dims().iter().all(|d| d.k == 0);
        let codebooks = if trivial {
            Vec::new()
        } else {
            (0..k).map(|j| e.codebook(j)).collect::<Result<Vec<_>>>()?
        };
        Ok(MessageDecoder {
            e,
            opts: *opts,
            ny,
            codebooks,
            pairs: (0..k).map(|j| law.marginal_table(&[j, k])).collect(),
            prefixes: (0..k)
                .map(|j| law.marginal_table(&(0..=j).chain([k]).collect::<Vec<_>>()))
                .collect(),
        })
    }

    /// Finds every message tuple whose codewords, for some shaping indices,
    /// are jointly typical with `y`.
    pub fn decode(&self, y: &[usize]) -> Result<DecodeResult> {
        let e = self.e;
        let (k, ny, opts) = (e.senders(), self.ny, &self.opts);
        check_output(e, ny, y)?;
        if self.codebooks.is_empty() {
            // A single message tuple is known without looking at y.
            return Ok(DecodeResult {
                status: DecodeStatus::Ok,
                messages: Some(vec![Vec::new(); k]),
                candidates: Vec::new(),
            });
        }
        let n = e.n();
        let q = e.field().order();
        let mut counts = vec![0u64; q * ny];
        let levels: Vec<Level> = (0..k)
            .map(|j| Level {
                probs: &self.prefixes[j],
                survivors: self.codebooks[j]
                    .iter()
                    .filter(|(_, _, x)| {
                        counts.iter_mut().for_each(|c| *c = 0);
                        for (s, &yi) in x.iter().zip(y) {
                            counts[s.index() * ny + yi] += 1;
                        }
                        counts_typical(&self.pairs[j], &counts, n, opts.eps)
                    })
                    .collect(),
            })
            .collect();

        let mut candidates = Vec::new();
        let mut tuples = BTreeSet::new();
        let mut chosen = Vec::with_capacity(k);
        let mut prefix = vec![vec![0usize; n]; k + 1];
        let mut scratch = Vec::new();
        search(
            &levels,
            y,
            ny,
            q,
            opts,
            0,
            &mut prefix,
            &mut chosen,
            &mut scratch,
            &mut candidates,
            &mut tuples,
        );

        let status = match tuples.len() {
            0 => DecodeStatus::NoCandidate,
            1 => DecodeStatus::Ok,
            _ => DecodeStatus::Ambiguous,
        };
        let messages = (status == DecodeStatus::Ok).then(|| {
            let t = tuples.iter().next().unwrap();
            t.iter()
                .zip(e.dims())
                .map(|(&mi, d)| e.field().vector_from_index(mi, d.k))
                .collect()
        });
        candidates.sort();
        Ok(DecodeResult {
            status,
            messages,
            candidates,
        })
    }
}

/// Finds every message tuple whose codewords, for some shaping indices, are
/// jointly `eps`-typical with `y` under `law` (axes `X_1..X_k, Y`, inputs
/// indexed by field element).
pub fn decode_messages(
    e: &HomologousEnsemble,
    law: &JointPmf,
    y: &[usize],
    opts: &DecodeOptions,
) -> Result<DecodeResult> {
    MessageDecoder::new(e, law, opts)?.decode(y)
}

/// Depth-first search over senders. `prefix[j][i]` is the mixed-radix index
/// of the symbols chosen for senders `0..j` at position `i`.
#[allow(clippy::too_many_arguments)]
fn search(
    levels: &[Level],
    y: &[usize],
    ny: usize,
    q: usize,
    opts: &DecodeOptions,
    depth: usize,
    prefix: &mut Vec<Vec<usize>>,
    chosen: &mut Vec<(usize, usize)>,
    counts: &mut Vec<u64>,
    candidates: &mut Vec<Candidate>,
    tuples: &mut BTreeSet<Vec<usize>>,
) -> bool {
    if depth == levels.len() {
        let messages: Vec<usize> = chosen.iter().map(|c| c.0).collect();
        tuples.insert(messages.clone());
        candidates.push(Candidate {
            messages,
            shaping: chosen.iter().map(|c| c.1).collect(),
        });
        return !opts.exhaustive && tuples.len() > 1;
    }
    let level = &levels[depth];
    let n = y.len();
    for &&(mi, li, ref x) in &level.survivors {
        let (head, tail) = prefix.split_at_mut(depth + 1);
        let next = &mut tail[0];
        for i in 0..n {
            next[i] = head[depth][i] * q + x[i].index();
        }
        if depth > 0 {
            counts.clear();
            counts.resize(level.probs.len(), 0);
            for i in 0..n {
                counts[next[i] * ny + y[i]] += 1;
            }
            if !counts_typical(level.probs, counts, n, opts.eps) {
                continue;
            }
        }
        chosen.push((mi, li));
        let stop = search(levels, y, ny, q, opts, depth + 1, prefix, chosen, counts, candidates, tuples);
        chosen.pop();
        if stop {
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq)]
pub struct CombinationResult {
    pub status: DecodeStatus,
    /// The recovered `a1 [m1 l1 0] + a2 [m2 l2 0]`, present exactly when `Ok`.
    pub combination: Option<Vec<Fq>>,
    /// Indices of every typical combination vector.
    pub candidates: Vec<usize>,
}

/// The combination vector `a1 u1 + a2 u2` that a computation receiver should
/// recover, given each sender's padded row vector.
pub fn combination_of(e: &HomologousEnsemble, a: &[Fq], padded: &[Vec<Fq>]) -> Vec<Fq> {
    let f = e.field();
    vec_add(f, &vec_scale(f, a[0], &padded[0]), &vec_scale(f, a[1], &padded[1]))
}

/// Law of `(a1 X1 + a2 X2, Y)` derived from a law on `(X1, X2, Y)`.
pub fn combination_law(e: &HomologousEnsemble, law: &JointPmf, a: &[Fq]) -> Result<Vec<f64>> {
    let f = e.field();
    let q = f.order();
    let ny = law.radices()[2];
    let mut out = vec![0.0; q * ny];
    law.for_each(|t, p| {
        let w = f.add(f.mul(a[0], Fq(t[0] as u32)), f.mul(a[1], Fq(t[1] as u32)));
        out[w.index() * ny + t[2]] += p;
    });
    Ok(out)
}

/// Searches every `s ∈ F_q^κ` for which `s G + a1 d1 + a2 d2` is jointly
/// typical with `y` under the law of `(a1 X1 + a2 X2, Y)`.
pub fn decode_linear_combination(
    e: &HomologousEnsemble,
    a: &[Fq],
    law: &JointPmf,
    y: &[usize],
    opts: &DecodeOptions,
) -> Result<CombinationResult> {
    if e.senders() != 2 || a.len() != 2 || a.iter().any(|c| c.is_zero() || !e.field().contains(*c)) {
        return Err(Error::InvalidParameter(
            "need two senders and two nonzero coefficients".into(),
        ));
    }
    check_eps(e, opts.eps)?;
    let ny = check_law(e, law, 2)?;
    check_output(e, ny, y)?;
    let f = e.field();
    let kappa = e.kappa();
    let space = (f.q() as f64).powi(kappa as i32);
    if space > opts.guard {
        return Err(Error::GuardExceeded { size: space, limit: opts.guard });
    }
    let probs = combination_law(e, law, a)?;
    let base = vec_add(f, &vec_scale(f, a[0], e.dither(0)), &vec_scale(f, a[1], e.dither(1)));
    let rows: Vec<usize> = (0..kappa).collect();
    let n = e.n();
    let mut counts = vec![0u64; probs.len()];
    let mut candidates = Vec::new();
    for (idx, w) in CodewordIter::new(f, e.generator(), &rows, &base) {
        counts.iter_mut().for_each(|c| *c = 0);
        for (s, &yi) in w.iter().zip(y) {
            counts[s.index() * ny + yi] += 1;
        }
        if counts_typical(&probs, &counts, n, opts.eps) {
            candidates.push(idx);
            if !opts.exhaustive && candidates.len() > 1 {
                break;
            }
        }
    }
    let status = match candidates.len() {
        0 => DecodeStatus::NoCandidate,
        1 => DecodeStatus::Ok,
        _ => DecodeStatus::Ambiguous,
    };
    let combination = (status == DecodeStatus::Ok).then(|| f.vector_from_index(candidates[0], kappa));
    Ok(CombinationResult {
        status,
        combination,
        candidates,
    })
}

//! Seeded Monte Carlo estimation of decoding error probability.
//!
//! Every trial draws its own randomness from a seed derived from the master
//! seed, the rate point, the blocklength and the trial index, so results do
//! not depend on how trials are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{builtin, ChannelSpec, TransformMap};
use crate::code::{
    construct_adder_example, construct_erasure_example, HomologousEnsemble, SenderDims, Shaping,
};
use crate::decode::{DecodeOptions, DecodeResult, DecodeStatus, MessageDecoder};
use crate::error::{Error, Result};
use crate::gf::{FieldMatrix, FieldSpec, Fq};
use crate::prob::{JointPmf, Pmf};

pub const DEFAULT_SHAPING_EPS: f64 = 0.1;
pub const DEFAULT_DECODING_EPS: f64 = 0.2;

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959963984540054;

const RATE_TOLERANCE: f64 = 1e-9;

/// A channel given by built-in name, by name with a parameter, or inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelRef {
    Name(String),
    Inline(serde_json::Value),
}

impl ChannelRef {
    pub fn resolve(&self) -> Result<ChannelSpec> {
        match self {
            ChannelRef::Name(name) => builtin(name, None),
            ChannelRef::Inline(v) => match v.get("builtin") {
                Some(name) => {
                    let name = name
                        .as_str()
                        .ok_or_else(|| Error::Parse("builtin must be a string".into()))?;
                    let p = match v.get("p") {
                        None => None,
                        Some(p) => Some(
                            p.as_f64()
                                .ok_or_else(|| Error::Parse("p must be a number".into()))?,
                        ),
                    };
                    builtin(name, p)
                }
                None => ChannelSpec::from_json(&v.to_string()),
            },
        }
    }
}

/// A message rate, optionally with a shaping rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateSpec {
    Message(f64),
    WithShaping([f64; 2]),
}

impl RateSpec {
    pub fn pair(self) -> (f64, f64) {
        match self {
            RateSpec::Message(r) => (r, 0.0),
            RateSpec::WithShaping([r, rh]) => (r, rh),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateUnits {
    #[default]
    Bits,
    /// Field symbols per channel use.
    Symbols,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    /// Joint typicality with the configured `eps`.
    #[default]
    Typicality,
    /// Every tuple with positive likelihood is a candidate.
    Support,
}

/// Where the codes come from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodeMode {
    /// A fresh random ensemble per trial.
    #[default]
    Ensemble,
    /// One random ensemble per (rate point, n), shared by its trials.
    Fixed,
    /// The deterministic binary adder pair: `[m1 0]` and `[m2 0 m2]`.
    AdderExample,
    /// The deterministic erasure pair built from the generator rows `a`.
    ErasureExample { a: Vec<Vec<u32>> },
}

fn default_shaping_eps() -> f64 {
    DEFAULT_SHAPING_EPS
}

fn default_decoding_eps() -> f64 {
    DEFAULT_DECODING_EPS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub channel: ChannelRef,
    /// Receiver whose output is decoded.
    #[serde(default)]
    pub receiver: usize,
    pub field: FieldSpec,
    pub n: Vec<usize>,
    /// Rate tuples, one rate (or rate and shaping rate) per sender.
    pub rates: Vec<Vec<RateSpec>>,
    #[serde(default)]
    pub units: RateUnits,
    /// Laws of the field-valued inputs; uniform when absent.
    #[serde(default)]
    pub pmfs: Option<Vec<Vec<f64>>>,
    /// Maps from field elements to physical inputs.
    #[serde(default)]
    pub transform: Option<TransformMap>,
    #[serde(default = "default_shaping_eps")]
    pub eps_prime: f64,
    #[serde(default = "default_decoding_eps")]
    pub eps: f64,
    #[serde(default)]
    pub decoder: DecoderKind,
    #[serde(default)]
    pub code: CodeMode,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub guard: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Rates in field symbols per channel use.
    fn symbol_rates(&self, point: usize) -> Vec<(f64, f64)> {
        let scale = match self.units {
            RateUnits::Bits => (self.field.q() as f64).log2(),
            RateUnits::Symbols => 1.0,
        };
        self.rates[point]
            .iter()
            .map(|r| {
                let (a, b) = r.pair();
                (a / scale, b / scale)
            })
            .collect()
    }

    /// Dimensions at blocklength `n`, rounded to the nearest integer.
    pub fn dims(&self, point: usize, n: usize) -> Vec<SenderDims> {
        self.symbol_rates(point)
            .iter()
            .map(|&(r, rh)| {
                SenderDims::new(
                    (r * n as f64).round() as usize,
                    (rh * n as f64).round() as usize,
                )
            })
            .collect()
    }
}

/// Outcome of one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Success,
    NoCandidate,
    Ambiguous,
    Wrong,
}

impl TrialOutcome {
    pub fn is_success(self) -> bool {
        self == TrialOutcome::Success
    }
}

/// A validated experiment with its channel and decoding law resolved.
#[derive(Clone, Debug)]
pub struct Experiment {
    cfg: ExperimentConfig,
    channel: ChannelSpec,
    law: JointPmf,
    pmfs: Vec<Pmf>,
}

impl Experiment {
    pub fn new(cfg: ExperimentConfig) -> Result<Self> {
        if !(cfg.eps_prime > 0.0 && cfg.eps > cfg.eps_prime && cfg.eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need eps > eps_prime > 0, got eps = {}, eps_prime = {}",
                cfg.eps, cfg.eps_prime
            )));
        }
        if cfg.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if cfg.n.is_empty() || cfg.n.contains(&0) {
            return Err(Error::InvalidParameter("n must list positive blocklengths".into()));
        }
        if cfg.rates.is_empty() {
            return Err(Error::InvalidParameter("rates must list at least one tuple".into()));
        }
        let physical = cfg.channel.resolve()?;
        if cfg.receiver >= physical.r() {
            return Err(Error::InvalidParameter(format!(
                "receiver {} of a channel with {} receivers",
                cfg.receiver,
                physical.r()
            )));
        }
        let mut channel = physical.receiver(cfg.receiver)?;
        if let Some(maps) = &cfg.transform {
            channel = channel.transform(maps)?;
        }
        let k = channel.k();
        let q = cfg.field.order();
        if let Some(j) = channel.input_sizes().iter().position(|&s| s != q) {
            return Err(Error::DimensionMismatch(format!(
                "sender {} has {} inputs, the field has {q} elements",
                j + 1,
                channel.input_sizes()[j]
            )));
        }
        for (i, tuple) in cfg.rates.iter().enumerate() {
            if tuple.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "rate tuple {} has {} entries for {k} senders",
                    i + 1,
                    tuple.len()
                )));
            }
            for (r, rh) in cfg.symbol_rates(i) {
                if !(r >= 0.0 && rh >= 0.0 && r.is_finite() && rh.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "rates must be finite and nonnegative in tuple {}",
                        i + 1
                    )));
                }
                if r > 1.0 + RATE_TOLERANCE {
                    return Err(Error::InvalidParameter(format!(
                        "message rate in tuple {} exceeds log q",
                        i + 1
                    )));
                }
            }
        }
        let pmfs = match &cfg.pmfs {
            Some(ps) => {
                if ps.len() != k {
                    return Err(Error::DimensionMismatch(format!("{} pmfs for {k} senders", ps.len())));
                }
                ps.iter()
                    .map(|p| Pmf::over_field(&cfg.field, p.clone()))
                    .collect::<Result<Vec<_>>>()?
            }
            None => vec![Pmf::uniform(q)?; k],
        };
        let law = channel.joint(&pmfs)?;
        match &cfg.code {
            CodeMode::AdderExample => {
                if k != 2 || cfg.field.q() != 2 {
                    return Err(Error::InvalidParameter(
                        "the adder construction needs two senders over GF(2)".into(),
                    ));
                }
            }
            CodeMode::ErasureExample { a } => {
                if k != 2 || cfg.field.q() != 2 {
                    return Err(Error::InvalidParameter(
                        "the erasure construction needs two senders over GF(2)".into(),
                    ));
                }
                let rows: Vec<&[u32]> = a.iter().map(Vec::as_slice).collect();
                let cols = a.first().map_or(0, Vec::len);
                FieldMatrix::from_u32_rows(&cfg.field, &rows)?;
                if let Some(&n) = cfg.n.iter().find(|&&n| n != 2 * cols) {
                    return Err(Error::InvalidParameter(format!(
                        "the erasure construction has blocklength {}, not {n}",
                        2 * cols
                    )));
                }
            }
            CodeMode::Ensemble | CodeMode::Fixed => {}
        }
        Ok(Experiment {
            cfg,
            channel,
            law,
            pmfs,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    /// The single-receiver channel seen by the decoder, on field inputs.
    pub fn channel(&self) -> &ChannelSpec {
        &self.channel
    }

    fn options(&self) -> DecodeOptions {
        let eps = match self.cfg.decoder {
            DecoderKind::Typicality => self.cfg.eps,
            DecoderKind::Support => f64::INFINITY,
        };
        let mut opts = DecodeOptions::new(eps).fast();
        if let Some(g) = self.cfg.guard {
            opts.guard = g;
        }
        opts
    }

    fn sample_ensemble<R: Rng>(&self, dims: Vec<SenderDims>, n: usize, rng: &mut R) -> Result<HomologousEnsemble> {
        let shaping = self
            .pmfs
            .iter()
            .map(|p| Shaping::Typicality {
                pmf: p.clone(),
                eps_prime: self.cfg.eps_prime,
            })
            .collect();
        HomologousEnsemble::sample(&self.cfg.field, n, dims, shaping, rng)
    }

    /// The code used at `(point, n)` when it does not change between trials.
    fn fixed_code(&self, point: usize, n: usize) -> Result<Option<HomologousEnsemble>> {
        let dims = self.cfg.dims(point, n);
        match &self.cfg.code {
            CodeMode::Ensemble => Ok(None),
            CodeMode::Fixed => {
                let seed = trial_seed(self.cfg.seed, point as u64, n as u64, u64::MAX);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(Some(self.sample_ensemble(dims, n, &mut rng)?.with_seed(seed)))
            }
            CodeMode::AdderExample => {
                let (k1, k2) = (dims[0].k, dims[1].k);
                let (k1, k2) = if k1 >= k2 { (k1, k2) } else { (k2, k1) };
                construct_adder_example(n, k1, k2).map(Some)
            }
            CodeMode::ErasureExample { a } => {
                let rows: Vec<&[u32]> = a.iter().map(Vec::as_slice).collect();
                let a = FieldMatrix::from_u32_rows(&self.cfg.field, &rows)?;
                Ok(Some(construct_erasure_example(&a)?.ensemble))
            }
        }
    }

    /// Runs one trial at rate tuple `point` and blocklength `n`.
    pub fn run_trial(&self, point: usize, n: usize, seed: u64) -> Result<TrialOutcome> {
        match self.fixed_code(point, n)? {
            Some(e) => {
                let decoder = MessageDecoder::new(&e, &self.law, &self.options())?;
                self.trial_with(Some((&e, &decoder)), point, n, seed)
            }
            None => self.trial_with(None, point, n, seed),
        }
    }

    fn trial_with(
        &self,
        fixed: Option<(&HomologousEnsemble, &MessageDecoder)>,
        point: usize,
        n: usize,
        seed: u64,
    ) -> Result<TrialOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampled;
        let e = match fixed {
            Some((e, _)) => e,
            None => {
                sampled = self.sample_ensemble(self.cfg.dims(point, n), n, &mut rng)?;
                &sampled
            }
        };
        let field = e.field();
        let messages: Vec<Vec<Fq>> = e.dims().iter().map(|d| field.random_vec(d.k, &mut rng)).collect();
        let y = send(e, &self.channel, &messages, &mut rng)?;
        let result = match fixed {
            Some((_, decoder)) => decoder.decode(&y)?,
            None => MessageDecoder::new(e, &self.law, &self.options())?.decode(&y)?,
        };
        Ok(classify(&result, &messages))
    }

    /// One row per `(n, rate tuple)`, blocklengths outermost.
    pub fn estimate_pe(&self) -> Result<Vec<EstimateRow>> {
        let scale = match self.cfg.units {
            RateUnits::Bits => (self.cfg.field.q() as f64).log2(),
            RateUnits::Symbols => 1.0,
        };
        let mut rows = Vec::new();
        for &n in &self.cfg.n {
            for point in 0..self.cfg.rates.len() {
                let fixed = self.fixed_code(point, n)?;
                let decoder = match &fixed {
                    Some(e) => Some(MessageDecoder::new(e, &self.law, &self.options())?),
                    None => None,
                };
                let dims: Vec<SenderDims> = match &fixed {
                    Some(e) => e.dims().to_vec(),
                    None => self.cfg.dims(point, n),
                };
                let shared = fixed.as_ref().zip(decoder.as_ref());
                let outcomes = run_trials(self.cfg.trials, |t| {
                    let seed = trial_seed(self.cfg.seed, point as u64, n as u64, t as u64);
                    self.trial_with(shared, point, n, seed)
                })?;
                let rates = dims.iter().map(|d| d.k as f64 / n as f64 * scale).collect();
                rows.push(EstimateRow::from_outcomes(n, rates, &outcomes));
            }
        }
        Ok(rows)
    }
}

/// Shapes and transmits one message per sender; returns the first output.
fn send<R: Rng>(e: &HomologousEnsemble, channel: &ChannelSpec, messages: &[Vec<Fq>], rng: &mut R) -> Result<Vec<usize>> {
    let mut inputs = Vec::with_capacity(e.senders());
    for (j, m) in messages.iter().enumerate() {
        let shaped = e.shape(j, m, rng)?;
        inputs.push(shaped.codeword.iter().map(|s| s.index()).collect::<Vec<_>>());
    }
    let refs: Vec<&[usize]> = inputs.iter().map(Vec::as_slice).collect();
    Ok(channel.transmit(&refs, rng)?.remove(0))
}

fn classify(result: &DecodeResult, sent: &[Vec<Fq>]) -> TrialOutcome {
    match result.status {
        DecodeStatus::NoCandidate => TrialOutcome::NoCandidate,
        DecodeStatus::Ambiguous => TrialOutcome::Ambiguous,
        DecodeStatus::Ok if result.messages.as_deref() == Some(sent) => TrialOutcome::Success,
        DecodeStatus::Ok => TrialOutcome::Wrong,
    }
}

/// Validates `cfg` and runs one trial.
pub fn run_trial(cfg: &ExperimentConfig, point: usize, n: usize, seed: u64) -> Result<TrialOutcome> {
    Experiment::new(cfg.clone())?.run_trial(point, n, seed)
}

/// Validates `cfg` and estimates the error probability at every point.
pub fn estimate_pe(cfg: &ExperimentConfig) -> Result<Vec<EstimateRow>> {
    Experiment::new(cfg.clone())?.estimate_pe()
}

/// Runs trials `0..trials` in parallel and returns outcomes in trial order.
pub fn run_trials<F>(trials: usize, f: F) -> Result<Vec<TrialOutcome>>
where
    F: Fn(usize) -> Result<TrialOutcome> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of one trial, a hash of its coordinates.
pub fn trial_seed(master: u64, point: u64, n: u64, trial: u64) -> u64 {
    [point, n, trial]
        .iter()
        .fold(splitmix64(master), |h, &x| splitmix64(h ^ splitmix64(x)))
}

/// 95% Wilson score interval for `failures` out of `trials`.
pub fn wilson_interval(failures: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let t = trials as f64;
    let p = failures as f64 / t;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = WILSON_Z / denom * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt();
    // The endpoints at p = 0 and p = 1 are exact; rounding would move them.
    let lo = if failures == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateRow {
    pub n: usize,
    /// Message rates actually used, after rounding dimensions.
    pub rates: Vec<f64>,
    pub trials: usize,
    pub fail_nc: usize,
    pub fail_amb: usize,
    pub fail_wrong: usize,
    pub pe_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl EstimateRow {
    pub fn from_outcomes(n: usize, rates: Vec<f64>, outcomes: &[TrialOutcome]) -> Self {
        let count = |o: TrialOutcome| outcomes.iter().filter(|&&x| x == o).count();
        let (nc, amb, wrong) = (
            count(TrialOutcome::NoCandidate),
            count(TrialOutcome::Ambiguous),
            count(TrialOutcome::Wrong),
        );
        let trials = outcomes.len();
        let failures = nc + amb + wrong;
        let (ci_lo, ci_hi) = wilson_interval(failures, trials);
        EstimateRow {
            n,
            rates,
            trials,
            fail_nc: nc,
            fail_amb: amb,
            fail_wrong: wrong,
            pe_hat: if trials == 0 { 0.0 } else { failures as f64 / trials as f64 },
            ci_lo,
            ci_hi,
        }
    }

    pub fn failures(&self) -> usize {
        self.fail_nc + self.fail_amb + self.fail_wrong
    }
}

/// CSV with columns `n, R1..Rk, trials, fail_nc, fail_amb, fail_wrong,
/// pe_hat, ci_lo, ci_hi`.
pub fn rows_to_csv(rows: &[EstimateRow]) -> Result<String> {
    let k = rows.iter().map(|r| r.rates.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["n".to_string()];
    header.extend((1..=k).map(|j| format!("R{j}")));
    header.extend(
        ["trials", "fail_nc", "fail_amb", "fail_wrong", "pe_hat", "ci_lo", "ci_hi"].map(String::from),
    );
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.n.to_string()];
        rec.extend((0..k).map(|j| r.rates.get(j).map_or(String::new(), f64::to_string)));
        rec.extend([
            r.trials.to_string(),
            r.fail_nc.to_string(),
            r.fail_amb.to_string(),
            r.fail_wrong.to_string(),
            r.pe_hat.to_string(),
            r.ci_lo.to_string(),
            r.ci_hi.to_string(),
        ]);
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error().to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn rows_to_json(rows: &[EstimateRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

/// Decoding outcomes of a fixed code over every message tuple.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExhaustiveReport {
    pub tuples: usize,
    pub fail_nc: usize,
    pub fail_amb: usize,
    pub fail_wrong: usize,
}

impl ExhaustiveReport {
    pub fn failures(&self) -> usize {
        self.fail_nc + self.fail_amb + self.fail_wrong
    }
}

/// Sends every message tuple of `e` through the deterministic `channel` and
/// decodes with support-only typicality, which any channel output admits
/// for the transmitted tuple.
pub fn exhaustive_check(e: &HomologousEnsemble, channel: &ChannelSpec) -> Result<ExhaustiveReport> {
    if !channel.is_deterministic() || channel.r() != 1 {
        return Err(Error::InvalidChannel(
            "exhaustive checks need a deterministic single-receiver channel".into(),
        ));
    }
    let q = e.field().order();
    if channel.input_sizes().iter().any(|&s| s != q) || channel.k() != e.senders() {
        return Err(Error::DimensionMismatch("channel inputs do not match the code".into()));
    }
    let law = channel.joint(&vec![Pmf::uniform(q)?; e.senders()])?;
    let counts: Vec<usize> = e.dims().iter().map(|d| q.pow(d.k as u32)).collect();
    let tuples: usize = counts.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut report = ExhaustiveReport {
        tuples,
        fail_nc: 0,
        fail_amb: 0,
        fail_wrong: 0,
    };
    let decoder = MessageDecoder::new(e, &law, &DecodeOptions::new(f64::INFINITY))?;
    for t in 0..tuples {
        let mut rest = t;
        let mut messages = Vec::with_capacity(counts.len());
        for (j, &c) in counts.iter().enumerate() {
            messages.push(e.field().vector_from_index(rest % c, e.dims()[j].k));
            rest /= c;
        }
        let y = send(e, channel, &messages, &mut rng)?;
        match classify(&decoder.decode(&y)?, &messages) {
            TrialOutcome::NoCandidate => report.fail_nc += 1,
            TrialOutcome::Ambiguous => report.fail_amb += 1,
            TrialOutcome::Wrong => report.fail_wrong += 1,
            TrialOutcome::Success => {}
        }
    }
    Ok(report)
}

/// Result of the same-generator coset code experiment on the binary erasure MAC.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CosetBoundReport {
    pub n: usize,
    pub eps: f64,
    /// Message dimension `n (1/2 + eps)`.
    pub k: usize,
    pub trials: usize,
    pub failures: usize,
    pub pe_hat: f64,
    /// Standard error of `pe_hat`.
    pub sigma: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Error probability lower bound `2ε / (1 + 2ε)` for rates `1/2 + ε`.
pub fn coset_lower_bound(eps: f64) -> f64 {
    2.0 * eps / (1.0 + 2.0 * eps)
}

/// Draws a full-rank `k × n` binary generator without zero columns.
fn sample_coset_generator<R: Rng>(field: &FieldSpec, k: usize, n: usize, rng: &mut R) -> FieldMatrix {
    loop {
        let g = FieldMatrix::random(field, k, n, rng);
        let zero_column = (0..n).any(|c| (0..k).all(|r| g.get(r, c).is_zero()));
        if !zero_column && g.rank() == k {
            return g;
        }
    }
}

/// One draw of the experiment: codes, messages and channel output.
struct CosetDraw {
    g: FieldMatrix,
    #[cfg_attr(not(test), allow(dead_code))]
    dithers: [Vec<Fq>; 2],
    #[cfg_attr(not(test), allow(dead_code))]
    messages: [Vec<Fq>; 2],
    y: Vec<usize>,
}

fn coset_draw(field: &FieldSpec, channel: &ChannelSpec, k: usize, n: usize, seed: u64) -> Result<CosetDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = sample_coset_generator(field, k, n, &mut rng);
    let dithers = [field.random_vec(n, &mut rng), field.random_vec(n, &mut rng)];
    let messages = [field.random_vec(k, &mut rng), field.random_vec(k, &mut rng)];
    let mut inputs = Vec::with_capacity(2);
    for (m, d) in messages.iter().zip(&dithers) {
        let x = g.vec_mul(m)?;
        inputs.push(
            x.iter()
                .zip(d)
                .map(|(&a, &b)| field.add(a, b).index())
                .collect::<Vec<_>>(),
        );
    }
    let y = channel.transmit(&[&inputs[0], &inputs[1]], &mut rng)?.remove(0);
    Ok(CosetDraw {
        g,
        dithers,
        messages,
        y,
    })
}

/// Number of message pairs consistent with the output, `2^(k - rank G_S)`
/// where `S` holds the unerased positions, returned as its exponent.
///
/// With `G` of full row rank the sum `m1 + m2` is pinned down by the parity
/// of `y`; the unerased positions then fix `m1 G_S`.
fn ambiguity_dimension(g: &FieldMatrix, y: &[usize]) -> usize {
    let unerased: Vec<usize> = (0..y.len()).filter(|&i| y[i] != 1).collect();
    g.rows() - g.select_columns(&unerased).rank()
}

/// Estimates the error probability of same-generator binary coset codes at
/// rates `1/2 + eps` on the binary erasure MAC and compares it with the lower
/// bound. Decoding is optimal: it fails exactly when more than one message
/// pair explains the output.
pub fn coset_bound_check(n: usize, eps: f64, trials: usize, seed: u64) -> Result<CosetBoundReport> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidParameter(format!("eps {eps} must lie in (0, 1/2]")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let exact = n as f64 * (0.5 + eps);
    let k = exact.round() as usize;
    if k == 0 || (exact - k as f64).abs() > RATE_TOLERANCE * n as f64 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} gives non-integral message dimension {exact}"
        )));
    }
    let field = FieldSpec::binary();
    let channel = builtin("binary_erasure", None)?;
    let outcomes = run_trials(trials, |t| {
        let draw = coset_draw(&field, &channel, k, n, trial_seed(seed, 0, n as u64, t as u64))?;
        Ok(if ambiguity_dimension(&draw.g, &draw.y) == 0 {
            TrialOutcome::Success
        } else {
            TrialOutcome::Ambiguous
        })
    })?;
    let failures = outcomes.iter().filter(|o| !o.is_success()).count();
    let pe_hat = failures as f64 / trials as f64;
    let sigma = (pe_hat * (1.0 - pe_hat) / trials as f64).sqrt();
    let bound = coset_lower_bound(eps);
    Ok(CosetBoundReport {
        n,
        eps,
        k,
        trials,
        failures,
        pe_hat,
        sigma,
        bound,
        satisfied: pe_hat >= bound - 3.0 * sigma,
    })
}

/// A batch of coset bound experiments, one per `(n, eps)` point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundCheckConfig {
    pub points: Vec<(usize, f64)>,
    pub trials: usize,
    pub seed: u64,
}

impl BoundCheckConfig {
    pub fn run(&self) -> Result<Vec<CosetBoundReport>> {
        self.points
            .iter()
            .map(|&(n, eps)| coset_bound_check(n, eps, self.trials, self.seed))
            .collect()
    }
}

pub fn bound_reports_to_csv(reports: &[CosetBoundReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error().to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

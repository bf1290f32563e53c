//! Command-line front end for rate-region evaluation and simulation.

pub mod parse;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use homolog::channel::{builtin, ChannelSpec};
use homolog::code::{construct_adder_example_rates, construct_erasure_example};
use homolog::gf::{FieldMatrix, FieldSpec, Fq};
use homolog::prob::Pmf;
use homolog::region::{
    boundary_csv, closed_form_region, compute_communicate_region, gaussian_region, linear_combination_region,
    mac_region, quantized_gaussian_region, shaping_region, simplified_combination_region, symmetric_rate_max,
    transform_region, ClosedForm, ParamGrid, RateRegion, Technique, TechniqueBuilder,
};
use homolog::sim::{
    bound_reports_to_csv, coset_bound_check, exhaustive_check, rows_to_csv, rows_to_json, BoundCheckConfig,
    Experiment, ExperimentConfig, RateSpec,
};

use crate::parse::{parse_binary_rows, parse_counts, parse_field, parse_numbers, parse_pmf_spec};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "HOMOLOG_THREADS";

#[derive(Parser, Debug)]
#[command(name = "homolog", version, about = "Rate regions and Monte Carlo runs for homologous codes on multiple access channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a rate region and write it as JSON and, in two dimensions, a CSV boundary.
    Region(RegionArgs),
    /// Maximize the symmetric rate of a technique over input distributions.
    Symrate(SymrateArgs),
    /// Estimate error probabilities from a JSON experiment config.
    Simulate(SimulateArgs),
    /// Check a deterministic construction over every message tuple.
    Construct(ConstructArgs),
    /// Run the same-generator coset code experiment on the binary erasure MAC.
    BoundCheck(BoundCheckArgs),
    /// Print the parameters and tables of a finite field.
    FieldInfo(FieldInfoArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct ChannelArgs {
    /// Built-in channel name, `gaussian`, or a path to a channel JSON file.
    #[arg(long)]
    pub channel: Option<String>,
    /// Parameter of the built-in channel (switch probability).
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// rmac, shaping, transform, combined, compute, prop4, corollary,
    /// capacity (Gaussian) or appendix:<tag> for closed forms.
    #[arg(long)]
    pub kind: Option<String>,
    /// Input laws, e.g. `u,u`, `0.3,0.5` or `1/2:1/4:1/4,u`.
    #[arg(long)]
    pub pmf: Option<String>,
    /// Parameter of the GF(4) combined construction.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Field of the linear-combination regions.
    #[arg(long, default_value = "2")]
    pub field: String,
    /// Gaussian SNRs `S1,S2`.
    #[arg(long)]
    pub snr: Option<String>,
    /// Gaussian quantization depths `j,kq`.
    #[arg(long)]
    pub quant: Option<String>,
    /// Re-emit a region read from this JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Rays used to trace two-dimensional boundaries.
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Report rates in base-q symbols instead of bits.
    #[arg(long)]
    pub base_q: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SymrateArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// mac, shaping, transform, combined or prop4.
    #[arg(long, alias = "kind")]
    pub technique: String,
    /// Grid spacing of the input parameters.
    #[arg(long, default_value_t = 1e-2)]
    pub grid: f64,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    /// Allow time sharing between grid points.
    #[arg(long)]
    pub convexify: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub base_q: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Experiment config (JSON).
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Blocklengths, e.g. `64,128,256`.
    #[arg(long)]
    pub n: Option<String>,
    /// One message-rate tuple replacing the config's rates, e.g. `0.7,0.25`.
    #[arg(long)]
    pub rates: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstructionKind {
    /// The binary adder pair with `G = I`.
    Adder,
    /// The binary erasure pair built from a generator `A`.
    Erasure,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub kind: ConstructionKind,
    #[arg(long)]
    pub n: Option<usize>,
    /// Message rates `R1,R2` of the adder pair; they must sum to one.
    #[arg(long)]
    pub rates: Option<String>,
    /// Generator rows of the erasure pair, e.g. `11111110`.
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundCheckArgs {
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    /// Rate excess over one half.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct FieldInfoArgs {
    /// Field order `q` or `p^m`.
    #[arg(long, default_value = "4")]
    pub field: String,
}

/// An invalid experiment config; reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Sizes the global thread pool from `HOMOLOG_THREADS` when set.
pub fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| anyhow!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Region(a) => cmd_region(&a),
        Command::Symrate(a) => cmd_symrate(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Construct(a) => cmd_construct(&a),
        Command::BoundCheck(a) => cmd_bound_check(&a),
        Command::FieldInfo(a) => cmd_field_info(&a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn symbol_scale(base_q: Option<u64>) -> anyhow::Result<(f64, String)> {
    match base_q {
        None => Ok((1.0, "bits".into())),
        Some(q) if q >= 2 => Ok(((q as f64).log2(), format!("base-{q} symbols"))),
        Some(q) => bail!("--base-q must be at least 2, got {q}"),
    }
}

fn load_channel(args: &ChannelArgs) -> anyhow::Result<ChannelSpec> {
    let name = args.channel.as_deref().ok_or_else(|| anyhow!("--channel is required"))?;
    let path = Path::new(name);
    if name.ends_with(".json") || path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {name}"))?;
        return Ok(ChannelSpec::from_json(&text)?);
    }
    Ok(builtin(name, args.p)?)
}

fn receivers(c: &ChannelSpec) -> anyhow::Result<Vec<ChannelSpec>> {
    Ok((0..c.r()).map(|i| c.receiver(i)).collect::<homolog::Result<Vec<_>>>()?)
}

fn pmfs_for(c: &ChannelSpec, spec: Option<&str>) -> anyhow::Result<Vec<Pmf>> {
    let sizes = c.input_sizes();
    match spec {
        Some(s) => Ok(parse_pmf_spec(s, &sizes)?),
        None => Ok(sizes.iter().map(|&s| Pmf::uniform(s)).collect::<homolog::Result<Vec<_>>>()?),
    }
}

fn field_of(spec: &str) -> anyhow::Result<FieldSpec> {
    let (p, m) = parse_field(spec)?;
    Ok(FieldSpec::new(p, m)?)
}

fn intersect_receivers(
    c: &ChannelSpec,
    f: impl Fn(&ChannelSpec) -> homolog::Result<RateRegion>,
) -> anyhow::Result<RateRegion> {
    let parts = receivers(c)?.iter().map(f).collect::<homolog::Result<Vec<_>>>()?;
    Ok(RateRegion::intersection(parts)?)
}

/// Builds the region selected by `--kind`, in bits.
pub fn build_region(a: &RegionArgs) -> anyhow::Result<RateRegion> {
    if let Some(path) = &a.input {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        return Ok(RateRegion::from_json(&text)?);
    }
    let kind = a.kind.as_deref().ok_or_else(|| anyhow!("--kind is required"))?;
    if let Some(tag) = kind.strip_prefix("appendix:") {
        let form = ClosedForm::parse(tag)?;
        let p = a.channel.p.unwrap_or(homolog::channel::EXAMPLE_SWITCH_PROB);
        return Ok(closed_form_region(form, p)?);
    }
    if a.channel.channel.as_deref() == Some("gaussian") {
        if kind != "capacity" {
            bail!("the Gaussian channel supports --kind capacity only");
        }
        let snr = parse_numbers(a.snr.as_deref().ok_or_else(|| anyhow!("--snr S1,S2 is required"))?)?;
        if snr.len() != 2 {
            bail!("--snr takes two values");
        }
        return Ok(match &a.quant {
            None => gaussian_region(snr[0], snr[1])?,
            Some(q) => {
                let jk = parse_counts(q)?;
                if jk.len() != 2 {
                    bail!("--quant takes two depths j,kq");
                }
                quantized_gaussian_region(snr[0], snr[1], jk[0] as u32, jk[1] as u32)?
            }
        });
    }
    let c = load_channel(&a.channel)?;
    let pmf = a.pmf.as_deref();
    match kind {
        "rmac" | "mac" => {
            let p = pmfs_for(&c, pmf)?;
            intersect_receivers(&c, |rc| mac_region(rc, &p))
        }
        "shaping" => {
            let p = pmfs_for(&c, pmf)?;
            intersect_receivers(&c, |rc| RateRegion::intersection(vec![mac_region(rc, &p)?, shaping_region(rc, &p)?]))
        }
        "transform" => {
            let p = pmfs_for(&c, pmf)?;
            intersect_receivers(&c, |rc| {
                RateRegion::intersection(vec![mac_region(rc, &p)?, transform_region(rc, &p)?])
            })
        }
        "prop4" | "linear" => {
            let (p, f) = (pmfs_for(&c, pmf)?, field_of(&a.field)?);
            intersect_receivers(&c, |rc| linear_combination_region(rc, &p, &f))
        }
        "corollary" => {
            let (p, f) = (pmfs_for(&c, pmf)?, field_of(&a.field)?);
            intersect_receivers(&c, |rc| simplified_combination_region(rc, &p, &f))
        }
        "combined" => Ok(TechniqueBuilder::new(&c, Technique::Combined)?.build(&[a.gamma])?),
        "compute" => Ok(compute_communicate_region(&c, a.gamma)?),
        "capacity" => bail!("--kind capacity needs --channel gaussian"),
        other => bail!("unknown region kind {other:?}"),
    }
}

fn cmd_region(a: &RegionArgs) -> anyhow::Result<()> {
    let (scale, _) = symbol_scale(a.base_q)?;
    let mut region = build_region(a)?;
    if scale != 1.0 {
        region = region.rescaled(scale)?;
    }
    match a.format {
        Format::Json => {
            emit(a.out.as_deref(), &(region.to_json() + "\n"))?;
            if let (Some(out), 2) = (&a.out, region.dim) {
                let csv = boundary_csv(&region.trace_boundary(a.samples)?)?;
                emit(Some(&out.with_extension("csv")), &csv)?;
            }
            Ok(())
        }
        Format::Csv => emit(a.out.as_deref(), &boundary_csv(&region.trace_boundary(a.samples)?)?),
    }
}

fn cmd_symrate(a: &SymrateArgs) -> anyhow::Result<()> {
    let technique = Technique::parse(&a.technique)?;
    let c = load_channel(&a.channel)?;
    let builder = TechniqueBuilder::new(&c, technique)?;
    let (dlo, dhi) = technique.domain();
    let grid = ParamGrid::new(technique.params(), a.lo.unwrap_or(dlo), a.hi.unwrap_or(dhi), a.grid)?;
    let best = symmetric_rate_max(|p| builder.build(p), &grid, a.convexify)?;
    let (scale, units) = symbol_scale(a.base_q)?;
    let rate = best.rate / scale;
    let text = match a.format {
        None => {
            let mut s = format!("symmetric rate: {rate:.6} {units}\n");
            for (point, w) in &best.witnesses {
                let coords: Vec<String> = point.iter().map(|x| format!("{x:.6}")).collect();
                s += &format!("  point ({}) weight {w:.6}\n", coords.join(", "));
            }
            s
        }
        Some(Format::Json) => {
            let witnesses: Vec<_> = best
                .witnesses
                .iter()
                .map(|(p, w)| json!({"params": p, "weight": w}))
                .collect();
            serde_json::to_string_pretty(&json!({
                "technique": a.technique,
                "rate": rate,
                "units": units,
                "convexify": a.convexify,
                "grid": a.grid,
                "witnesses": witnesses,
            }))? + "\n"
        }
        Some(Format::Csv) => {
            let mut s = String::from("rate,weight");
            for i in 1..=technique.params() {
                s += &format!(",param{i}");
            }
            s.push('\n');
            for (p, w) in &best.witnesses {
                s += &format!("{rate},{w}");
                for x in p {
                    s += &format!(",{x}");
                }
                s.push('\n');
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)
}

/// Reads and validates a config with the command-line overrides applied.
pub fn load_config(a: &SimulateArgs) -> anyhow::Result<ExperimentConfig> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("cannot read {}", a.config.display()))?;
    let mut cfg = ExperimentConfig::from_json(&text).map_err(|e| ConfigError(e.to_string()))?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(n) = &a.n {
        cfg.n = parse_counts(n).map_err(|e| ConfigError(e.to_string()))?;
    }
    if let Some(r) = &a.rates {
        let rates = parse_numbers(r).map_err(|e| ConfigError(e.to_string()))?;
        cfg.rates = vec![rates.into_iter().map(RateSpec::Message).collect()];
    }
    Ok(cfg)
}

fn cmd_simulate(a: &SimulateArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("cannot read {}", a.config.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| ConfigError(e.to_string()))?;
    if let Some(bc) = value.get("bound_check") {
        let mut cfg: BoundCheckConfig =
            serde_json::from_value(bc.clone()).map_err(|e| ConfigError(format!("bound_check: {e}")))?;
        if let Some(s) = a.seed {
            cfg.seed = s;
        }
        if let Some(t) = a.trials {
            cfg.trials = t;
        }
        let reports = cfg.run()?;
        let text = match a.format {
            Format::Csv => bound_reports_to_csv(&reports)?,
            Format::Json => serde_json::to_string_pretty(&reports)? + "\n",
        };
        return emit(a.out.as_deref(), &text);
    }
    let cfg = load_config(a)?;
    let exp = Experiment::new(cfg).map_err(|e| ConfigError(e.to_string()))?;
    let rows = exp.estimate_pe()?;
    let text = match a.format {
        Format::Csv => rows_to_csv(&rows)?,
        Format::Json => rows_to_json(&rows) + "\n",
    };
    emit(a.out.as_deref(), &text)
}

fn cmd_construct(a: &ConstructArgs) -> anyhow::Result<()> {
    let (ensemble, channel, label) = match a.kind {
        ConstructionKind::Adder => {
            let n = a.n.ok_or_else(|| anyhow!("--n is required"))?;
            let r = parse_numbers(a.rates.as_deref().unwrap_or("1/2,1/2"))?;
            if r.len() != 2 {
                bail!("--rates takes two values");
            }
            let e = construct_adder_example_rates(n, r[0], r[1])?;
            (e, builtin("binary_adder", None)?, "adder")
        }
        ConstructionKind::Erasure => {
            let rows = parse_binary_rows(a.a.as_deref().ok_or_else(|| anyhow!("--a is required"))?)?;
            let refs: Vec<&[u32]> = rows.iter().map(Vec::as_slice).collect();
            let m = FieldMatrix::from_u32_rows(&FieldSpec::binary(), &refs)?;
            let ex = construct_erasure_example(&m)?;
            (ex.ensemble, builtin("binary_erasure", None)?, "erasure")
        }
    };
    let report = exhaustive_check(&ensemble, &channel)?;
    let dims: Vec<_> = ensemble.dims().iter().map(|d| json!({"k": d.k, "k_hat": d.k_hat})).collect();
    let text = serde_json::to_string_pretty(&json!({
        "construction": label,
        "n": ensemble.n(),
        "dims": dims,
        "tuples": report.tuples,
        "fail_nc": report.fail_nc,
        "fail_amb": report.fail_amb,
        "fail_wrong": report.fail_wrong,
        "error_free": report.failures() == 0,
    }))? + "\n";
    emit(a.out.as_deref(), &text)
}

fn cmd_bound_check(a: &BoundCheckArgs) -> anyhow::Result<()> {
    let r = coset_bound_check(a.n, a.eps, a.trials, a.seed)?;
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&r)? + "\n",
        Format::Csv => bound_reports_to_csv(&[r])?,
    };
    emit(a.out.as_deref(), &text)
}

fn cmd_field_info(a: &FieldInfoArgs) -> anyhow::Result<()> {
    let f = field_of(&a.field)?;
    let mut info = json!({
        "field": f.to_string(),
        "p": f.p(),
        "m": f.m(),
        "q": f.q(),
        "modulus": f.modulus(),
    });
    if f.q() <= 16 {
        let table = |op: fn(&FieldSpec, Fq, Fq) -> Fq| -> Vec<Vec<u32>> {
            f.elements().map(|x| f.elements().map(|y| op(&f, x, y).0).collect()).collect()
        };
        info["add"] = json!(table(FieldSpec::add));
        info["mul"] = json!(table(FieldSpec::mul));
    }
    print!("{}", serde_json::to_string_pretty(&info)? + "\n");
    Ok(())
}

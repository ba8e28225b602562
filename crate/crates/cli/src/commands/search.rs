use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;
use xyz_core::params::repetitions_for_target;
use xyz_core::search::auto_parameters;
use xyz_core::{xyz_search, Design, InteractionHit, RealVector, Response, SearchConfig, SearchReport, SignVector, Transform};

use super::{digest_inputs, finish, parse_count, Count, OutputFormat};
use crate::dataset::Dataset;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::table::{fmt_f64, read_response, sink, write_err};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformArg {
    Sign,
    Unbiased,
}

impl From<TransformArg> for Transform {
    fn from(t: TransformArg) -> Self {
        match t {
            TransformArg::Sign => Transform::Sign,
            TransformArg::Unbiased => Transform::Unbiased,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SearchArgs {
    /// Dataset file holding X.
    #[arg(long)]
    pub data: PathBuf,
    /// Response: one-column CSV or dataset file. Values in {-1, 1} are
    /// treated as binary.
    #[arg(long)]
    pub response: PathBuf,
    /// Strength threshold.
    #[arg(long)]
    pub gamma: f64,
    /// Target probability of finding a pair of strength exactly `gamma`.
    #[arg(long, default_value_t = 0.99)]
    pub eta: f64,
    /// Subsample size.
    #[arg(long = "m", visible_alias = "M", default_value = "auto", value_parser = parse_count)]
    pub subsample_size: Count,
    /// Repetitions.
    #[arg(long = "l", visible_alias = "L", default_value = "auto", value_parser = parse_count)]
    pub repetitions: Count,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also search against -Y.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub negatives: bool,
    /// Binarization of real X.
    #[arg(long, value_enum)]
    pub transform: Option<TransformArg>,
    /// Per-repetition cap on candidate pairs (default 16 p).
    #[arg(long)]
    pub max_candidates: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Hit file; stdout if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

pub enum ResponseData {
    Signs(SignVector),
    Real(RealVector),
}

impl ResponseData {
    pub fn from_values(values: Vec<f64>) -> CliResult<Self> {
        if values.iter().all(|&v| v == 1.0 || v == -1.0) {
            let signs = values.iter().map(|&v| v as i8).collect();
            Ok(ResponseData::Signs(SignVector::new(signs)?))
        } else {
            Ok(ResponseData::Real(RealVector::new(values)?))
        }
    }

    pub fn as_response(&self) -> Response<'_> {
        match self {
            ResponseData::Signs(y) => Response::Signs(y),
            ResponseData::Real(y) => Response::Real(y),
        }
    }
}

pub fn design(d: &Dataset) -> Design<'_> {
    match d {
        Dataset::Binary(x) => Design::Binary(x),
        Dataset::Real(x) => Design::Real(x),
    }
}

#[derive(Serialize)]
struct HitRecord {
    j: usize,
    k: usize,
    strength: f64,
    repetition: usize,
    sign: &'static str,
}

impl From<&InteractionHit> for HitRecord {
    fn from(h: &InteractionHit) -> Self {
        Self {
            j: h.j,
            k: h.k,
            strength: h.strength,
            repetition: h.found_at_repetition,
            sign: h.sign.as_str(),
        }
    }
}

pub fn write_hits(out: &mut dyn Write, hits: &[InteractionHit], format: OutputFormat) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(out, "j,k,strength,repetition,sign")?;
            for h in hits {
                writeln!(out, "{},{},{},{},{}", h.j, h.k, fmt_f64(h.strength), h.found_at_repetition, h.sign.as_str())?;
            }
        }
        OutputFormat::Jsonl => {
            for h in hits {
                serde_json::to_writer(&mut *out, &HitRecord::from(h))?;
                writeln!(out)?;
            }
        }
    }
    out.flush()
}

/// Distinct pairs by decreasing strength, keeping the stronger sign.
fn strongest_pairs(report: &SearchReport) -> Vec<&InteractionHit> {
    let mut best: BTreeMap<(usize, usize), &InteractionHit> = BTreeMap::new();
    for h in &report.hits {
        let e = best.entry((h.j, h.k)).or_insert(h);
        if h.strength > e.strength {
            *e = h;
        }
    }
    let mut v: Vec<_> = best.into_values().collect();
    v.sort_by(|a, b| b.strength.total_cmp(&a.strength).then((a.j, a.k).cmp(&(b.j, b.k))));
    v
}

pub fn configure(args: &SearchArgs, data: &Dataset, y: &ResponseData) -> CliResult<(SearchConfig, serde_json::Value)> {
    if !(0.5..1.0).contains(&args.eta) {
        return Err(CliError::Usage(format!("--eta must be in [0.5, 1), got {}", args.eta)));
    }
    if matches!(data, Dataset::Real(_)) && args.transform.is_none() {
        return Err(CliError::Usage("real-valued X needs --transform sign|unbiased".into()));
    }
    if matches!(data, Dataset::Binary(_)) && args.transform.is_some() {
        return Err(CliError::Usage("--transform applies to real-valued X only".into()));
    }
    let transform = args.transform.map(Transform::from);
    let mut chosen = json!({});
    let (m, mut l) = match args.subsample_size.fixed() {
        Some(m) => (m, None),
        None => {
            let auto = auto_parameters(design(data), y.as_response(), args.gamma, args.eta, transform, args.seed)?;
            eprintln!(
                "auto M* = {}, gamma0 = p^(-1/M*) = {:.4}, predicted exponent = {}",
                auto.config.subsample_size,
                auto.choice.gamma0,
                auto.runtime_exponent.map_or("n/a (gamma <= gamma0)".into(), |e| format!("{e:.4}"))
            );
            chosen = json!({
                "subsample_size": auto.config.subsample_size,
                "gamma0": auto.choice.gamma0,
                "runtime_exponent": auto.runtime_exponent,
                "sampled_strengths": auto.sample_size,
                "at_range_cap": auto.choice.at_range_cap,
            });
            (auto.config.subsample_size, Some(auto.config.repetitions))
        }
    };
    if let Some(user) = args.repetitions.fixed() {
        l = Some(user);
    }
    let l = match l {
        Some(l) => l,
        None => repetitions_for_target(m, args.gamma, args.eta)?,
    };
    let mut config = SearchConfig::new(m, l, args.gamma)
        .with_seed(args.seed)
        .with_negatives(args.negatives);
    config.transform = transform;
    if let Some(cap) = args.max_candidates {
        config = config.with_max_candidates(cap);
    }
    Ok((config, chosen))
}

pub fn run(args: &SearchArgs) -> CliResult<()> {
    let start = Instant::now();
    let data = Dataset::read(&args.data)?;
    let y = ResponseData::from_values(read_response(&args.response)?)?;
    let (config, chosen) = configure(args, &data, &y)?;
    let report = xyz_search(design(&data), y.as_response(), &config)?;

    let mut out = sink(args.output.as_ref())?;
    write_hits(&mut out, &report.hits, args.format).map_err(|e| write_err(args.output.as_ref(), e))?;
    drop(out);

    let pairs = strongest_pairs(&report);
    eprintln!(
        "M = {}, L = {}, repetitions run = {}, candidates checked = {}, aborted = {}, distinct pairs = {}",
        config.subsample_size,
        config.repetitions,
        report.repetitions_run,
        report.candidates_checked,
        report.aborted.len(),
        pairs.len()
    );
    for h in pairs.iter().take(20) {
        eprintln!("  ({}, {}) {} strength {:.6}", h.j, h.k, h.sign.as_str(), h.strength);
    }

    let mut manifest = RunManifest::new("search", args.seed, args);
    digest_inputs(&mut manifest, &[&args.data, &args.response])?;
    manifest.summary = json!({
        "config": config,
        "auto": chosen,
        "repetitions_run": report.repetitions_run,
        "candidates_checked": report.candidates_checked,
        "candidate_pairs": report.candidate_pairs,
        "aborted": report.aborted,
        "hits": report.hits.len(),
        "estimated_cost": report.estimated_cost,
        "gamma0": report.gamma0,
    });
    finish(manifest, start, args.output.as_ref(), args.manifest.as_ref())
}

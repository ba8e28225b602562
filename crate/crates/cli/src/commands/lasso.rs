use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;
use serde_json::json;
use xyz_core::lasso::{lasso_path, KktScreen, LambdaGrid, LassoPath, LassoPathConfig, SolverParams, SparseFit};
use xyz_core::RealVector;

use super::{digest_inputs, finish, OutputFormat};
use crate::dataset::Dataset;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::table::{fmt_f64, read_response, sink, write_err};

fn parse_grid(s: &str) -> Result<(usize, f64), String> {
    let (t, eps) = s
        .split_once(',')
        .ok_or_else(|| format!("expected 'T,ratio', got '{s}'"))?;
    let t: usize = t.trim().parse().map_err(|_| format!("bad grid size '{t}'"))?;
    let eps: f64 = eps.trim().parse().map_err(|_| format!("bad grid ratio '{eps}'"))?;
    Ok((t, eps))
}

#[derive(Args, Debug, Serialize)]
pub struct LassoArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// One-column CSV or dataset file.
    #[arg(long)]
    pub response: PathBuf,
    /// `T,ratio`: T log-spaced values from the smallest λ with an empty fit
    /// down to ratio times it.
    #[arg(long, default_value = "20,0.05", value_parser = parse_grid, conflicts_with = "lambdas")]
    pub grid: (usize, f64),
    /// One-column CSV of λ values, used in the given order.
    #[arg(long)]
    pub lambdas: Option<PathBuf>,
    /// Repetitions per interaction screen (default ceil(sqrt(p))).
    #[arg(long = "xyz-l", visible_alias = "xyz-L")]
    pub xyz_l: Option<usize>,
    /// Chance that one screen finds a violator sitting exactly at λ.
    #[arg(long, default_value_t = 0.99)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Interaction penalty relative to main effects.
    #[arg(long, default_value_t = 1.0)]
    pub pair_penalty: f64,
    /// Exhaustive KKT scan after each path point.
    #[arg(long)]
    pub certify: bool,
    #[arg(long, default_value_t = 100)]
    pub max_outer: usize,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_cycles: usize,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: OutputFormat,
    /// Path file; stdout if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

pub fn config(args: &LassoArgs) -> CliResult<LassoPathConfig> {
    let grid = match &args.lambdas {
        Some(path) => LambdaGrid::Explicit(read_response(path)?),
        None => LambdaGrid::Auto {
            count: args.grid.0,
            ratio: args.grid.1,
        },
    };
    if !(0.5..1.0).contains(&args.eta) {
        return Err(CliError::Usage(format!("--eta must be in [0.5, 1), got {}", args.eta)));
    }
    Ok(LassoPathConfig {
        grid,
        screen: KktScreen {
            repetitions: args.xyz_l,
            target: args.eta,
        },
        max_outer_iterations: args.max_outer,
        solver: SolverParams {
            tol: args.tol,
            max_cycles: args.max_cycles,
        },
        pair_penalty: args.pair_penalty,
        seed: args.seed,
        certify: args.certify,
    })
}

#[derive(Serialize)]
struct PointRecord<'a> {
    index: usize,
    #[serde(flatten)]
    fit: &'a SparseFit,
}

pub fn write_path(out: &mut dyn Write, path: &LassoPath, format: OutputFormat) -> std::io::Result<()> {
    match format {
        OutputFormat::Jsonl => {
            for (index, fit) in path.fits.iter().enumerate() {
                serde_json::to_writer(&mut *out, &PointRecord { index, fit })?;
                writeln!(out)?;
            }
        }
        OutputFormat::Csv => {
            writeln!(out, "lambda_index,lambda,term,j,k,value,center,certified")?;
            for (t, fit) in path.fits.iter().enumerate() {
                let lam = fmt_f64(fit.lambda);
                let cert = fit.certified.map_or(String::new(), |c| c.to_string());
                if fit.is_empty() {
                    writeln!(out, "{t},{lam},none,,,0.0,,{cert}")?;
                }
                for c in &fit.main {
                    writeln!(out, "{t},{lam},main,{},,{},,{cert}", c.j, fmt_f64(c.value))?;
                }
                for c in &fit.pairs {
                    writeln!(out, "{t},{lam},pair,{},{},{},{},{cert}", c.j, c.k, fmt_f64(c.value), fmt_f64(c.center))?;
                }
            }
        }
    }
    out.flush()
}

pub fn run(args: &LassoArgs) -> CliResult<()> {
    let start = Instant::now();
    let data = Dataset::read(&args.data)?;
    let y = RealVector::new(read_response(&args.response)?)?;
    let cfg = config(args)?;
    let path = lasso_path(&data.to_real(), &y, &cfg)?;

    let mut out = sink(args.output.as_ref())?;
    write_path(&mut out, &path, args.format).map_err(|e| write_err(args.output.as_ref(), e))?;
    drop(out);

    eprintln!("index lambda main pairs outer screened certified objective");
    for (t, f) in path.fits.iter().enumerate() {
        eprintln!(
            "{t} {:.6e} {} {} {} {} {} {:.6e}",
            f.lambda,
            f.main.len(),
            f.pairs.len(),
            f.outer_iterations,
            f.pairs_screened,
            f.certified.map_or("-".into(), |c| c.to_string()),
            f.objective
        );
    }

    let mut manifest = RunManifest::new("lasso", args.seed, args);
    let mut inputs = vec![args.data.as_path(), args.response.as_path()];
    if let Some(l) = &args.lambdas {
        inputs.push(l);
    }
    digest_inputs(&mut manifest, &inputs)?;
    manifest.summary = json!({
        "config": cfg,
        "lambdas": path.fits.iter().map(|f| f.lambda).collect::<Vec<_>>(),
        "x_means": path.x_means,
        "y_mean": path.y_mean,
        "certified": path.fits.iter().filter(|f| f.certified == Some(true)).count(),
    });
    finish(manifest, start, args.output.as_ref(), args.manifest.as_ref())
}

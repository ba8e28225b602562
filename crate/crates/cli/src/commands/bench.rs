use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::json;
use xyz_core::experiments::{discovery_curves, discovery_trials, loglog_slope, naive_baseline, time_to_discover};
use xyz_core::matrix::{build_z, interaction_strength};
use xyz_core::rng::stream_rng;
use xyz_core::synth::planted_binary;

use super::finish;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::table::{fmt_f64, sink, write_err};

/// Largest `n p` (or `n × trials`) a suite runs without `--force`.
const WORK_GUARD: f64 = 5e7;

#[derive(Args, Debug, Serialize)]
pub struct BenchArgs {
    #[command(subcommand)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// CSV output; stdout if omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Run beyond the desk-scale guard.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Time to discover a planted pair as p grows, with a fitted log-log slope.
    Scaling(ScalingArgs),
    /// Single-repetition discovery probability of minimal subsampling and
    /// dense Gaussian projections at a matched budget.
    GaussVsMinimal(GaussArgs),
    /// Best strength found against strength evaluations, for the search and
    /// for uniform pair sampling.
    NaiveBaseline(NaiveArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ScalingArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1000usize, 2000, 4000, 8000, 16000])]
    pub ps: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.9)]
    pub gamma: f64,
    /// M is chosen so that p^(-1/M) is closest to this.
    #[arg(long, default_value_t = 0.55)]
    pub gamma0: f64,
    /// Searches per timing, each with its own seed.
    #[arg(long, default_value_t = 50)]
    pub searches: usize,
    /// Timings per p; the median enters the fit.
    #[arg(long, default_value_t = 5)]
    pub timings: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct GaussArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 1000, 10000])]
    pub ps: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.6, 0.7, 0.8, 0.9, 0.95])]
    pub gammas: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Monte Carlo trials per strength; 0 skips the empirical rows.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Budget p for the empirical rows.
    #[arg(long, default_value_t = 1000)]
    pub empirical_p: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct NaiveArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub p: usize,
    /// Strength of the planted pair (0, 1).
    #[arg(long, default_value_t = 0.85)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.99)]
    pub eta: f64,
}

fn guard(work: f64, what: &str, force: bool) -> CliResult<()> {
    if work > WORK_GUARD && !force {
        return Err(CliError::Guard(format!(
            "{what} needs about {work:.2e} units of work, above the {WORK_GUARD:.0e} guard; pass --force to run it"
        )));
    }
    Ok(())
}

fn io_err(args: &BenchArgs) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| write_err(args.output.as_ref(), e)
}

fn scaling(args: &BenchArgs, s: &ScalingArgs, out: &mut dyn Write) -> CliResult<serde_json::Value> {
    if s.ps.len() < 2 || s.timings == 0 || s.searches == 0 {
        return Err(CliError::Usage("scaling needs at least two p values, one timing and one search".into()));
    }
    let pmax = *s.ps.iter().max().expect("non-empty");
    guard((s.n * pmax) as f64, "the largest scaling point", args.force)?;
    let err = io_err(args);
    writeln!(out, "p,n,subsample_size,gamma0,predicted_exponent,timing,searches,seconds,repetitions").map_err(&err)?;
    let mut medians = Vec::new();
    for &p in &s.ps {
        let mut secs = Vec::new();
        for t in 0..s.timings {
            let seed = args.seed.wrapping_add(1000 * t as u64);
            let pt = time_to_discover(p, s.n, s.gamma, s.gamma0, s.searches, seed)?;
            let reps: usize = pt.repetitions.iter().sum();
            writeln!(
                out,
                "{p},{},{},{},{},{t},{},{},{reps}",
                s.n,
                pt.subsample_size,
                fmt_f64(pt.gamma0),
                fmt_f64(pt.predicted_exponent),
                s.searches,
                fmt_f64(pt.total_time())
            )
            .map_err(&err)?;
            secs.push(pt.total_time());
        }
        secs.sort_by(f64::total_cmp);
        medians.push(secs[secs.len() / 2]);
    }
    let pf: Vec<f64> = s.ps.iter().map(|&p| p as f64).collect();
    let slope = loglog_slope(&pf, &medians);
    let predicted = 1.0 + s.gamma.ln() / s.gamma0.ln();
    eprintln!("fitted slope {slope:.4}, predicted 1 + log(gamma)/log(gamma0) = {predicted:.4}");
    Ok(json!({ "slope": slope, "predicted": predicted, "median_seconds": medians }))
}

fn gauss(args: &BenchArgs, g: &GaussArgs, out: &mut dyn Write) -> CliResult<serde_json::Value> {
    guard((g.trials * g.n * g.gammas.len()) as f64, "the Monte Carlo trials", args.force)?;
    let err = io_err(args);
    writeln!(out, "source,p,n,gamma,subsample_size,tau,minimal,gaussian,trials").map_err(&err)?;
    let curves = discovery_curves(&g.ps, &g.gammas, g.n)?;
    for c in &curves {
        writeln!(
            out,
            "analytic,{},{},{},{},{},{},{},",
            c.p,
            c.n,
            fmt_f64(c.gamma),
            c.subsample_size,
            fmt_f64(c.tau),
            fmt_f64(c.minimal),
            fmt_f64(c.gaussian)
        )
        .map_err(&err)?;
    }
    let mut ordered = curves.iter().all(|c| c.minimal > c.gaussian);
    if g.trials > 0 {
        for (t, &gamma) in g.gammas.iter().enumerate() {
            let e = discovery_trials(g.empirical_p, g.n, gamma, g.trials, args.seed.wrapping_add(t as u64))?;
            let curve = discovery_curves(&[g.empirical_p], &[gamma], g.n)?;
            writeln!(
                out,
                "empirical,{},{},{},{},{},{},{},{}",
                e.p,
                e.n,
                fmt_f64(e.gamma),
                curve[0].subsample_size,
                fmt_f64(curve[0].tau),
                fmt_f64(e.minimal_rate()),
                fmt_f64(e.gaussian_rate()),
                e.trials
            )
            .map_err(&err)?;
            ordered &= e.minimal_rate() > e.gaussian_rate();
        }
    }
    eprintln!("minimal subsampling ahead at every point: {ordered}");
    Ok(json!({ "minimal_ahead_everywhere": ordered }))
}

fn naive(args: &BenchArgs, a: &NaiveArgs, out: &mut dyn Write) -> CliResult<serde_json::Value> {
    guard((a.n * a.p) as f64, "the planted data set", args.force)?;
    if a.p < 2 {
        return Err(CliError::Usage("naive-baseline needs p >= 2".into()));
    }
    let (x, y) = planted_binary(a.n, a.p, a.gamma, (0, 1), &mut stream_rng(args.seed, 0))?;
    let planted = interaction_strength(&x, &build_z(&x, &y)?, 0, 1)?;
    let cmp = naive_baseline(&x, &y, planted, a.eta, args.seed)?;
    let err = io_err(args);
    writeln!(out, "method,evaluations,best_strength").map_err(&err)?;
    for r in &cmp.trace {
        writeln!(out, "{},{},{}", r.method, r.evaluations, fmt_f64(r.best_strength)).map_err(&err)?;
    }
    let show = |v: Option<usize>| v.map_or("not reached".to_string(), |t| t.to_string());
    eprintln!(
        "planted strength {planted:.4} reached after {} evaluations (xyz) and {} (uniform sampling)",
        show(cmp.xyz_evaluations),
        show(cmp.naive_evaluations)
    );
    Ok(json!({
        "planted_strength": planted,
        "xyz_evaluations": cmp.xyz_evaluations,
        "naive_evaluations": cmp.naive_evaluations,
    }))
}

pub fn run(args: &BenchArgs) -> CliResult<()> {
    let start = Instant::now();
    let mut out = sink(args.output.as_ref())?;
    let (name, summary) = match &args.suite {
        Suite::Scaling(s) => ("bench scaling", scaling(args, s, &mut out)?),
        Suite::GaussVsMinimal(g) => ("bench gauss-vs-minimal", gauss(args, g, &mut out)?),
        Suite::NaiveBaseline(a) => ("bench naive-baseline", naive(args, a, &mut out)?),
    };
    out.flush().map_err(io_err(args))?;
    drop(out);
    let mut manifest = RunManifest::new(name, args.seed, args);
    manifest.summary = summary;
    finish(manifest, start, args.output.as_ref(), args.manifest.as_ref())
}

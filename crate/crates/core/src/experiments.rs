//! Benchmark suites: discovery probability of minimal subsampling against
//! dense Gaussian projections, time to discover a planted pair as `p`
//! grows, and progress against uniform pair sampling.

use serde::{Deserialize, Serialize};

use crate::clock::Stopwatch;
use crate::error::{Result, XyzError};
use crate::matrix::{build_z, PackedMatrix, SignVector};
use crate::oracle::naive_sampling_search;
use crate::pairs::{close_pairs, equal_pairs, Sign};
use crate::params::{discovery_probability, gamma0, runtime_exponent};
use crate::projection::{
    draw_subsample, gauss_discovery_probability, gauss_tau_for_budget, minimal_budget_subsample_size,
    project_dense, project_keys,
};
use crate::rng::stream_rng;
use crate::search::{auto_parameters, xyz_search, xyz_search_until, Design, Response, SearchConfig};
use crate::synth::planted_binary;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: usize,
    pub n: usize,
    pub gamma: f64,
    pub subsample_size: usize,
    pub tau: f64,
    pub minimal: f64,
    pub gaussian: f64,
}

/// Single-repetition discovery probabilities at a budget where a strength
/// `1/2` pair is kept with probability about `1/p` by either method.
pub fn discovery_curves(ps: &[usize], gammas: &[f64], n: usize) -> Result<Vec<CurvePoint>> {
    let mut out = Vec::with_capacity(ps.len() * gammas.len());
    for &p in ps {
        let m = minimal_budget_subsample_size(p);
        let tau = gauss_tau_for_budget(p, n)?;
        for &gamma in gammas {
            out.push(CurvePoint {
                p,
                n,
                gamma,
                subsample_size: m,
                tau,
                minimal: discovery_probability(gamma, m, 1),
                gaussian: gauss_discovery_probability(gamma, n, tau),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDiscovery {
    pub p: usize,
    pub n: usize,
    /// Exact strength of the planted pair.
    pub gamma: f64,
    pub trials: usize,
    pub minimal_hits: usize,
    pub gaussian_hits: usize,
    pub minimal_expected: f64,
    pub gaussian_expected: f64,
}

impl EmpiricalDiscovery {
    pub fn minimal_rate(&self) -> f64 {
        self.minimal_hits as f64 / self.trials as f64
    }

    pub fn gaussian_rate(&self) -> f64 {
        self.gaussian_hits as f64 / self.trials as f64
    }
}

/// Monte Carlo version of [`discovery_curves`] for one planted pair: in each
/// trial, whether the pair lands in `E₁` under a fresh subsample and under a
/// fresh Gaussian projection. Only the two planted columns are projected;
/// the event does not depend on the others.
pub fn discovery_trials(p: usize, n: usize, gamma: f64, trials: usize, seed: u64) -> Result<EmpiricalDiscovery> {
    if trials == 0 {
        return Err(XyzError::InvalidParameter("need at least one trial".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let (x, y) = planted_binary(n, 2, gamma, (0, 1), &mut rng)?;
    let z = build_z(&x, &y)?;
    let xj = PackedMatrix::from_fn(n, 1, |i, _| x.bit(i, 0))?;
    let zk = PackedMatrix::from_fn(n, 1, |i, _| z.bit(i, 1))?;
    let exact = (0..n).filter(|&i| x.bit(i, 0) == z.bit(i, 1)).count() as f64 / n as f64;

    let m = minimal_budget_subsample_size(p);
    let tau = gauss_tau_for_budget(p, n)?;
    let mut minimal_hits = 0;
    let mut gaussian_hits = 0;
    for t in 0..trials {
        let mut r = stream_rng(seed, 1 + t as u64);
        let draw = draw_subsample(n, m, None, &mut r)?;
        if !equal_pairs(&project_keys(&xj, &draw)?, &project_keys(&zk, &draw)?).is_empty() {
            minimal_hits += 1;
        }
        // |x - z| / 2 has the N(0, n(1-γ)) law that the threshold refers to
        let dense = project_dense(&xj, &zk, &mut r)?;
        if !close_pairs(dense.x.as_slice(), dense.z.as_slice(), 2.0 * tau)?.is_empty() {
            gaussian_hits += 1;
        }
    }
    Ok(EmpiricalDiscovery {
        p,
        n,
        gamma: exact,
        trials,
        minimal_hits,
        gaussian_hits,
        minimal_expected: discovery_probability(exact, m, 1),
        gaussian_expected: gauss_discovery_probability(exact, n, tau),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub p: usize,
    pub n: usize,
    pub subsample_size: usize,
    pub gamma0: f64,
    pub predicted_exponent: f64,
    /// Seconds to discover the planted pair, one entry per search seed.
    pub times: Vec<f64>,
    pub repetitions: Vec<usize>,
}

impl ScalingPoint {
    pub fn total_time(&self) -> f64 {
        self.times.iter().sum()
    }
}

/// Subsample size whose `γ₀ = p^{-1/M}` is closest to `target` on the log
/// scale.
pub fn subsample_for_gamma0(p: usize, target: f64) -> usize {
    let m = ((p as f64).ln() / (1.0 / target).ln()).round() as usize;
    m.clamp(1, crate::projection::MAX_SUBSAMPLE_SIZE)
}

/// Time for the search to report the planted pair `(0, 1)` of strength
/// `gamma` in a Rademacher design, over `searches` independent search
/// seeds on one data set.
pub fn time_to_discover(
    p: usize,
    n: usize,
    gamma: f64,
    gamma0_target: f64,
    searches: usize,
    seed: u64,
) -> Result<ScalingPoint> {
    let mut rng = stream_rng(seed, 0);
    let (x, y) = planted_binary(n, p, gamma, (0, 1), &mut rng)?;
    let m = subsample_for_gamma0(p, gamma0_target);
    let g0 = gamma0(p, m);
    let mut times = Vec::with_capacity(searches);
    let mut repetitions = Vec::with_capacity(searches);
    for s in 0..searches {
        let config = SearchConfig::new(m, 100_000, gamma)
            .with_seed(seed.wrapping_add(1 + s as u64))
            .with_negatives(false);
        let start = Stopwatch::start();
        let report = xyz_search_until(Design::Binary(&x), Response::Signs(&y), &config, |h| (h.j, h.k) == (0, 1))?;
        times.push(start.secs());
        if !report.contains(0, 1, Sign::Positive) {
            return Err(XyzError::GuardExceeded(format!(
                "planted pair not found within {} repetitions at p = {p}",
                config.repetitions
            )));
        }
        repetitions.push(report.repetitions_run);
    }
    Ok(ScalingPoint {
        p,
        n,
        subsample_size: m,
        gamma0: g0,
        predicted_exponent: runtime_exponent(gamma, g0).unwrap_or(f64::NAN),
        times,
        repetitions,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub method: String,
    /// Strength evaluations so far.
    pub evaluations: usize,
    pub best_strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineComparison {
    pub planted_strength: f64,
    pub trace: Vec<TraceRow>,
    /// Evaluations until the planted strength was first reached.
    pub xyz_evaluations: Option<usize>,
    pub naive_evaluations: Option<usize>,
}

/// Best strength found so far by the search and by uniform pair sampling,
/// measured in strength evaluations. Sampling gets the same number of
/// evaluations as the full search used.
pub fn naive_baseline(
    x: &PackedMatrix,
    y: &SignVector,
    planted_strength: f64,
    target: f64,
    seed: u64,
) -> Result<BaselineComparison> {
    let auto = auto_parameters(Design::Binary(x), Response::Signs(y), planted_strength, target, None, seed)?;
    let config = auto.config.with_negatives(false);
    let report = xyz_search(Design::Binary(x), Response::Signs(y), &config)?;

    let mut trace = Vec::new();
    let mut best = 0.0f64;
    let mut used = 0;
    let mut xyz_evaluations = None;
    for (r, &checked) in report.checked_per_repetition.iter().enumerate() {
        used += checked;
        for h in report.hits.iter().filter(|h| h.found_at_repetition == r) {
            best = best.max(h.strength);
        }
        if xyz_evaluations.is_none() && best >= planted_strength {
            xyz_evaluations = Some(used);
        }
        trace.push(TraceRow {
            method: "xyz".into(),
            evaluations: used,
            best_strength: best,
        });
    }

    let budget = used.max(1);
    let mut rng = stream_rng(seed, 1 << 43);
    let naive = naive_sampling_search(Design::Binary(x), Response::Signs(y), None, budget, &mut rng)?;
    let naive_evaluations = naive
        .improvements
        .iter()
        .find(|(_, s)| *s >= planted_strength)
        .map(|&(t, _)| t);
    trace.extend(naive.improvements.iter().map(|&(t, s)| TraceRow {
        method: "naive".into(),
        evaluations: t,
        best_strength: s,
    }));
    Ok(BaselineComparison {
        planted_strength,
        trace,
        xyz_evaluations,
        naive_evaluations,
    })
}

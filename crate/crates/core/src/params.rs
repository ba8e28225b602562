//! Discovery probability, repetition count, subsample-size selection and the
//! cost model of a search.
//!
//! With subsample size `M` and `L` repetitions, a pair of strength `γ` shares
//! a key in one repetition with probability `γ^M`, so it is reported with
//! probability `η(M, L) = 1 - (1 - γ^M)^L`. The expected work is
//!
//! ```text
//! C(M, L) = n p + L (M p + p log p + n E|E₁|),   E|E₁| = Σ_{j,k} γ_jk^M
//! ```
//!
//! (constant factors dropped). `E|E₁|` is estimated from a uniform sample of
//! pair strengths.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Result, XyzError};
use crate::projection::MAX_SUBSAMPLE_SIZE;

/// `1 - (1 - γ^M)^L`.
pub fn discovery_probability(gamma: f64, subsample_size: usize, repetitions: usize) -> f64 {
    let q = gamma.powi(subsample_size as i32);
    if q >= 1.0 {
        return 1.0;
    }
    if q <= 0.0 || repetitions == 0 {
        return 0.0;
    }
    -(repetitions as f64 * (-q).ln_1p()).exp_m1()
}

/// Smallest `L` with `η(M, L) ≥ target`.
pub fn repetitions_for_target(subsample_size: usize, gamma: f64, target: f64) -> Result<usize> {
    if !(0.5..1.0).contains(&target) {
        return Err(XyzError::InvalidParameter(format!(
            "discovery target must be in [0.5, 1), got {target}"
        )));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(XyzError::InvalidParameter(format!(
            "strength must be in (0, 1], got {gamma}"
        )));
    }
    let q = gamma.powi(subsample_size as i32);
    if q == 0.0 {
        return Err(XyzError::Underflow { subsample_size });
    }
    if q >= 1.0 {
        return Ok(1);
    }
    let estimate = ((1.0 - target).ln() / (-q).ln_1p()).ceil();
    if !estimate.is_finite() || estimate > usize::MAX as f64 / 2.0 {
        return Err(XyzError::Underflow { subsample_size });
    }
    let mut l = (estimate as usize).max(1);
    while l > 1 && discovery_probability(gamma, subsample_size, l - 1) >= target {
        l -= 1;
    }
    while discovery_probability(gamma, subsample_size, l) < target {
        l += 1;
    }
    Ok(l)
}

/// `γ₀ = p^{-1/M}`: strengths near `γ₀` survive a repetition about `1/p` of
/// the time.
pub fn gamma0(p: usize, subsample_size: usize) -> f64 {
    (p as f64).powf(-1.0 / subsample_size as f64)
}

/// `1 + log γ / log γ₀`, the exponent of `p` in the leading cost term.
pub fn runtime_exponent(gamma: f64, gamma0: f64) -> Result<f64> {
    if !(gamma0 > 0.0 && gamma0 < gamma && gamma <= 1.0) {
        return Err(XyzError::InvalidParameter(format!(
            "need 0 < gamma0 < gamma <= 1, got gamma0 = {gamma0}, gamma = {gamma}"
        )));
    }
    Ok(1.0 + gamma.ln() / gamma0.ln())
}

/// Uniformly sampled pair strengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrengthSample {
    strengths: Vec<f64>,
}

impl StrengthSample {
    pub fn new(strengths: Vec<f64>) -> Result<Self> {
        if let Some(s) = strengths.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(XyzError::InvalidParameter(format!(
                "sampled strength {s} outside [0, 1]"
            )));
        }
        Ok(Self { strengths })
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    pub fn len(&self) -> usize {
        self.strengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strengths.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.strengths.iter().sum::<f64>() / self.strengths.len() as f64
    }

    /// Sample mean of `s^M` and its standard error.
    pub fn power_moment(&self, subsample_size: usize) -> Result<(f64, f64)> {
        if self.strengths.is_empty() {
            return Err(XyzError::EmptySample);
        }
        let m = subsample_size as i32;
        let k = self.strengths.len() as f64;
        let mean = self.strengths.iter().map(|s| s.powi(m)).sum::<f64>() / k;
        let var = if self.strengths.len() > 1 {
            self.strengths
                .iter()
                .map(|s| (s.powi(m) - mean).powi(2))
                .sum::<f64>()
                / (k - 1.0)
        } else {
            0.0
        };
        Ok((mean, (var / k).sqrt()))
    }

    /// Plug-in estimate of `Σ_{j,k} γ_jk^M = p² · mean(s^M)`.
    pub fn expected_candidates(&self, subsample_size: usize, p: usize) -> Result<f64> {
        let (mean, _) = self.power_moment(subsample_size)?;
        Ok((p as f64).powi(2) * mean)
    }
}

/// Work of one repetition: `M p + p log p + n E|E₁|`.
fn repetition_cost(subsample_size: usize, expected_candidates: f64, n: usize, p: usize) -> f64 {
    let pf = p as f64;
    subsample_size as f64 * pf + pf * pf.ln() + n as f64 * expected_candidates
}

/// Plug-in `C(M, L)`.
pub fn expected_complexity(
    subsample_size: usize,
    repetitions: usize,
    sample: &StrengthSample,
    n: usize,
    p: usize,
) -> Result<f64> {
    if subsample_size == 0 || repetitions == 0 {
        return Err(XyzError::InvalidParameter(
            "subsample size and repetitions must be positive".into(),
        ));
    }
    let e1 = sample.expected_candidates(subsample_size, p)?;
    Ok(n as f64 * p as f64 + repetitions as f64 * repetition_cost(subsample_size, e1, n, p))
}

/// `-(M p + p log p + n Σ γ_jk^M) / log(1 - γ^M)`: expected cost per unit of
/// `log(1/(1-η))`.
pub fn subsample_objective(
    gamma: f64,
    subsample_size: usize,
    sample: &StrengthSample,
    n: usize,
    p: usize,
) -> Result<f64> {
    let e1 = sample.expected_candidates(subsample_size, p)?;
    let q = gamma.powi(subsample_size as i32);
    if q <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let denom = -(-q).ln_1p();
    Ok(repetition_cost(subsample_size, e1, n, p) / denom)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsampleChoice {
    pub subsample_size: usize,
    pub objective: f64,
    /// Standard error of the objective at the chosen size relative to its
    /// value, from the sampling error of `mean(s^M)`.
    pub relative_error: f64,
    pub gamma0: f64,
    /// The minimizer sits at the top of the scanned range.
    pub at_range_cap: bool,
}

/// Scans `range` for the minimizer of [`subsample_objective`]; exact ties go
/// to the smaller size.
///
/// For `γ = 1` every size finds the pair in one repetition, so the scan
/// minimizes the single-repetition cost instead.
pub fn optimal_subsample_size(
    gamma: f64,
    sample: &StrengthSample,
    n: usize,
    p: usize,
    range: RangeInclusive<usize>,
) -> Result<SubsampleChoice> {
    if sample.is_empty() {
        return Err(XyzError::EmptySample);
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(XyzError::InvalidParameter(format!(
            "strength must be in (0, 1], got {gamma}"
        )));
    }
    let (lo, hi) = (*range.start(), *range.end());
    if lo == 0 || hi > MAX_SUBSAMPLE_SIZE || lo > hi {
        return Err(XyzError::InvalidParameter(format!(
            "subsample range must lie within [1, {MAX_SUBSAMPLE_SIZE}], got {lo}..={hi}"
        )));
    }
    let objective = |m: usize| -> Result<f64> {
        if gamma >= 1.0 {
            let e1 = sample.expected_candidates(m, p)?;
            Ok(repetition_cost(m, e1, n, p))
        } else {
            subsample_objective(gamma, m, sample, n, p)
        }
    };
    let mut best = (lo, objective(lo)?);
    for m in lo + 1..=hi {
        let v = objective(m)?;
        if v < best.1 {
            best = (m, v);
        }
    }
    let (m, value) = best;
    let (_, se) = sample.power_moment(m)?;
    let e1 = sample.expected_candidates(m, p)?;
    let cost = repetition_cost(m, e1, n, p);
    let relative_error = if cost > 0.0 {
        n as f64 * (p as f64).powi(2) * se / cost
    } else {
        0.0
    };
    Ok(SubsampleChoice {
        subsample_size: m,
        objective: value,
        relative_error,
        gamma0: gamma0(p, m),
        at_range_cap: m == hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent evaluation of `1 - (1 - q)^L` by repeated multiplication.
    fn eta_oracle(gamma: f64, m: usize, l: usize) -> f64 {
        let q: f64 = (0..m).map(|_| gamma).product();
        let mut miss = 1.0;
        for _ in 0..l {
            miss *= 1.0 - q;
        }
        1.0 - miss
    }

    #[test]
    fn eta_examples() {
        for (m, l) in [(1, 1), (5, 3), (30, 100)] {
            assert_eq!(discovery_probability(1.0, m, l), 1.0);
        }
        for m in [1, 4, 9] {
            let g: f64 = 0.83;
            assert!((discovery_probability(g, m, 1) - g.powi(m as i32)).abs() < 1e-15);
        }
        let miss = 1.0 - discovery_probability(0.85, 21, 100);
        assert!((miss - 0.035_082_494_264_796_8).abs() < 1e-12, "{miss}");
        assert!((miss - 0.03).abs() < 0.01);
        for (g, m, l) in [(0.8, 5, 10), (0.9, 8, 20), (0.6, 3, 7)] {
            assert!((discovery_probability(g, m, l) - eta_oracle(g, m, l)).abs() < 1e-12);
        }
    }

    #[test]
    fn choose_repetitions_examples() {
        assert_eq!(repetitions_for_target(10, 1.0, 0.99).unwrap(), 1);
        // ceil(log(0.03) / log(1 - 0.85^21)) = ceil(104.67...) = 105.
        assert_eq!(repetitions_for_target(21, 0.85, 0.97).unwrap(), 105);
        assert_eq!(repetitions_for_target(1, 0.5, 0.5).unwrap(), 1);
        assert!(matches!(
            repetitions_for_target(64, 1e-10, 0.9),
            Err(XyzError::Underflow { subsample_size: 64 })
        ));
        assert!(repetitions_for_target(3, 0.5, 1.0).is_err());
    }

    #[test]
    fn choose_repetitions_is_minimal() {
        for &(m, g, t) in &[(5usize, 0.8, 0.99), (12, 0.7, 0.9), (3, 0.55, 0.999), (40, 0.95, 0.5)] {
            let l = repetitions_for_target(m, g, t).unwrap();
            assert!(eta_oracle(g, m, l) >= t - 1e-12);
            if l > 1 {
                assert!(eta_oracle(g, m, l - 1) < t + 1e-12);
            }
        }
    }

    #[test]
    fn exponent_examples() {
        let e = runtime_exponent(0.9, 0.55).unwrap();
        assert!((e - 1.176).abs() < 5e-4, "{e}");
        let e = runtime_exponent(0.85, 0.55).unwrap();
        assert!((e - 1.27).abs() < 5e-3, "{e}");
        assert_eq!(runtime_exponent(1.0, 0.3).unwrap(), 1.0);
        assert!(runtime_exponent(0.5, 0.55).is_err());
    }

    #[test]
    fn complexity_examples() {
        let zeros = StrengthSample::new(vec![0.0; 10]).unwrap();
        let (n, p, m) = (50usize, 200usize, 7usize);
        let c = expected_complexity(m, 1, &zeros, n, p).unwrap();
        let pf = p as f64;
        assert!((c - (n as f64 * pf + m as f64 * pf + pf * pf.ln())).abs() < 1e-9);

        let s = StrengthSample::new(vec![0.5, 0.6, 0.4]).unwrap();
        let c1 = expected_complexity(m, 3, &s, n, p).unwrap() - n as f64 * pf;
        let c2 = expected_complexity(m, 6, &s, n, p).unwrap() - n as f64 * pf;
        assert!((c2 - 2.0 * c1).abs() < 1e-9 * c2);

        let half = StrengthSample::new(vec![0.5; 100]).unwrap();
        let e1 = half.expected_candidates(10, p).unwrap();
        assert!((e1 - pf * pf / 1024.0).abs() < 1e-9);

        assert!(expected_complexity(m, 0, &s, n, p).is_err());
        let empty = StrengthSample::new(vec![]).unwrap();
        assert_eq!(expected_complexity(m, 1, &empty, n, p), Err(XyzError::EmptySample));
        assert!(StrengthSample::new(vec![1.2]).is_err());
    }

    #[test]
    fn optimal_size_on_degenerate_sample_matches_scan() {
        let zeros = StrengthSample::new(vec![0.0; 5]).unwrap();
        let (gamma, n, p) = (0.8, 100, 1000);
        let choice = optimal_subsample_size(gamma, &zeros, n, p, 1..=64).unwrap();
        let pf = p as f64;
        let closed = |m: usize| -(m as f64 * pf + pf * pf.ln()) / (1.0 - gamma.powi(m as i32)).ln();
        let best = (1..=64usize)
            .min_by(|&a, &b| closed(a).partial_cmp(&closed(b)).unwrap().then(a.cmp(&b)))
            .unwrap();
        assert_eq!(choice.subsample_size, best);
        assert!((choice.objective - closed(best)).abs() < 1e-9 * closed(best));
        assert_eq!(
            optimal_subsample_size(gamma, &StrengthSample::new(vec![]).unwrap(), n, p, 1..=64),
            Err(XyzError::EmptySample)
        );
    }

    #[test]
    fn optimal_size_is_pareto_optimal() {
        let strengths: Vec<f64> = (0..200).map(|i| 0.35 + 0.3 * (i as f64 / 199.0)).collect();
        let sample = StrengthSample::new(strengths).unwrap();
        let (gamma, n, p) = (0.85, 500, 50_000);
        let choice = optimal_subsample_size(gamma, &sample, n, p, 1..=64).unwrap();
        // Real-valued L(M) reaching a fixed target; the search cost is then
        // proportional to the objective.
        let cost = |m: usize, eta: f64| {
            let l = (1.0 - eta).ln() / (1.0 - gamma.powi(m as i32)).ln();
            let e1 = sample.expected_candidates(m, p).unwrap();
            l * (m as f64 * p as f64 + p as f64 * (p as f64).ln() + n as f64 * e1)
        };
        for eta in [0.5, 0.9, 0.999] {
            let c_star = cost(choice.subsample_size, eta);
            for m in 1..=64usize {
                assert!(cost(m, eta) >= c_star * (1.0 - 1e-12), "M={m}");
            }
        }
    }

    #[test]
    fn perfect_threshold_prefers_large_subsample() {
        let sample = StrengthSample::new(vec![0.5; 50]).unwrap();
        let c = optimal_subsample_size(1.0, &sample, 100, 10_000, 1..=64).unwrap();
        assert!(c.subsample_size > 10);
    }
}

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::design::{dot, CenteredDesign};
use crate::error::{Result, XyzError};
use crate::matrix::Transform;
use crate::par;
use crate::params::{discovery_probability, repetitions_for_target};
use crate::projection::MAX_SUBSAMPLE_SIZE;
use crate::search::{xyz_search, Design, Response, SearchConfig};

/// Screening parameters for the interaction KKT check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktScreen {
    /// Repetitions per check; `None` means `⌈√p⌉`.
    pub repetitions: Option<usize>,
    /// Probability of finding a violator sitting exactly at the threshold.
    pub target: f64,
}

impl Default for KktScreen {
    fn default() -> Self {
        Self {
            repetitions: None,
            target: 0.99,
        }
    }
}

/// `1/2 + n λ / (2 ‖r'‖₁)`: the transformed match probability at which
/// `|r^T (X̃_j ∘ X̃_k)| / n` reaches `λ`.
pub fn strength_for_lambda(lambda: f64, n: usize, scaled_residual_l1: f64) -> f64 {
    0.5 + n as f64 * lambda / (2.0 * scaled_residual_l1)
}

/// Largest `M` for which `L` repetitions find a pair of strength `gamma`
/// with probability at least `target`, together with the `L` actually used.
/// When no `M` suffices, `M = 1` and `L` grows.
pub fn screening_parameters(gamma: f64, repetitions: usize, target: f64) -> Result<(usize, usize)> {
    let best = (1..=MAX_SUBSAMPLE_SIZE)
        .rev()
        .find(|&m| discovery_probability(gamma, m, repetitions) >= target);
    match best {
        Some(m) => Ok((m, repetitions)),
        None => Ok((1, repetitions_for_target(1, gamma, target)?)),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KktOutcome {
    /// Verified violators `(j, k, r^T w_jk / n)` with `j < k`.
    pub violators: Vec<(usize, usize, f64)>,
    pub gamma_lambda: f64,
    pub subsample_size: usize,
    pub repetitions: usize,
    pub candidates_checked: usize,
}

/// Off-diagonal pairs outside `exclude` whose correlation with `residual`
/// exceeds `threshold` in absolute value, screened by the interaction
/// search on the row-rescaled design under the unbiased transform. Every
/// reported pair is verified exactly, so the only possible error is a miss.
pub fn kkt_check_interactions(
    design: &CenteredDesign,
    residual: &[f64],
    threshold: f64,
    screen: &KktScreen,
    seed: u64,
    exclude: &BTreeSet<(usize, usize)>,
) -> Result<KktOutcome> {
    let (n, p) = (design.n_rows(), design.n_cols());
    if residual.len() != n {
        return Err(XyzError::DimensionMismatch {
            what: "residual length",
            expected: n,
            got: residual.len(),
        });
    }
    if !(threshold > 0.0) {
        return Err(XyzError::InvalidParameter("threshold must be positive".into()));
    }
    let mut out = KktOutcome::default();
    if p < 2 || !design.has_kept_rows() {
        return Ok(out);
    }
    let scaled_r = design.scaled_residual(residual)?;
    let l1 = scaled_r.l1_norm();
    if l1 == 0.0 {
        return Ok(out);
    }
    let gamma = strength_for_lambda(threshold, n, l1);
    out.gamma_lambda = gamma;
    if gamma >= 1.0 {
        return Ok(out);
    }
    let l = screen
        .repetitions
        .unwrap_or_else(|| (p as f64).sqrt().ceil() as usize)
        .max(1);
    let (m, l) = screening_parameters(gamma, l, screen.target)?;
    out.subsample_size = m;
    out.repetitions = l;

    let config = SearchConfig::new(m, l, gamma)
        .with_transform(Transform::Unbiased)
        .with_seed(seed)
        .with_max_candidates(p * p);
    let report = xyz_search(Design::Real(design.scaled()), Response::Real(&scaled_r), &config)?;
    out.candidates_checked = report.candidates_checked;

    let candidates: BTreeSet<(usize, usize)> = report
        .hits
        .iter()
        .map(|h| (h.j, h.k))
        .filter(|pair| !exclude.contains(pair))
        .collect();
    let candidates: Vec<(usize, usize)> = candidates.into_iter().collect();
    let nf = n as f64;
    let corr = par::map(&candidates, |&(j, k)| dot(&design.pair_column(j, k).0, residual) / nf);
    out.violators = candidates
        .into_iter()
        .zip(corr)
        .filter(|(_, c)| c.abs() > threshold)
        .map(|((j, k), c)| (j, k, c))
        .collect();
    Ok(out)
}

/// `X̃_j^T r / n` for every main effect.
pub fn main_correlations(design: &CenteredDesign, residual: &[f64]) -> Vec<f64> {
    let nf = design.n_rows() as f64;
    par::map_range(design.n_cols(), |j| dot(design.main_column(j), residual) / nf)
}

/// Exact correlations of the usable diagonal products.
pub fn diagonal_correlations(design: &CenteredDesign, residual: &[f64]) -> Vec<(usize, f64)> {
    let nf = design.n_rows() as f64;
    let usable: Vec<usize> = (0..design.n_cols()).filter(|&j| design.diagonal_usable(j)).collect();
    let corr = par::map(&usable, |&j| dot(&design.pair_column(j, j).0, residual) / nf);
    usable.into_iter().zip(corr).collect()
}

/// Largest `|w_jk^T r| / n` over all pairs (diagonal included where
/// usable) outside `exclude`, by exhaustive enumeration.
pub fn exhaustive_pair_maximum(
    design: &CenteredDesign,
    residual: &[f64],
    exclude: &BTreeSet<(usize, usize)>,
) -> f64 {
    let p = design.n_cols();
    let nf = design.n_rows() as f64;
    let row_max = par::map_range(p, |j| {
        let mut best: f64 = 0.0;
        for k in j..p {
            if (j == k && !design.diagonal_usable(j)) || exclude.contains(&(j, k)) {
                continue;
            }
            let c = dot(&design.pair_column(j, k).0, residual) / nf;
            best = best.max(c.abs());
        }
        best
    });
    row_max.into_iter().fold(0.0, f64::max)
}

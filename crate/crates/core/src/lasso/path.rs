use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::design::{dot, CenteredDesign};
use super::kkt::{
    diagonal_correlations, exhaustive_pair_maximum, kkt_check_interactions, main_correlations, KktScreen,
};
use super::solver::{active_set_solve, SolverParams};
use crate::error::{Result, XyzError};
use crate::matrix::{RealMatrix, RealVector};
use crate::rng::stream_rng;

/// Exhaustive interaction scans are used for the grid start when
/// `n · p(p+1)/2` is at most this.
const EXACT_GRID_WORK: f64 = 5e8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LambdaGrid {
    Explicit(Vec<f64>),
    Auto { count: usize, ratio: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LassoPathConfig {
    pub grid: LambdaGrid,
    pub screen: KktScreen,
    pub max_outer_iterations: usize,
    pub solver: SolverParams,
    /// Interaction penalty is `pair_penalty · λ`.
    pub pair_penalty: f64,
    pub seed: u64,
    /// Run an exhaustive KKT scan after each path point.
    pub certify: bool,
}

impl Default for LassoPathConfig {
    fn default() -> Self {
        Self {
            grid: LambdaGrid::Auto { count: 20, ratio: 0.05 },
            screen: KktScreen::default(),
            max_outer_iterations: 100,
            solver: SolverParams::default(),
            pair_penalty: 1.0,
            seed: 0,
            certify: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainCoef {
    pub j: usize,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCoef {
    pub j: usize,
    pub k: usize,
    pub value: f64,
    /// Mean of `X̃_j ∘ X̃_k` on the training rows.
    pub center: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseFit {
    pub lambda: f64,
    pub main: Vec<MainCoef>,
    pub pairs: Vec<PairCoef>,
    pub objective: f64,
    /// Largest KKT residual over the coordinates examined: main effects,
    /// active pairs, and all pairs when certified.
    pub kkt_residual_max: f64,
    pub outer_iterations: usize,
    /// Objective after each restricted solve.
    pub outer_objectives: Vec<f64>,
    /// Outcome of the exhaustive scan, when requested.
    pub certified: Option<bool>,
    pub pairs_screened: usize,
}

impl SparseFit {
    pub fn main_coef(&self, j: usize) -> f64 {
        self.main.iter().find(|c| c.j == j).map_or(0.0, |c| c.value)
    }

    pub fn pair_coef(&self, j: usize, k: usize) -> f64 {
        let (a, b) = (j.min(k), j.max(k));
        self.pairs
            .iter()
            .find(|c| c.j == a && c.k == b)
            .map_or(0.0, |c| c.value)
    }

    pub fn is_empty(&self) -> bool {
        self.main.is_empty() && self.pairs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LassoPath {
    pub fits: Vec<SparseFit>,
    pub x_means: Vec<f64>,
    pub y_mean: f64,
}

impl LassoPath {
    /// Predictions of `fit` on new rows.
    pub fn predict(&self, fit: &SparseFit, x: &RealMatrix) -> Result<Vec<f64>> {
        if x.n_cols() != self.x_means.len() {
            return Err(XyzError::DimensionMismatch {
                what: "design columns",
                expected: self.x_means.len(),
                got: x.n_cols(),
            });
        }
        let centered = |i: usize, j: usize| x.get(i, j) - self.x_means[j];
        Ok((0..x.n_rows())
            .map(|i| {
                let main: f64 = fit.main.iter().map(|c| c.value * centered(i, c.j)).sum();
                let pairs: f64 = fit
                    .pairs
                    .iter()
                    .map(|c| c.value * (centered(i, c.j) * centered(i, c.k) - c.center))
                    .sum();
                self.y_mean + main + pairs
            })
            .collect())
    }
}

fn centered_response(y: &RealVector) -> Result<(Vec<f64>, f64)> {
    let n = y.len() as f64;
    let mean = y.as_slice().iter().sum::<f64>() / n;
    let yc: Vec<f64> = y.as_slice().iter().map(|v| v - mean).collect();
    if yc.iter().all(|&v| v.abs() <= 1e-12 * (1.0 + mean.abs())) {
        return Err(XyzError::InvalidParameter("response has zero variance".into()));
    }
    Ok((yc, mean))
}

fn check_shapes(x: &RealMatrix, y: &RealVector) -> Result<()> {
    if x.n_rows() != y.len() {
        return Err(XyzError::DimensionMismatch {
            what: "response length",
            expected: x.n_rows(),
            got: y.len(),
        });
    }
    Ok(())
}

/// Largest correlation of any main effect or interaction with the centred
/// response. Interactions are enumerated exhaustively when affordable and
/// otherwise estimated from `min(10⁵, 10 p)` random pairs plus the diagonal.
fn lambda_max(design: &CenteredDesign, y: &[f64], pair_penalty: f64, seed: u64) -> f64 {
    let (n, p) = (design.n_rows(), design.n_cols());
    let main = main_correlations(design, y).into_iter().fold(0.0, |a: f64, c| a.max(c.abs()));
    let work = n as f64 * (p * (p + 1) / 2) as f64;
    let pairs = if work <= EXACT_GRID_WORK {
        exhaustive_pair_maximum(design, y, &BTreeSet::new())
    } else {
        let mut rng = stream_rng(seed, 1 << 42);
        let nf = n as f64;
        let sampled = (0..(10 * p).min(100_000))
            .map(|_| {
                let j = rng.random_range(0..p);
                let k = rng.random_range(0..p);
                (dot(&design.pair_column(j.min(k), j.max(k)).0, y) / nf).abs()
            })
            .fold(0.0, f64::max);
        let diag = diagonal_correlations(design, y)
            .into_iter()
            .fold(0.0, |a: f64, (_, c)| a.max(c.abs()));
        sampled.max(diag)
    };
    main.max(pairs / pair_penalty)
}

/// `count` values log-spaced from the smallest `λ` with an empty fit down to
/// `ratio` times that.
pub fn auto_lambda_grid(x: &RealMatrix, y: &RealVector, count: usize, ratio: f64) -> Result<Vec<f64>> {
    check_shapes(x, y)?;
    let design = CenteredDesign::new(x)?;
    let (yc, _) = centered_response(y)?;
    grid_from(&design, &yc, count, ratio, 1.0, 0)
}

fn grid_from(design: &CenteredDesign, y: &[f64], count: usize, ratio: f64, pair_penalty: f64, seed: u64) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(XyzError::InvalidParameter("grid needs at least two values".into()));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(XyzError::InvalidParameter(format!("grid ratio must be in (0, 1), got {ratio}")));
    }
    let top = lambda_max(design, y, pair_penalty, seed);
    if !(top > 0.0) {
        return Err(XyzError::InvalidParameter("response is uncorrelated with every column".into()));
    }
    let lr = ratio.ln();
    Ok((0..count)
        .map(|t| top * (lr * t as f64 / (count - 1) as f64).exp())
        .collect())
}

fn validate(config: &LassoPathConfig) -> Result<()> {
    if !(config.pair_penalty > 0.0 && config.pair_penalty.is_finite()) {
        return Err(XyzError::InvalidParameter("pair penalty must be positive".into()));
    }
    if !(config.solver.tol > 0.0) {
        return Err(XyzError::InvalidParameter("solver tolerance must be positive".into()));
    }
    if !(0.5..1.0).contains(&config.screen.target) {
        return Err(XyzError::InvalidParameter("screening target must be in [0.5, 1)".into()));
    }
    if config.max_outer_iterations == 0 {
        return Err(XyzError::InvalidParameter("need at least one outer iteration".into()));
    }
    if let LambdaGrid::Explicit(l) = &config.grid {
        if l.is_empty() || l.iter().any(|v| !(*v > 0.0 && v.is_finite())) || l.windows(2).any(|w| w[1] >= w[0]) {
            return Err(XyzError::InvalidParameter(
                "lambda grid must be positive and strictly decreasing".into(),
            ));
        }
    }
    Ok(())
}

/// Lasso on all main effects and pairwise interactions along a decreasing
/// grid, growing the active set by KKT checks. Main effects and diagonal
/// products are checked exactly, off-diagonal interactions by the
/// interaction search.
pub fn lasso_path(x: &RealMatrix, y: &RealVector, config: &LassoPathConfig) -> Result<LassoPath> {
    validate(config)?;
    check_shapes(x, y)?;
    let design = CenteredDesign::new(x)?;
    let (yc, y_mean) = centered_response(y)?;
    let grid = match &config.grid {
        LambdaGrid::Explicit(l) => l.clone(),
        LambdaGrid::Auto { count, ratio } => grid_from(&design, &yc, *count, *ratio, config.pair_penalty, config.seed)?,
    };
    let c = config.pair_penalty;

    let mut main: Vec<usize> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut coef: Vec<f64> = Vec::new();
    let mut fits = Vec::with_capacity(grid.len());

    for (li, &lambda) in grid.iter().enumerate() {
        let mut outer_objectives = Vec::new();
        let mut pairs_screened = 0;
        let mut outer = 0;
        let solution = loop {
            outer += 1;
            if outer > config.max_outer_iterations {
                return Err(XyzError::NoConvergence {
                    lambda_index: li,
                    iterations: outer - 1,
                    max_change: f64::NAN,
                });
            }
            let sol = active_set_solve(&design, &yc, &main, &pairs, Some(&coef), lambda, c, &config.solver)
                .map_err(|e| match e {
                    XyzError::NoConvergence { iterations, max_change, .. } => XyzError::NoConvergence {
                        lambda_index: li,
                        iterations,
                        max_change,
                    },
                    other => other,
                })?;
            outer_objectives.push(sol.objective);
            coef = sol.main.iter().map(|t| t.1).chain(sol.pairs.iter().map(|t| t.1)).collect();
            let r = &sol.residual;

            let in_main: BTreeSet<usize> = main.iter().copied().collect();
            let in_pairs: BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
            let u: Vec<usize> = main_correlations(&design, r)
                .into_iter()
                .enumerate()
                .filter(|&(j, g)| g.abs() > lambda && !in_main.contains(&j))
                .map(|(j, _)| j)
                .collect();
            let mut v: Vec<(usize, usize)> = diagonal_correlations(&design, r)
                .into_iter()
                .filter(|&(j, g)| g.abs() > c * lambda && !in_pairs.contains(&(j, j)))
                .map(|(j, _)| (j, j))
                .collect();
            let seed = config.seed ^ ((li as u64) << 32) ^ outer as u64;
            let screened = kkt_check_interactions(&design, r, c * lambda, &config.screen, seed, &in_pairs)?;
            pairs_screened += screened.candidates_checked;
            v.extend(screened.violators.iter().map(|&(j, k, _)| (j, k)));

            if u.is_empty() && v.is_empty() {
                break sol;
            }
            let old_main = main.len();
            main.extend(&u);
            coef.splice(old_main..old_main, u.iter().map(|_| 0.0));
            pairs.extend(&v);
            coef.extend(v.iter().map(|_| 0.0));
        };

        let r = &solution.residual;
        let main_corr = main_correlations(&design, r);
        let mut kkt: f64 = 0.0;
        for (j, g) in main_corr.iter().enumerate() {
            let b = solution.main.iter().find(|t| t.0 == j).map_or(0.0, |t| t.1);
            kkt = kkt.max(coordinate_residual(*g, b, lambda));
        }
        let nf = design.n_rows() as f64;
        for &((j, k), b) in &solution.pairs {
            let g = dot(&design.pair_column(j, k).0, r) / nf;
            kkt = kkt.max(coordinate_residual(g, b, c * lambda));
        }
        let certified = if config.certify {
            let nonzero: BTreeSet<(usize, usize)> = solution.pairs.iter().map(|t| t.0).collect();
            let worst = exhaustive_pair_maximum(&design, r, &nonzero);
            kkt = kkt.max(worst - c * lambda);
            Some(worst <= c * lambda * (1.0 + 1e-6))
        } else {
            None
        };

        let fit = SparseFit {
            lambda,
            main: solution
                .main
                .iter()
                .filter(|t| t.1 != 0.0)
                .map(|&(j, value)| MainCoef { j, value })
                .collect(),
            pairs: solution
                .pairs
                .iter()
                .filter(|t| t.1 != 0.0)
                .map(|&((j, k), value)| PairCoef {
                    j,
                    k,
                    value,
                    center: design.pair_column(j, k).1,
                })
                .collect(),
            objective: solution.objective,
            kkt_residual_max: kkt.max(0.0),
            outer_iterations: outer,
            outer_objectives,
            certified,
            pairs_screened,
        };
        // warm start from the support only
        main = fit.main.iter().map(|c| c.j).collect();
        pairs = fit.pairs.iter().map(|c| (c.j, c.k)).collect();
        coef = fit.main.iter().map(|c| c.value).chain(fit.pairs.iter().map(|c| c.value)).collect();
        fits.push(fit);
    }
    Ok(LassoPath {
        fits,
        x_means: design.means().to_vec(),
        y_mean,
    })
}

/// Violation of the stationarity condition for one coordinate with
/// correlation `g` and coefficient `b`.
fn coordinate_residual(g: f64, b: f64, penalty: f64) -> f64 {
    if b == 0.0 {
        (g.abs() - penalty).max(0.0)
    } else {
        (g - penalty * b.signum()).abs()
    }
}

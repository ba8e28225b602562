use serde::{Deserialize, Serialize};

use super::design::{dot, CenteredDesign};
use crate::error::{Result, XyzError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Stop when no coefficient moves by more than this in a full cycle.
    pub tol: f64,
    pub max_cycles: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_cycles: 100_000,
        }
    }
}

pub(crate) fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Solution restricted to the given coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedSolution {
    pub main: Vec<(usize, f64)>,
    pub pairs: Vec<((usize, usize), f64)>,
    pub residual: Vec<f64>,
    pub objective: f64,
    pub cycles: usize,
}

/// `‖r‖² / 2n + λ (Σ|β| + c Σ|θ|)`.
pub fn lasso_objective(residual: &[f64], main: &[f64], pairs: &[f64], lambda: f64, pair_penalty: f64) -> f64 {
    let n = residual.len() as f64;
    let l1_main: f64 = main.iter().map(|b| b.abs()).sum();
    let l1_pairs: f64 = pairs.iter().map(|b| b.abs()).sum();
    dot(residual, residual) / (2.0 * n) + lambda * (l1_main + pair_penalty * l1_pairs)
}

/// Cyclic coordinate descent over the active main effects and pairs, all
/// other coefficients held at zero. `warm` supplies starting values, in the
/// order of `main` followed by `pairs`.
#[allow(clippy::too_many_arguments)]
pub fn active_set_solve(
    design: &CenteredDesign,
    y: &[f64],
    main: &[usize],
    pairs: &[(usize, usize)],
    warm: Option<&[f64]>,
    lambda: f64,
    pair_penalty: f64,
    params: &SolverParams,
) -> Result<RestrictedSolution> {
    let n = design.n_rows();
    if y.len() != n {
        return Err(XyzError::DimensionMismatch {
            what: "response length",
            expected: n,
            got: y.len(),
        });
    }
    if !(lambda > 0.0) || !(pair_penalty > 0.0) {
        return Err(XyzError::InvalidParameter("penalties must be positive".into()));
    }
    let nf = n as f64;
    let mut cols: Vec<Vec<f64>> = main.iter().map(|&j| design.main_column(j).to_vec()).collect();
    cols.extend(pairs.iter().map(|&(j, k)| design.pair_column(j, k).0));
    let penalty: Vec<f64> = main
        .iter()
        .map(|_| lambda)
        .chain(pairs.iter().map(|_| lambda * pair_penalty))
        .collect();
    let scale: Vec<f64> = cols.iter().map(|c| dot(c, c) / nf).collect();

    let mut coef = match warm {
        Some(w) if w.len() == cols.len() => w.to_vec(),
        Some(w) => {
            return Err(XyzError::DimensionMismatch {
                what: "warm start length",
                expected: cols.len(),
                got: w.len(),
            })
        }
        None => vec![0.0; cols.len()],
    };
    let mut r = y.to_vec();
    for (c, &b) in cols.iter().zip(&coef) {
        if b != 0.0 {
            for (ri, ci) in r.iter_mut().zip(c) {
                *ri -= b * ci;
            }
        }
    }

    let mut cycles = 0;
    loop {
        let mut max_change: f64 = 0.0;
        for t in 0..cols.len() {
            let old = coef[t];
            let new = if scale[t] > 0.0 {
                let g = dot(&cols[t], &r) / nf;
                soft_threshold(old * scale[t] + g, penalty[t]) / scale[t]
            } else {
                0.0
            };
            let delta = new - old;
            if delta != 0.0 {
                for (ri, ci) in r.iter_mut().zip(&cols[t]) {
                    *ri -= delta * ci;
                }
                coef[t] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        cycles += 1;
        if max_change < params.tol {
            break;
        }
        if cycles >= params.max_cycles {
            return Err(XyzError::NoConvergence {
                lambda_index: 0,
                iterations: cycles,
                max_change,
            });
        }
    }

    let (mc, pc) = coef.split_at(main.len());
    Ok(RestrictedSolution {
        objective: lasso_objective(&r, mc, pc, lambda, pair_penalty),
        main: main.iter().copied().zip(mc.iter().copied()).collect(),
        pairs: pairs.iter().copied().zip(pc.iter().copied()).collect(),
        residual: r,
        cycles,
    })
}

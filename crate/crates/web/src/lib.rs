//! WebAssembly bindings for the demo page in `www/`. Every export returns a
//! JSON string; errors surface as thrown strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use xyz_core::experiments::discovery_curves;
use xyz_core::matrix::{build_z, interaction_strength};
use xyz_core::oracle::{brute_force_search, Selection};
use xyz_core::params::{discovery_probability, gamma0, repetitions_for_target, runtime_exponent};
use xyz_core::rng::stream_rng;
use xyz_core::search::auto_parameters;
use xyz_core::synth::planted_binary;
use xyz_core::{xyz_search, Design, Response, XyzError};

/// Columns above which the demo skips the exhaustive comparison.
const ORACLE_MAX_P: usize = 3000;
const MAX_CELLS: usize = 20_000_000;

#[derive(Serialize)]
pub struct Hit {
    pub j: usize,
    pub k: usize,
    pub strength: f64,
    pub repetition: usize,
    pub sign: &'static str,
}

#[derive(Serialize)]
pub struct SearchDemo {
    pub planted: (usize, usize),
    pub planted_strength: f64,
    pub subsample_size: usize,
    pub repetitions: usize,
    pub repetitions_run: usize,
    pub gamma0: f64,
    pub runtime_exponent: Option<f64>,
    pub candidates_checked: usize,
    pub total_pairs: usize,
    pub found: bool,
    pub hits: Vec<Hit>,
    /// Pairs at or above the threshold by exhaustive search, when run.
    pub oracle_count: Option<usize>,
}

/// Plants a pair of strength `gamma` in an `n × p` Rademacher design and
/// searches for it with automatically chosen parameters.
pub fn search_demo(n: usize, p: usize, gamma: f64, eta: f64, seed: u64) -> Result<SearchDemo, XyzError> {
    if n.saturating_mul(p) > MAX_CELLS {
        return Err(XyzError::GuardExceeded(format!("n p must stay below {MAX_CELLS} in the browser")));
    }
    if p < 2 {
        return Err(XyzError::InvalidParameter("p must be at least 2".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let a = (seed as usize).wrapping_mul(2654435761) % p;
    let b = (a + 1 + (seed as usize / 7) % (p - 1)) % p;
    let (x, y) = planted_binary(n, p, gamma, (a, b), &mut rng)?;
    let strength = interaction_strength(&x, &build_z(&x, &y)?, a, b)?;
    let auto = auto_parameters(Design::Binary(&x), Response::Signs(&y), gamma, eta, None, seed)?;
    let config = auto.config.clone().with_negatives(false);
    let report = xyz_search(Design::Binary(&x), Response::Signs(&y), &config)?;
    let oracle_count = if p <= ORACLE_MAX_P {
        let r = brute_force_search(Design::Binary(&x), Response::Signs(&y), None, Selection::Threshold(gamma), false, false)?;
        Some(r.selected.len())
    } else {
        None
    };
    let (lo, hi) = (a.min(b), a.max(b));
    Ok(SearchDemo {
        planted: (lo, hi),
        planted_strength: strength,
        subsample_size: config.subsample_size,
        repetitions: config.repetitions,
        repetitions_run: report.repetitions_run,
        gamma0: auto.choice.gamma0,
        runtime_exponent: auto.runtime_exponent,
        candidates_checked: report.candidates_checked,
        total_pairs: p * (p - 1) / 2,
        found: report.contains(lo, hi, xyz_core::Sign::Positive),
        hits: report
            .hits
            .iter()
            .map(|h| Hit {
                j: h.j,
                k: h.k,
                strength: h.strength,
                repetition: h.found_at_repetition,
                sign: h.sign.as_str(),
            })
            .collect(),
        oracle_count,
    })
}

#[derive(Serialize)]
pub struct Curves {
    pub p: usize,
    pub n: usize,
    pub subsample_size: usize,
    pub tau: f64,
    pub gamma: Vec<f64>,
    pub minimal: Vec<f64>,
    pub gaussian: Vec<f64>,
}

/// Single-repetition discovery probability against strength, at the budget
/// where a strength-1/2 pair survives with probability about `1/p`.
pub fn curves(p: usize, n: usize) -> Result<Curves, XyzError> {
    let gammas: Vec<f64> = (0..=50).map(|i| (50 + i) as f64 / 100.0).collect();
    let pts = discovery_curves(&[p], &gammas, n)?;
    Ok(Curves {
        p,
        n,
        subsample_size: pts[0].subsample_size,
        tau: pts[0].tau,
        gamma: gammas,
        minimal: pts.iter().map(|c| c.minimal).collect(),
        gaussian: pts.iter().map(|c| c.gaussian).collect(),
    })
}

#[derive(Serialize)]
pub struct Plan {
    pub eta: f64,
    pub repetitions_for_99: usize,
    pub gamma0: f64,
    pub runtime_exponent: Option<f64>,
}

/// Discovery probability of `(M, L)` for strength `gamma`, and what it
/// implies for `p` columns.
pub fn plan(gamma: f64, m: usize, l: usize, p: usize) -> Result<Plan, XyzError> {
    if !(gamma > 0.0 && gamma <= 1.0) || m == 0 || l == 0 || p < 2 {
        return Err(XyzError::InvalidParameter("need 0 < γ ≤ 1, M ≥ 1, L ≥ 1, p ≥ 2".into()));
    }
    let g0 = gamma0(p, m);
    Ok(Plan {
        eta: discovery_probability(gamma, m, l),
        repetitions_for_99: repetitions_for_target(m, gamma, 0.99)?,
        gamma0: g0,
        runtime_exponent: runtime_exponent(gamma, g0).ok(),
    })
}

fn to_js<T: Serialize>(r: Result<T, XyzError>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
        .and_then(|v| serde_json::to_string(&v).map_err(|e| JsValue::from_str(&e.to_string())))
}

#[wasm_bindgen(js_name = searchDemo)]
pub fn search_demo_js(n: usize, p: usize, gamma: f64, eta: f64, seed: u32) -> Result<String, JsValue> {
    to_js(search_demo(n, p, gamma, eta, u64::from(seed)))
}

#[wasm_bindgen(js_name = discoveryCurves)]
pub fn curves_js(p: usize, n: usize) -> Result<String, JsValue> {
    to_js(curves(p, n))
}

#[wasm_bindgen(js_name = plan)]
pub fn plan_js(gamma: f64, m: usize, l: usize, p: usize) -> Result<String, JsValue> {
    to_js(plan(gamma, m, l, p))
}

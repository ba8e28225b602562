//! Exhaustive reference computations. Everything here uses plain scalar
//! loops over `i8`/`f64` values and shares no kernels with the fast paths.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XyzError};
use crate::lasso::{LassoPath, MainCoef, PairCoef, SparseFit};
use crate::matrix::{RealMatrix, RealVector, Transform};
use crate::par;
use crate::search::{Design, Response};

/// Largest `p` enumerated without `force`.
pub const BRUTE_FORCE_MAX_P: usize = 20_000;

const HISTOGRAM_BINS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Selection {
    Threshold(f64),
    TopK(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairStrength {
    pub j: usize,
    pub k: usize,
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Selected pairs: sorted by `(j, k)` for a threshold, by decreasing
    /// strength for top-k.
    pub selected: Vec<PairStrength>,
    pub pairs_evaluated: usize,
    /// Counts of all strengths in 20 equal bins over `[0, 1]`.
    pub histogram: Vec<usize>,
    pub mean_strength: f64,
    /// All strengths in `(j, k)`, `j < k` order, when requested.
    pub all: Option<Vec<f64>>,
}

/// Scalar strength evaluator over dense copies of the inputs.
struct Scalar {
    n: usize,
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    kind: Kind,
}

enum Kind {
    Count,
    Weighted(f64),
    Expected(f64),
}

impl Scalar {
    fn new(design: Design<'_>, response: Response<'_>, transform: Option<Transform>) -> Result<Self> {
        let (n, p) = (design.n_rows(), design.n_cols());
        if response.len() != n {
            return Err(XyzError::DimensionMismatch {
                what: "response length",
                expected: n,
                got: response.len(),
            });
        }
        let x: Vec<Vec<f64>> = match design {
            Design::Binary(b) => (0..p)
                .map(|j| (0..n).map(|i| f64::from(b.get(i, j))).collect())
                .collect(),
            Design::Real(r) => (0..p).map(|j| r.column(j).to_vec()).collect(),
        };
        let y: Vec<f64> = match response {
            Response::Signs(s) => s.values().iter().map(|&v| f64::from(v)).collect(),
            Response::Real(r) => r.as_slice().to_vec(),
        };
        let l1: f64 = y.iter().map(|v| v.abs()).sum();
        let kind = match (design, response) {
            (Design::Binary(_), Response::Signs(_)) => Kind::Count,
            (Design::Binary(_), Response::Real(_)) => {
                if l1 == 0.0 {
                    return Err(XyzError::ZeroResponse);
                }
                Kind::Weighted(l1)
            }
            (Design::Real(_), _) => {
                if l1 == 0.0 {
                    return Err(XyzError::ZeroResponse);
                }
                let t = transform.ok_or_else(|| XyzError::InvalidParameter("real design requires a transform".into()))?;
                if t == Transform::Sign {
                    let x = x
                        .into_iter()
                        .map(|c| c.into_iter().map(|v| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 }).collect())
                        .collect();
                    return Ok(Self { n, x, y, kind: Kind::Expected(l1) });
                }
                Kind::Expected(l1)
            }
        };
        Ok(Self { n, x, y, kind })
    }

    fn strength(&self, j: usize, k: usize) -> f64 {
        let (a, b) = (&self.x[j], &self.x[k]);
        match self.kind {
            Kind::Count => {
                let mut agree = 0usize;
                for i in 0..self.n {
                    if self.y[i] == a[i] * b[i] {
                        agree += 1;
                    }
                }
                agree as f64 / self.n as f64
            }
            Kind::Weighted(l1) => {
                let mut acc = 0.0;
                for i in 0..self.n {
                    let s = if self.y[i] >= 0.0 { 1.0 } else { -1.0 };
                    if s == a[i] * b[i] {
                        acc += self.y[i].abs();
                    }
                }
                acc / l1
            }
            Kind::Expected(l1) => {
                let mut acc = 0.0;
                for i in 0..self.n {
                    acc += self.y[i] * a[i] * b[i];
                }
                0.5 + acc / (2.0 * l1)
            }
        }
    }
}

/// Strength of every pair `j < k`, selected by threshold or rank.
pub fn brute_force_search(
    design: Design<'_>,
    response: Response<'_>,
    transform: Option<Transform>,
    selection: Selection,
    keep_all: bool,
    force: bool,
) -> Result<OracleResult> {
    let p = design.n_cols();
    if p > BRUTE_FORCE_MAX_P && !force {
        return Err(XyzError::GuardExceeded(format!(
            "exhaustive search over p = {p} columns exceeds {BRUTE_FORCE_MAX_P}; force to proceed"
        )));
    }
    if let Selection::Threshold(g) = selection {
        if !(0.0..=1.0).contains(&g) {
            return Err(XyzError::InvalidParameter(format!("threshold {g} outside [0, 1]")));
        }
    }
    let scalar = Scalar::new(design, response, transform)?;
    let rows: Vec<Vec<f64>> = par::map_range(p, |j| (j + 1..p).map(|k| scalar.strength(j, k)).collect());

    let mut histogram = vec![0usize; HISTOGRAM_BINS];
    let mut total = 0.0;
    let mut count = 0usize;
    let mut selected = Vec::new();
    for (j, row) in rows.iter().enumerate() {
        for (t, &s) in row.iter().enumerate() {
            let bin = ((s * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
            histogram[bin] += 1;
            total += s;
            count += 1;
            let keep = match selection {
                Selection::Threshold(g) => s >= g,
                Selection::TopK(_) => true,
            };
            if keep {
                selected.push(PairStrength { j, k: j + 1 + t, strength: s });
            }
        }
    }
    if let Selection::TopK(top) = selection {
        selected.sort_by(|a, b| b.strength.total_cmp(&a.strength).then((a.j, a.k).cmp(&(b.j, b.k))));
        selected.truncate(top);
    }
    Ok(OracleResult {
        selected,
        pairs_evaluated: count,
        histogram,
        mean_strength: if count > 0 { total / count as f64 } else { f64::NAN },
        all: keep_all.then(|| rows.into_iter().flatten().collect()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveResult {
    pub best: PairStrength,
    pub evaluations: usize,
    /// `(evaluation index, best strength so far)` at every improvement,
    /// 1-based.
    pub improvements: Vec<(usize, f64)>,
}

/// Strength of `budget` uniformly drawn pairs `j != k`, keeping the best.
pub fn naive_sampling_search<R: Rng + ?Sized>(
    design: Design<'_>,
    response: Response<'_>,
    transform: Option<Transform>,
    budget: usize,
    rng: &mut R,
) -> Result<NaiveResult> {
    if budget == 0 {
        return Err(XyzError::InvalidParameter("budget must be at least 1".into()));
    }
    let p = design.n_cols();
    if p < 2 {
        return Err(XyzError::InvalidParameter("need at least two columns".into()));
    }
    let scalar = Scalar::new(design, response, transform)?;
    let mut best = PairStrength { j: 0, k: 0, strength: f64::NEG_INFINITY };
    let mut improvements = Vec::new();
    for t in 0..budget {
        let j = rng.random_range(0..p);
        let mut k = rng.random_range(0..p - 1);
        if k >= j {
            k += 1;
        }
        let s = scalar.strength(j, k);
        if s > best.strength {
            best = PairStrength { j: j.min(k), k: j.max(k), strength: s };
            improvements.push((t + 1, s));
        }
    }
    Ok(NaiveResult {
        best,
        evaluations: budget,
        improvements,
    })
}

/// `(1 - 2/(p(p-1)))^draws`: chance that uniform pair sampling never hits
/// one given pair.
pub fn naive_miss_probability(p: usize, draws: f64) -> f64 {
    let pairs = p as f64 * (p as f64 - 1.0) / 2.0;
    (draws * (-1.0 / pairs).ln_1p()).exp()
}

/// Column of the explicit design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Main(usize),
    Pair(usize, usize),
}

struct Explicit {
    terms: Vec<Term>,
    columns: Vec<Vec<f64>>,
    centers: Vec<f64>,
    x_means: Vec<f64>,
}

fn centered_columns(x: &RealMatrix) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = x.n_rows();
    let mut cols = Vec::with_capacity(x.n_cols());
    let mut means = Vec::with_capacity(x.n_cols());
    for j in 0..x.n_cols() {
        let mut s = 0.0;
        for i in 0..n {
            s += x.get(i, j);
        }
        let m = s / n as f64;
        means.push(m);
        cols.push((0..n).map(|i| x.get(i, j) - m).collect::<Vec<f64>>());
    }
    (cols, means)
}

impl Explicit {
    /// Materializes the given terms; diagonal products that vanish after
    /// centring are dropped.
    fn build(x: &RealMatrix, terms: &[Term]) -> Self {
        let n = x.n_rows();
        let (xc, x_means) = centered_columns(x);
        let mut out = Explicit {
            terms: Vec::new(),
            columns: Vec::new(),
            centers: Vec::new(),
            x_means,
        };
        for &t in terms {
            let (col, center) = match t {
                Term::Main(j) => (xc[j].clone(), 0.0),
                Term::Pair(j, k) => {
                    let mut w: Vec<f64> = (0..n).map(|i| xc[j][i] * xc[k][i]).collect();
                    let mut s = 0.0;
                    for v in &w {
                        s += v;
                    }
                    let m = s / n as f64;
                    for v in w.iter_mut() {
                        *v -= m;
                    }
                    if j == k {
                        let ss: f64 = w.iter().map(|v| v * v).sum();
                        if ss / n as f64 <= 1e-20 {
                            continue;
                        }
                    }
                    (w, m)
                }
            };
            out.terms.push(t);
            out.columns.push(col);
            out.centers.push(center);
        }
        out
    }

    /// Coordinate descent with active-set cycling, warm-started along the
    /// grid.
    fn path(&self, y: &[f64], lambdas: &[f64], pair_penalty: f64, tol: f64) -> Result<Vec<(Vec<f64>, f64)>> {
        let n = y.len() as f64;
        let q = self.columns.len();
        let sq: Vec<f64> = self.columns.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>() / n).collect();
        let mut beta = vec![0.0; q];
        let mut r = y.to_vec();
        let mut out = Vec::with_capacity(lambdas.len());
        for &lambda in lambdas {
            let pen: Vec<f64> = self
                .terms
                .iter()
                .map(|t| match t {
                    Term::Main(_) => lambda,
                    Term::Pair(..) => lambda * pair_penalty,
                })
                .collect();
            let update = |t: usize, beta: &mut [f64], r: &mut [f64]| -> f64 {
                if sq[t] == 0.0 {
                    return 0.0;
                }
                let col = &self.columns[t];
                let mut g = 0.0;
                for i in 0..r.len() {
                    g += col[i] * r[i];
                }
                let z = beta[t] * sq[t] + g / n;
                let new = if z > pen[t] {
                    (z - pen[t]) / sq[t]
                } else if z < -pen[t] {
                    (z + pen[t]) / sq[t]
                } else {
                    0.0
                };
                let d = new - beta[t];
                if d != 0.0 {
                    for i in 0..r.len() {
                        r[i] -= d * col[i];
                    }
                    beta[t] = new;
                }
                d.abs()
            };
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                let mut change: f64 = 0.0;
                for t in 0..q {
                    change = change.max(update(t, &mut beta, &mut r));
                }
                if change < tol {
                    break;
                }
                let active: Vec<usize> = (0..q).filter(|&t| beta[t] != 0.0).collect();
                let mut inner = 0;
                loop {
                    inner += 1;
                    let mut c: f64 = 0.0;
                    for &t in &active {
                        c = c.max(update(t, &mut beta, &mut r));
                    }
                    if c < tol || inner > 1_000_000 {
                        break;
                    }
                }
                if sweeps > 10_000 {
                    return Err(XyzError::NoConvergence {
                        lambda_index: out.len(),
                        iterations: sweeps,
                        max_change: change,
                    });
                }
            }
            let mut obj = r.iter().map(|v| v * v).sum::<f64>() / (2.0 * n);
            for t in 0..q {
                obj += pen[t] * beta[t].abs();
            }
            out.push((beta.clone(), obj));
        }
        Ok(out)
    }

    fn to_path(&self, solutions: Vec<(Vec<f64>, f64)>, lambdas: &[f64], y_mean: f64) -> LassoPath {
        let fits = solutions
            .into_iter()
            .zip(lambdas)
            .map(|((beta, objective), &lambda)| {
                let mut main = Vec::new();
                let mut pairs = Vec::new();
                for (t, &b) in beta.iter().enumerate() {
                    if b == 0.0 {
                        continue;
                    }
                    match self.terms[t] {
                        Term::Main(j) => main.push(MainCoef { j, value: b }),
                        Term::Pair(j, k) => pairs.push(PairCoef {
                            j,
                            k,
                            value: b,
                            center: self.centers[t],
                        }),
                    }
                }
                SparseFit {
                    lambda,
                    main,
                    pairs,
                    objective,
                    kkt_residual_max: 0.0,
                    outer_iterations: 0,
                    outer_objectives: Vec::new(),
                    certified: None,
                    pairs_screened: 0,
                }
            })
            .collect();
        LassoPath {
            fits,
            x_means: self.x_means.clone(),
            y_mean,
        }
    }
}

fn center_response(x: &RealMatrix, y: &RealVector) -> Result<(Vec<f64>, f64)> {
    if x.n_rows() != y.len() {
        return Err(XyzError::DimensionMismatch {
            what: "response length",
            expected: x.n_rows(),
            got: y.len(),
        });
    }
    let mean = y.as_slice().iter().sum::<f64>() / y.len() as f64;
    Ok((y.as_slice().iter().map(|v| v - mean).collect(), mean))
}

/// Lasso on the fully materialized design of all main effects and all
/// products `j ≤ k`.
pub fn explicit_lasso_path(
    x: &RealMatrix,
    y: &RealVector,
    lambdas: &[f64],
    pair_penalty: f64,
    tol: f64,
) -> Result<LassoPath> {
    let (yc, y_mean) = center_response(x, y)?;
    let p = x.n_cols();
    let mut terms: Vec<Term> = (0..p).map(Term::Main).collect();
    for j in 0..p {
        for k in j..p {
            terms.push(Term::Pair(j, k));
        }
    }
    let design = Explicit::build(x, &terms);
    let sols = design.path(&yc, lambdas, pair_penalty, tol)?;
    Ok(design.to_path(sols, lambdas, y_mean))
}

/// Main-effects Lasso at the smallest `λ`, then the Lasso over all main
/// effects plus the products among the selected ones.
pub fn two_stage_lasso(x: &RealMatrix, y: &RealVector, lambdas: &[f64], tol: f64) -> Result<LassoPath> {
    let (yc, y_mean) = center_response(x, y)?;
    let p = x.n_cols();
    let mains: Vec<Term> = (0..p).map(Term::Main).collect();
    let first = Explicit::build(x, &mains);
    let sols = first.path(&yc, lambdas, 1.0, tol)?;
    let (beta, _) = sols.last().ok_or(XyzError::Empty("lambda grid"))?;
    let selected: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0).collect();
    let mut terms = mains;
    for (a, &j) in selected.iter().enumerate() {
        for &k in &selected[a..] {
            terms.push(Term::Pair(j, k));
        }
    }
    let second = Explicit::build(x, &terms);
    let sols = second.path(&yc, lambdas, 1.0, tol)?;
    Ok(second.to_path(sols, lambdas, y_mean))
}

/// `‖y - ŷ‖² / ‖y‖²`.
pub fn normalized_prediction_error(y: &[f64], predicted: &[f64]) -> f64 {
    let num: f64 = y.iter().zip(predicted).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = y.iter().map(|a| a * a).sum();
    num / den
}

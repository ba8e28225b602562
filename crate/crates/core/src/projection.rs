//! One-dimensional projections of the columns of `X` and `Z`.
//!
//! Minimal subsampling projects each column onto `M` sampled rows. With a
//! zero closeness threshold the projected values of two columns coincide
//! exactly when the columns agree on every sampled row, so the projection is
//! represented as an `M`-bit integer key instead of a real number. The dense
//! Gaussian projection is kept as a comparison baseline.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Result, XyzError};
use crate::matrix::{PackedMatrix, RealMatrix, RealVector, Transform, WeightedSampler, WORD_BITS};

pub const MAX_SUBSAMPLE_SIZE: usize = 64;

/// Row indices sampled with replacement (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsampleDraw {
    indices: Vec<usize>,
}

impl SubsampleDraw {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        check_subsample_size(indices.len())?;
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn subsample_size(&self) -> usize {
        self.indices.len()
    }
}

pub(crate) fn check_subsample_size(m: usize) -> Result<()> {
    if m == 0 || m > MAX_SUBSAMPLE_SIZE {
        Err(XyzError::InvalidParameter(format!(
            "subsample size must be in [1, {MAX_SUBSAMPLE_SIZE}], got {m}"
        )))
    } else {
        Ok(())
    }
}

/// Projected value of one column: bit `m` holds the entry at the `m`-th
/// sampled row (`1` ↔ `+1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectionKey {
    pub column: usize,
    pub key: u64,
}

/// Draws `m` row indices i.i.d., uniformly or from `weights`.
pub fn draw_subsample<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    weights: Option<&WeightedSampler>,
    rng: &mut R,
) -> Result<SubsampleDraw> {
    check_subsample_size(m)?;
    if n == 0 {
        return Err(XyzError::Empty("cannot subsample zero rows"));
    }
    let indices = match weights {
        Some(w) => {
            if w.len() != n {
                return Err(XyzError::DimensionMismatch {
                    what: "sampler length",
                    expected: n,
                    got: w.len(),
                });
            }
            (0..m).map(|_| w.sample(rng)).collect()
        }
        None => (0..m).map(|_| rng.random_range(0..n)).collect(),
    };
    Ok(SubsampleDraw { indices })
}

pub fn project_keys(a: &PackedMatrix, draw: &SubsampleDraw) -> Result<Vec<ProjectionKey>> {
    if let Some(&i) = draw.indices.iter().find(|&&i| i >= a.n_rows()) {
        return Err(XyzError::IndexOutOfRange {
            index: i,
            len: a.n_rows(),
        });
    }
    let mut keys = Vec::with_capacity(a.n_cols());
    fill_keys(a, draw, &mut keys);
    Ok(keys)
}

/// Unchecked key extraction into a reusable buffer.
pub(crate) fn fill_keys(a: &PackedMatrix, draw: &SubsampleDraw, out: &mut Vec<ProjectionKey>) {
    out.clear();
    let wpc = a.words_per_col();
    let words = a.words();
    let offsets: Vec<(usize, u32)> = draw
        .indices
        .iter()
        .map(|&i| (i / WORD_BITS, (i % WORD_BITS) as u32))
        .collect();
    for j in 0..a.n_cols() {
        let col = &words[j * wpc..(j + 1) * wpc];
        let mut key = 0u64;
        for (m, &(w, s)) in offsets.iter().enumerate() {
            key |= ((col[w] >> s) & 1) << m;
        }
        out.push(ProjectionKey { column: j, key });
    }
}

/// Keys for real `X` binarized afresh at every sampled position, together
/// with the matching `Z = sgn(Y) ∘ X̃` keys. Each of the `M·p` transformed
/// entries is an independent draw.
pub fn project_keys_transformed<R: Rng + ?Sized>(
    x: &RealMatrix,
    response_positive: &[bool],
    draw: &SubsampleDraw,
    transform: Transform,
    rng: &mut R,
) -> Result<(Vec<ProjectionKey>, Vec<ProjectionKey>)> {
    if response_positive.len() != x.n_rows() {
        return Err(XyzError::DimensionMismatch {
            what: "response length",
            expected: x.n_rows(),
            got: response_positive.len(),
        });
    }
    if let Some(&i) = draw.indices.iter().find(|&&i| i >= x.n_rows()) {
        return Err(XyzError::IndexOutOfRange {
            index: i,
            len: x.n_rows(),
        });
    }
    let mut xk = Vec::new();
    let mut zk = Vec::new();
    fill_keys_transformed(x, response_positive, draw, transform, rng, &mut xk, &mut zk);
    Ok((xk, zk))
}

pub(crate) fn fill_keys_transformed<R: Rng + ?Sized>(
    x: &RealMatrix,
    response_positive: &[bool],
    draw: &SubsampleDraw,
    transform: Transform,
    rng: &mut R,
    x_keys: &mut Vec<ProjectionKey>,
    z_keys: &mut Vec<ProjectionKey>,
) {
    let p = x.n_cols();
    let mut xk = vec![0u64; p];
    let mut zk = vec![0u64; p];
    for (m, &i) in draw.indices.iter().enumerate() {
        let flip = !response_positive[i];
        for j in 0..p {
            let b = transform.sample(x.get(i, j), rng);
            xk[j] |= u64::from(b) << m;
            zk[j] |= u64::from(b ^ flip) << m;
        }
    }
    x_keys.clear();
    z_keys.clear();
    x_keys.extend(xk.into_iter().enumerate().map(|(column, key)| ProjectionKey { column, key }));
    z_keys.extend(zk.into_iter().enumerate().map(|(column, key)| ProjectionKey { column, key }));
}

/// Dense Gaussian projections `x = X^T R`, `z = Z^T R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseProjection {
    pub x: RealVector,
    pub z: RealVector,
    pub tau: f64,
}

impl DenseProjection {
    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }
}

pub fn project_dense<R: Rng + ?Sized>(
    x: &PackedMatrix,
    z: &PackedMatrix,
    rng: &mut R,
) -> Result<DenseProjection> {
    if x.n_rows() != z.n_rows() || x.n_cols() != z.n_cols() {
        return Err(XyzError::DimensionMismatch {
            what: "X and Z shapes",
            expected: x.n_rows() * x.n_cols(),
            got: z.n_rows() * z.n_cols(),
        });
    }
    let r: Vec<f64> = (0..x.n_rows()).map(|_| rng.sample(StandardNormal)).collect();
    let project = |a: &PackedMatrix| -> Vec<f64> {
        (0..a.n_cols())
            .map(|j| {
                r.iter()
                    .enumerate()
                    .map(|(i, ri)| if a.bit(i, j) { *ri } else { -*ri })
                    .sum()
            })
            .collect()
    };
    Ok(DenseProjection {
        x: RealVector::new(project(x))?,
        z: RealVector::new(project(z))?,
        tau: 0.0,
    })
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// `τ` with `P(|W| ≤ τ) = 1/p` for `W ~ N(0, n/2)`.
pub fn gauss_tau_for_budget(p: usize, n: usize) -> Result<f64> {
    if p < 2 {
        return Err(XyzError::InvalidParameter(format!("p must be at least 2, got {p}")));
    }
    if n == 0 {
        return Err(XyzError::Empty("n must be positive"));
    }
    let sd = (n as f64 * 0.5).sqrt();
    let q = 0.5 * (1.0 + 1.0 / p as f64);
    Ok(sd * standard_normal().inverse_cdf(q))
}

/// `P(|W| ≤ τ)` for `W ~ N(0, n(1 - γ))`: chance a strength-`γ` pair lands
/// within `τ` under one dense Gaussian projection, on the same scale as
/// [`gauss_tau_for_budget`].
pub fn gauss_discovery_probability(gamma: f64, n: usize, tau: f64) -> f64 {
    let var = n as f64 * (1.0 - gamma);
    if var <= 0.0 {
        return 1.0;
    }
    2.0 * standard_normal().cdf(tau / var.sqrt()) - 1.0
}

/// Smallest `M` with `0.5^M ≤ 1/p`, i.e. `ceil(log(1/p) / log(0.5))`.
pub fn minimal_budget_subsample_size(p: usize) -> usize {
    let mut m = 0;
    while (1u128 << m) < p as u128 {
        m += 1;
    }
    m.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{build_z, SignVector};
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn draw_single_row() {
        let mut rng = seeded(1);
        let d = draw_subsample(1, 17, None, &mut rng).unwrap();
        assert!(d.indices().iter().all(|&i| i == 0));
        assert_eq!(d.subsample_size(), 17);
    }

    #[test]
    fn draw_degenerate_weights() {
        let w = WeightedSampler::new(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let d = draw_subsample(4, 64, Some(&w), &mut seeded(4)).unwrap();
        assert!(d.indices().iter().all(|&i| i == 0));
    }

    #[test]
    fn draw_rejects_bad_sizes() {
        let mut rng = seeded(0);
        assert!(draw_subsample(10, 0, None, &mut rng).is_err());
        assert!(draw_subsample(10, 65, None, &mut rng).is_err());
        assert!(draw_subsample(0, 3, None, &mut rng).is_err());
    }

    #[test]
    fn uniform_draw_frequencies() {
        let mut rng = seeded(10);
        let (n, m, reps) = (10usize, 5usize, 100_000usize);
        let mut counts = [0usize; 10];
        for _ in 0..reps {
            for &i in draw_subsample(n, m, None, &mut rng).unwrap().indices() {
                counts[i] += 1;
            }
        }
        let total = (m * reps) as f64;
        let sd = (0.1 * 0.9 / total).sqrt();
        for c in counts {
            assert!((c as f64 / total - 0.1).abs() < 3.0 * sd);
        }
    }

    #[test]
    fn key_examples() {
        let a = PackedMatrix::from_columns(&[vec![1, -1, 1], vec![-1, -1, 1], vec![1, -1, 1]]).unwrap();
        let draw = SubsampleDraw::new(vec![0]).unwrap();
        let keys = project_keys(&a, &draw).unwrap();
        assert_eq!(keys[0].key, 1);
        assert_eq!(keys[1].key, 0);
        let draw = SubsampleDraw::new(vec![2, 1, 0, 0]).unwrap();
        let keys = project_keys(&a, &draw).unwrap();
        assert_eq!(keys[0].key, keys[2].key);
        assert_eq!(keys[0].key, 0b1101);
        assert!(keys.iter().all(|k| k.key >> 4 == 0));
        assert!(SubsampleDraw::new(vec![]).is_err());
        assert!(project_keys(&a, &SubsampleDraw::new(vec![3]).unwrap()).is_err());
    }

    #[test]
    fn perfect_pair_always_shares_key() {
        let mut rng = seeded(8);
        let n = 50;
        let x = PackedMatrix::from_fn(n, 4, |_, _| rng.random::<bool>()).unwrap();
        let y: Vec<i8> = (0..n).map(|i| x.get(i, 0) * x.get(i, 1)).collect();
        let z = build_z(&x, &SignVector::new(y).unwrap()).unwrap();
        for _ in 0..200 {
            let d = draw_subsample(n, 20, None, &mut rng).unwrap();
            let kx = project_keys(&x, &d).unwrap();
            let kz = project_keys(&z, &d).unwrap();
            assert_eq!(kx[0].key, kz[1].key);
            assert_eq!(kx[1].key, kz[0].key);
        }
    }

    #[test]
    fn dense_identical_columns_project_equal() {
        let x = PackedMatrix::from_columns(&[vec![1, -1, 1, 1]]).unwrap();
        let p = project_dense(&x, &x.clone(), &mut seeded(2)).unwrap();
        assert_eq!(p.x.as_slice()[0], p.z.as_slice()[0]);
    }

    #[test]
    fn dense_difference_variance() {
        // γ = 0.5 at n = 100: columns differ on 50 rows, so
        // E(x_j - z_k)^2 = ||X_j - Z_k||^2 = 50 * 4 = 200.
        let n = 100;
        let xj: Vec<i8> = (0..n).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
        let zk: Vec<i8> = xj.iter().enumerate().map(|(i, &v)| if i < 50 { -v } else { v }).collect();
        let x = PackedMatrix::from_columns(&[xj]).unwrap();
        let z = PackedMatrix::from_columns(&[zk]).unwrap();
        let mut rng = seeded(21);
        let draws = 10_000;
        let sq: Vec<f64> = (0..draws)
            .map(|_| {
                let p = project_dense(&x, &z, &mut rng).unwrap();
                (p.x.as_slice()[0] - p.z.as_slice()[0]).powi(2)
            })
            .collect();
        let mean = sq.iter().sum::<f64>() / draws as f64;
        // Var of a scaled chi-square(1) with mean 200 is 2 * 200^2.
        let se = (2.0f64 * 200.0 * 200.0 / draws as f64).sqrt();
        assert!((mean - 200.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn tau_examples() {
        let tau = gauss_tau_for_budget(2, 2).unwrap();
        assert!((tau - 0.674_489_750_196_081_7).abs() < 1e-9, "{tau}");
        let t1 = gauss_tau_for_budget(100, 10).unwrap();
        let t2 = gauss_tau_for_budget(100, 1000).unwrap();
        assert!(t2 > t1);
        for &(p, n) in &[(2usize, 2usize), (10, 50), (1000, 1000), (10_000, 1000)] {
            let tau = gauss_tau_for_budget(p, n).unwrap();
            let back = gauss_discovery_probability(0.5, n, tau);
            assert!((back - 1.0 / p as f64).abs() < 1e-9, "p={p}: {back}");
        }
        assert!(gauss_tau_for_budget(1, 10).is_err());
    }

    #[test]
    fn budget_subsample_size() {
        assert_eq!(minimal_budget_subsample_size(2), 1);
        assert_eq!(minimal_budget_subsample_size(100), 7);
        assert_eq!(minimal_budget_subsample_size(1000), 10);
        assert_eq!(minimal_budget_subsample_size(1024), 10);
        assert_eq!(minimal_budget_subsample_size(10_000), 14);
    }

    #[test]
    fn transformed_keys_respect_binary_inputs() {
        // Entries of ±1 are deterministic under both transforms, so the
        // transformed keys must equal the packed keys.
        let mut rng = seeded(30);
        let n = 40;
        let xb = PackedMatrix::from_fn(n, 5, |_, _| rng.random::<bool>()).unwrap();
        let y: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let yv = SignVector::new(y.clone()).unwrap();
        let z = build_z(&xb, &yv).unwrap();
        let xr = xb.to_real();
        let pos: Vec<bool> = y.iter().map(|&v| v > 0).collect();
        for t in [Transform::Sign, Transform::Unbiased] {
            let d = draw_subsample(n, 12, None, &mut rng).unwrap();
            let (kx, kz) = project_keys_transformed(&xr, &pos, &d, t, &mut rng).unwrap();
            assert_eq!(kx, project_keys(&xb, &d).unwrap());
            assert_eq!(kz, project_keys(&z, &d).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn key_equality_iff_agreement_on_sampled_rows(
            n in 1usize..100,
            p in 1usize..=32,
            m in 1usize..=8,
            seed in any::<u64>(),
        ) {
            let mut rng = seeded(seed);
            let x = PackedMatrix::from_fn(n, p, |_, _| rng.random::<bool>()).unwrap();
            let z = PackedMatrix::from_fn(n, p, |_, _| rng.random::<bool>()).unwrap();
            let d = draw_subsample(n, m, None, &mut rng).unwrap();
            let kx = project_keys(&x, &d).unwrap();
            let kz = project_keys(&z, &d).unwrap();
            for j in 0..p {
                for k in 0..p {
                    let agree = d.indices().iter().all(|&i| x.get(i, j) == z.get(i, k));
                    prop_assert_eq!(kx[j].key == kz[k].key, agree);
                }
            }
        }
    }
}

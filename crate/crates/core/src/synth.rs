//! Synthetic data with planted interactions.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Result, XyzError};
use crate::matrix::{PackedMatrix, RealMatrix, RealVector, SignVector};

fn check_pair(p: usize, j: usize, k: usize) -> Result<()> {
    if j >= p || k >= p || j == k {
        return Err(XyzError::InvalidParameter(format!(
            "planted pair ({j}, {k}) must be two distinct columns below {p}"
        )));
    }
    Ok(())
}

/// Rademacher `X` and `Y = X_j ∘ X_k` with `n - ⌈γ n⌉` rows flipped, so the
/// pair's strength is `⌈γ n⌉ / n`.
pub fn planted_binary<R: Rng + ?Sized>(
    n: usize,
    p: usize,
    gamma: f64,
    pair: (usize, usize),
    rng: &mut R,
) -> Result<(PackedMatrix, SignVector)> {
    check_pair(p, pair.0, pair.1)?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(XyzError::InvalidParameter(format!("strength {gamma} outside [0, 1]")));
    }
    let x = PackedMatrix::from_fn(n, p, |_, _| rng.random::<bool>())?;
    let agree = ((gamma * n as f64) - 1e-9).ceil().max(0.0) as usize;
    let flips = n - agree.min(n);
    let mut y: Vec<i8> = (0..n).map(|i| x.get(i, pair.0) * x.get(i, pair.1)).collect();
    for i in sample(rng, n, flips) {
        y[i] = -y[i];
    }
    Ok((x, SignVector::new(y)?))
}

/// Uniform(-1, 1) design with the noiseless response `Y = X_j X_k`.
pub fn continuous_uniform<R: Rng + ?Sized>(
    n: usize,
    p: usize,
    pair: (usize, usize),
    rng: &mut R,
) -> Result<(RealMatrix, RealVector)> {
    check_pair(p, pair.0, pair.1)?;
    let u = Uniform::new(-1.0, 1.0).expect("valid range");
    let x = RealMatrix::from_fn(n, p, |_, _| u.sample(rng))?;
    let y = RealVector::new((0..n).map(|i| x.get(i, pair.0) * x.get(i, pair.1)).collect())?;
    Ok((x, y))
}

/// Rademacher design with `Y = X_j X_k + σ ε`, `ε ~ N(0, 1)`.
pub fn binary_with_noise<R: Rng + ?Sized>(
    n: usize,
    p: usize,
    pair: (usize, usize),
    sigma: f64,
    rng: &mut R,
) -> Result<(PackedMatrix, RealVector)> {
    check_pair(p, pair.0, pair.1)?;
    let x = PackedMatrix::from_fn(n, p, |_, _| rng.random::<bool>())?;
    let y = (0..n)
        .map(|i| {
            let e: f64 = rng.sample(StandardNormal);
            f64::from(x.get(i, pair.0) * x.get(i, pair.1)) + sigma * e
        })
        .collect();
    Ok((x, RealVector::new(y)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegressionSetting {
    /// Independent columns; interactions only among main-effect columns.
    Hierarchical,
    /// Independent columns; interactions only among columns without main
    /// effects.
    AntiHierarchical,
    /// As `AntiHierarchical`, with columns generated along a random DAG.
    Correlated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegressionData {
    pub x: RealMatrix,
    pub y: RealVector,
    pub main: Vec<(usize, f64)>,
    pub pairs: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionSpec {
    pub n: usize,
    pub p: usize,
    pub setting: RegressionSetting,
    pub main_effects: usize,
    pub interactions: usize,
    pub noise_sd: f64,
}

impl RegressionSpec {
    /// 20 main effects, 10 interactions, unit noise.
    pub fn new(n: usize, p: usize, setting: RegressionSetting) -> Self {
        Self {
            n,
            p,
            setting,
            main_effects: 20,
            interactions: 10,
            noise_sd: 1.0,
        }
    }
}

/// Standardized columns where each column, in order, is a random linear
/// combination of on average `avg_parents` earlier columns plus noise with
/// a tenth of the parents' variance.
pub fn dag_design<R: Rng + ?Sized>(n: usize, p: usize, avg_parents: f64, rng: &mut R) -> Result<RealMatrix> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    for j in 0..p {
        let prob = if j == 0 { 0.0 } else { (avg_parents / j as f64).min(1.0) };
        let mut parents: Vec<(usize, f64)> = Vec::new();
        for a in 0..j {
            if rng.random::<f64>() < prob {
                parents.push((a, rng.sample(StandardNormal)));
            }
        }
        let mut col = vec![0.0; n];
        for &(a, w) in &parents {
            for (c, v) in col.iter_mut().zip(&cols[a]) {
                *c += w * v;
            }
        }
        let var = variance(&col);
        let sd = if parents.is_empty() || var == 0.0 { 1.0 } else { (0.1 * var).sqrt() };
        for c in col.iter_mut() {
            *c += sd * rng.sample::<f64, _>(StandardNormal);
        }
        let m = col.iter().sum::<f64>() / n as f64;
        let s = variance(&col).sqrt();
        for c in col.iter_mut() {
            *c = (*c - m) / s;
        }
        cols.push(col);
    }
    RealMatrix::from_columns(&cols)
}

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n
}

fn effect<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let magnitude = rng.random_range(2.0..=6.0);
    if rng.random::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

/// Regression data `Y = Σ X_j β_j + Σ X_j X_k θ_jk + ε` with effect
/// magnitudes uniform on `[2, 6]` and random signs.
pub fn regression<R: Rng + ?Sized>(spec: &RegressionSpec, rng: &mut R) -> Result<RegressionData> {
    let RegressionSpec {
        n,
        p,
        setting,
        main_effects,
        interactions,
        noise_sd,
    } = *spec;
    if main_effects > p {
        return Err(XyzError::InvalidParameter("more main effects than columns".into()));
    }
    let x = match setting {
        RegressionSetting::Correlated => dag_design(n, p, 10.0, rng)?,
        _ => RealMatrix::from_fn(n, p, |_, _| rng.sample(StandardNormal))?,
    };
    let mut main_idx = sample(rng, p, main_effects).into_vec();
    main_idx.sort_unstable();
    let pool: Vec<usize> = match setting {
        RegressionSetting::Hierarchical => main_idx.clone(),
        _ => (0..p).filter(|j| !main_idx.contains(j)).collect(),
    };
    let available = pool.len() * pool.len().saturating_sub(1) / 2;
    if interactions > available {
        return Err(XyzError::InvalidParameter(format!(
            "{interactions} interactions requested but only {available} eligible pairs"
        )));
    }
    let mut chosen: Vec<(usize, usize)> = sample(rng, available, interactions)
        .into_iter()
        .map(|t| unrank_pair(t, pool.len()))
        .map(|(a, b)| (pool[a], pool[b]))
        .collect();
    chosen.sort_unstable();

    let main: Vec<(usize, f64)> = main_idx.into_iter().map(|j| (j, effect(rng))).collect();
    let pairs: Vec<(usize, usize, f64)> = chosen.into_iter().map(|(j, k)| (j, k, effect(rng))).collect();
    let y = (0..n)
        .map(|i| {
            let mut v: f64 = main.iter().map(|&(j, b)| b * x.get(i, j)).sum();
            v += pairs.iter().map(|&(j, k, t)| t * x.get(i, j) * x.get(i, k)).sum::<f64>();
            v + noise_sd * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    Ok(RegressionData {
        x,
        y: RealVector::new(y)?,
        main,
        pairs,
    })
}

/// Index of the `t`-th pair `a < b` in row-major order over `m` items.
fn unrank_pair(mut t: usize, m: usize) -> (usize, usize) {
    for a in 0..m {
        let row = m - 1 - a;
        if t < row {
            return (a, a + 1 + t);
        }
        t -= row;
    }
    unreachable!("pair rank out of range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{build_z, interaction_strength};
    use crate::rng::seeded;

    #[test]
    fn planted_strength_is_exact() {
        let mut rng = seeded(1);
        for (n, g) in [(128, 0.95), (1000, 0.8), (50, 1.0), (10, 0.0)] {
            let (x, y) = planted_binary(n, 10, g, (2, 5), &mut rng).unwrap();
            let z = build_z(&x, &y).unwrap();
            let s = interaction_strength(&x, &z, 2, 5).unwrap();
            assert_eq!(s, ((g * n as f64) - 1e-9).ceil() / n as f64);
            assert!(s >= g);
        }
        assert!(planted_binary(10, 3, 0.9, (1, 1), &mut rng).is_err());
    }

    #[test]
    fn unrank_covers_all_pairs() {
        let m = 7;
        let all: Vec<_> = (0..m * (m - 1) / 2).map(|t| unrank_pair(t, m)).collect();
        let mut expected = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                expected.push((a, b));
            }
        }
        assert_eq!(all, expected);
    }

    #[test]
    fn regression_settings_respect_hierarchy() {
        let mut rng = seeded(3);
        for setting in [RegressionSetting::Hierarchical, RegressionSetting::AntiHierarchical, RegressionSetting::Correlated] {
            let d = regression(&RegressionSpec::new(100, 60, setting), &mut rng).unwrap();
            assert_eq!(d.main.len(), 20);
            assert_eq!(d.pairs.len(), 10);
            let mains: Vec<usize> = d.main.iter().map(|m| m.0).collect();
            for &(j, k, t) in &d.pairs {
                assert!(j < k);
                assert!((2.0..=6.0).contains(&t.abs()));
                let inside = mains.contains(&j) && mains.contains(&k);
                let outside = !mains.contains(&j) && !mains.contains(&k);
                match setting {
                    RegressionSetting::Hierarchical => assert!(inside),
                    _ => assert!(outside),
                }
            }
        }
    }

    #[test]
    fn dag_design_is_correlated_and_standardized() {
        let x = dag_design(500, 80, 10.0, &mut seeded(4)).unwrap();
        let mut strong = 0;
        for j in 0..80 {
            let c = x.column(j);
            assert!(c.iter().sum::<f64>().abs() < 1e-8);
            assert!((variance(c) - 1.0).abs() < 1e-8);
            for k in j + 1..80 {
                let r: f64 = c.iter().zip(x.column(k)).map(|(a, b)| a * b).sum::<f64>() / 500.0;
                if r.abs() > 0.9 {
                    strong += 1;
                }
            }
        }
        assert!(strong > 0);
    }
}

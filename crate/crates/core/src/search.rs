//! End-to-end interaction search.
//!
//! Each repetition draws `M` rows, keys every column of `X` and `Z` on those
//! rows, collects the equal-key pairs and checks the strength of every pair
//! not checked before. Binary data uses uniform rows and `Z = Y ∘ X`; a real
//! response samples rows proportionally to `|Y_i|` with `Z = sgn(Y) ∘ X`;
//! real `X` is additionally binarized afresh for every repetition.
//!
//! Results do not depend on the number of threads: every repetition has its
//! own random stream and candidates are merged in repetition order.


use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clock::Stopwatch;
use crate::error::{Result, XyzError};
use crate::matrix::{
    build_z, packed_strength, transformed_strength_raw, PackedMatrix, RealMatrix, RealVector,
    SignVector, Transform, WeightedSampler, WeightedStrength,
};
use crate::pairs::{check_threshold, equal_pairs, CandidatePairSet, InteractionHit, SeenSet, Sign};
use crate::params::{
    gamma0, optimal_subsample_size, repetitions_for_target, runtime_exponent, StrengthSample,
    SubsampleChoice,
};
use crate::par;
use crate::projection::{
    check_subsample_size, draw_subsample, fill_keys, fill_keys_transformed, ProjectionKey,
    MAX_SUBSAMPLE_SIZE,
};
use crate::rng::{stream_rng, NEGATIVE_PASS_STREAM};

/// Stream used for strength sampling during automatic parameter selection.
pub const SAMPLING_STREAM: u64 = 1 << 41;

/// Repetitions generated concurrently before their candidates are merged.
const BATCH: usize = 8;

#[derive(Clone, Copy, Debug)]
pub enum Design<'a> {
    Binary(&'a PackedMatrix),
    Real(&'a RealMatrix),
}

impl Design<'_> {
    pub fn n_rows(&self) -> usize {
        match self {
            Design::Binary(x) => x.n_rows(),
            Design::Real(x) => x.n_rows(),
        }
    }

    pub fn n_cols(&self) -> usize {
        match self {
            Design::Binary(x) => x.n_cols(),
            Design::Real(x) => x.n_cols(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Response<'a> {
    Signs(&'a SignVector),
    Real(&'a RealVector),
}

impl Response<'_> {
    pub fn len(&self) -> usize {
        match self {
            Response::Signs(y) => y.len(),
            Response::Real(y) => y.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Binary,
    ContinuousY,
    ContinuousXY,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub subsample_size: usize,
    pub repetitions: usize,
    pub min_strength: f64,
    /// Binarization of real `X`; required exactly when `X` is real.
    pub transform: Option<Transform>,
    /// Also search `-Y`, reporting strongly anti-aligned pairs.
    pub search_negatives: bool,
    pub seed: u64,
    /// Candidate pairs allowed per repetition and sign before the repetition
    /// is abandoned. `None` means `16 p`.
    pub max_candidates_per_rep: Option<usize>,
}

impl SearchConfig {
    pub fn new(subsample_size: usize, repetitions: usize, min_strength: f64) -> Self {
        Self {
            subsample_size,
            repetitions,
            min_strength,
            transform: None,
            search_negatives: true,
            seed: 0,
            max_candidates_per_rep: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = Some(transform);
        self
    }

    pub fn with_negatives(mut self, on: bool) -> Self {
        self.search_negatives = on;
        self
    }

    pub fn with_max_candidates(mut self, cap: usize) -> Self {
        self.max_candidates_per_rep = Some(cap);
        self
    }

    pub fn candidate_cap(&self, p: usize) -> usize {
        self.max_candidates_per_rep.unwrap_or(16 * p)
    }

    fn validate(&self) -> Result<()> {
        check_subsample_size(self.subsample_size)?;
        if self.repetitions == 0 {
            return Err(XyzError::InvalidParameter("repetitions must be at least 1".into()));
        }
        check_threshold(self.min_strength)?;
        if self.max_candidates_per_rep == Some(0) {
            return Err(XyzError::InvalidParameter("candidate cap must be positive".into()));
        }
        Ok(())
    }
}

/// A repetition whose candidate set exceeded the cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbortedRepetition {
    pub repetition: usize,
    pub sign: Sign,
    pub candidates: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub mode: SearchMode,
    pub subsample_size: usize,
    pub min_strength: f64,
    /// Distinct pairs reaching the threshold, `j < k`, in discovery order.
    /// For the negative pass the strength refers to `-Y`.
    pub hits: Vec<InteractionHit>,
    pub repetitions_run: usize,
    /// Pairs whose strength was evaluated.
    pub candidates_checked: usize,
    /// Evaluations in each repetition, both signs together.
    pub checked_per_repetition: Vec<usize>,
    /// `Σ |E_l|` over repetitions and signs, including repeats.
    pub candidate_pairs: usize,
    pub aborted: Vec<AbortedRepetition>,
    pub wall_time_secs: f64,
    /// `n p + Σ_l (M p + p log p + n |E_l|)` with observed candidate counts.
    pub estimated_cost: f64,
    pub gamma0: f64,
}

impl SearchReport {
    /// Whether `{j, k}` was reported with the given sign.
    pub fn contains(&self, j: usize, k: usize, sign: Sign) -> bool {
        let (a, b) = (j.min(k), j.max(k));
        self.hits.iter().any(|h| h.j == a && h.k == b && h.sign == sign)
    }
}

enum PassData<'a> {
    Binary {
        x: &'a PackedMatrix,
        z: PackedMatrix,
    },
    Weighted {
        x: &'a PackedMatrix,
        z: PackedMatrix,
        strength: WeightedStrength,
        sampler: WeightedSampler,
    },
    Transformed {
        x: &'a RealMatrix,
        y: Vec<f64>,
        l1: f64,
        positive: Vec<bool>,
        transform: Transform,
        sampler: WeightedSampler,
    },
}

/// One signed search pass with everything needed to generate candidates and
/// evaluate strengths.
struct Pass<'a> {
    sign: Sign,
    stream_base: u64,
    data: PassData<'a>,
}

impl<'a> Pass<'a> {
    fn new(design: Design<'a>, response: Response<'_>, config: &SearchConfig, sign: Sign) -> Result<Self> {
        let flip = sign == Sign::Negative;
        let stream_base = if flip { NEGATIVE_PASS_STREAM } else { 0 };
        let data = match (design, response) {
            (Design::Binary(x), Response::Signs(y)) => {
                let y = if flip { y.negated() } else { y.clone() };
                PassData::Binary { x, z: build_z(x, &y)? }
            }
            (Design::Binary(x), Response::Real(y)) => {
                let y = if flip { y.negated() } else { y.clone() };
                let sampler = WeightedSampler::from_response(&y)?;
                let strength = WeightedStrength::new(&y)?;
                let z = build_z(x, &SignVector::sign_of(&y))?;
                PassData::Weighted { x, z, strength, sampler }
            }
            (Design::Real(x), response) => {
                let transform = config.transform.ok_or_else(|| {
                    XyzError::InvalidParameter("real design requires a transform".into())
                })?;
                transform.check_domain(x)?;
                let y = match response {
                    Response::Signs(y) => y.to_real(),
                    Response::Real(y) => y.clone(),
                };
                let y = if flip { y.negated() } else { y };
                let sampler = WeightedSampler::from_response(&y)?;
                let l1 = y.l1_norm();
                let positive = y.as_slice().iter().map(|&v| v > 0.0).collect();
                PassData::Transformed {
                    x,
                    y: y.into_vec(),
                    l1,
                    positive,
                    transform,
                    sampler,
                }
            }
        };
        Ok(Self { sign, stream_base, data })
    }

    fn n_rows(&self) -> usize {
        match &self.data {
            PassData::Binary { x, .. } | PassData::Weighted { x, .. } => x.n_rows(),
            PassData::Transformed { x, .. } => x.n_rows(),
        }
    }

    fn candidates(&self, seed: u64, repetition: usize, m: usize) -> Result<CandidatePairSet> {
        let mut rng = stream_rng(seed, self.stream_base + repetition as u64);
        let mut xk: Vec<ProjectionKey> = Vec::new();
        let mut zk: Vec<ProjectionKey> = Vec::new();
        match &self.data {
            PassData::Binary { x, z } => {
                let draw = draw_subsample(self.n_rows(), m, None, &mut rng)?;
                fill_keys(x, &draw, &mut xk);
                fill_keys(z, &draw, &mut zk);
            }
            PassData::Weighted { x, z, sampler, .. } => {
                let draw = draw_subsample(self.n_rows(), m, Some(sampler), &mut rng)?;
                fill_keys(x, &draw, &mut xk);
                fill_keys(z, &draw, &mut zk);
            }
            PassData::Transformed {
                x,
                positive,
                transform,
                sampler,
                ..
            } => {
                let draw = draw_subsample(self.n_rows(), m, Some(sampler), &mut rng)?;
                fill_keys_transformed(x, positive, &draw, *transform, &mut rng, &mut xk, &mut zk);
            }
        }
        Ok(equal_pairs(&xk, &zk))
    }

    fn strength(&self, j: usize, k: usize) -> f64 {
        match &self.data {
            PassData::Binary { x, z } => packed_strength(x, z, j, k),
            PassData::Weighted { x, z, strength, .. } => strength.eval(x, z, j, k),
            PassData::Transformed {
                x, y, l1, transform, ..
            } => transformed_strength_raw(x, y, *l1, *transform, j, k),
        }
    }
}

fn check_inputs(design: Design<'_>, response: Response<'_>, config: &SearchConfig) -> Result<SearchMode> {
    if design.n_rows() != response.len() {
        return Err(XyzError::DimensionMismatch {
            what: "response length",
            expected: design.n_rows(),
            got: response.len(),
        });
    }
    match (design, response) {
        (Design::Binary(_), _) if config.transform.is_some() => Err(XyzError::InvalidParameter(
            "a transform applies only to real designs".into(),
        )),
        (Design::Binary(_), Response::Signs(_)) => Ok(SearchMode::Binary),
        (Design::Binary(_), Response::Real(_)) => Ok(SearchMode::ContinuousY),
        (Design::Real(_), _) => Ok(SearchMode::ContinuousXY),
    }
}

enum RepOutcome {
    Candidates(CandidatePairSet),
    Aborted(usize),
}

/// Runs the full search.
pub fn xyz_search(design: Design<'_>, response: Response<'_>, config: &SearchConfig) -> Result<SearchReport> {
    run(design, response, config, BATCH, |_| false)
}

/// Runs repetitions one at a time and stops after the first repetition that
/// reports a hit satisfying `stop`.
pub fn xyz_search_until(
    design: Design<'_>,
    response: Response<'_>,
    config: &SearchConfig,
    stop: impl Fn(&InteractionHit) -> bool,
) -> Result<SearchReport> {
    run(design, response, config, 1, stop)
}

fn run(
    design: Design<'_>,
    response: Response<'_>,
    config: &SearchConfig,
    batch: usize,
    stop: impl Fn(&InteractionHit) -> bool,
) -> Result<SearchReport> {
    let start = Stopwatch::start();
    config.validate()?;
    let mode = check_inputs(design, response, config)?;
    let (n, p) = (design.n_rows(), design.n_cols());
    let m = config.subsample_size;
    let cap = config.candidate_cap(p);

    let mut passes = vec![Pass::new(design, response, config, Sign::Positive)?];
    if config.search_negatives {
        passes.push(Pass::new(design, response, config, Sign::Negative)?);
    }
    let mut seen: Vec<SeenSet> = passes.iter().map(|_| SeenSet::new()).collect();

    let pf = p as f64;
    let per_rep_fixed = m as f64 * pf + pf * pf.max(1.0).ln();
    let mut report = SearchReport {
        mode,
        subsample_size: m,
        min_strength: config.min_strength,
        hits: Vec::new(),
        repetitions_run: 0,
        candidates_checked: 0,
        checked_per_repetition: Vec::new(),
        candidate_pairs: 0,
        aborted: Vec::new(),
        wall_time_secs: 0.0,
        estimated_cost: n as f64 * pf,
        gamma0: gamma0(p, m),
    };

    let mut rep = 0;
    let mut stop_at = None;
    while rep < config.repetitions {
        let count = batch.min(config.repetitions - rep);
        let tasks: Vec<(usize, usize)> = (rep..rep + count)
            .flat_map(|r| (0..passes.len()).map(move |s| (r, s)))
            .collect();
        let outcomes: Vec<Result<RepOutcome>> = par::map(&tasks, |&(r, s)| {
            let c = passes[s].candidates(config.seed, r, m)?;
            Ok(if c.total_pairs() > cap {
                RepOutcome::Aborted(c.total_pairs())
            } else {
                RepOutcome::Candidates(c)
            })
        });

        for (&(r, s), outcome) in tasks.iter().zip(outcomes) {
            if stop_at.is_some_and(|r0| r > r0) {
                break;
            }
            if s == 0 {
                report.repetitions_run = r + 1;
                report.checked_per_repetition.push(0);
                report.estimated_cost += passes.len() as f64 * per_rep_fixed;
            }
            let pass = &passes[s];
            let candidates = match outcome? {
                RepOutcome::Aborted(total) => {
                    report.candidate_pairs += total;
                    report.aborted.push(AbortedRepetition {
                        repetition: r,
                        sign: pass.sign,
                        candidates: total,
                    });
                    continue;
                }
                RepOutcome::Candidates(c) => c,
            };
            report.candidate_pairs += candidates.total_pairs();
            report.estimated_cost += n as f64 * candidates.total_pairs() as f64;

            let fresh: Vec<(usize, usize)> = candidates
                .iter()
                .filter(|&(j, k)| j != k && seen[s].insert(j, k))
                .collect();
            report.candidates_checked += fresh.len();
            if let Some(last) = report.checked_per_repetition.last_mut() {
                *last += fresh.len();
            }
            let strengths = par::map(&fresh, |&(j, k)| pass.strength(j, k));
            for (&(j, k), s_jk) in fresh.iter().zip(strengths) {
                if s_jk >= config.min_strength {
                    let hit = InteractionHit {
                        j: j.min(k),
                        k: j.max(k),
                        strength: s_jk,
                        found_at_repetition: r,
                        sign: pass.sign,
                    };
                    if stop(&hit) {
                        stop_at = Some(r);
                    }
                    report.hits.push(hit);
                }
            }
        }
        if stop_at.is_some() {
            break;
        }
        rep += count;
    }
    report.wall_time_secs = start.secs();
    Ok(report)
}

/// Strengths of `n_samples` pairs `j != k` drawn uniformly with replacement.
/// For real `X` the strength is the expected match probability under the
/// transform.
pub fn sample_strengths<R: Rng + ?Sized>(
    design: Design<'_>,
    response: Response<'_>,
    transform: Option<Transform>,
    n_samples: usize,
    rng: &mut R,
) -> Result<StrengthSample> {
    if n_samples == 0 {
        return Err(XyzError::InvalidParameter("need at least one sample".into()));
    }
    let p = design.n_cols();
    if p < 2 {
        return Err(XyzError::InvalidParameter("need at least two columns to sample pairs".into()));
    }
    let mut config = SearchConfig::new(1, 1, 1.0);
    config.transform = transform;
    check_inputs(design, response, &config)?;
    let pass = Pass::new(design, response, &config, Sign::Positive)?;
    let pairs: Vec<(usize, usize)> = (0..n_samples)
        .map(|_| {
            let j = rng.random_range(0..p);
            let mut k = rng.random_range(0..p - 1);
            if k >= j {
                k += 1;
            }
            (j, k)
        })
        .collect();
    let strengths = par::map(&pairs, |&(j, k)| pass.strength(j, k).clamp(0.0, 1.0));
    StrengthSample::new(strengths)
}

/// Parameters chosen from the data for a target threshold and discovery
/// probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutoParameters {
    pub config: SearchConfig,
    pub choice: SubsampleChoice,
    pub sample_size: usize,
    /// `1 + log γ / log γ₀`, when `γ₀ < γ`.
    pub runtime_exponent: Option<f64>,
}

/// Picks `M` by minimizing the expected cost per unit of discovery and then
/// the smallest `L` reaching `target`, using `min(10⁵, 10 p)` sampled pair
/// strengths.
pub fn auto_parameters(
    design: Design<'_>,
    response: Response<'_>,
    min_strength: f64,
    target: f64,
    transform: Option<Transform>,
    seed: u64,
) -> Result<AutoParameters> {
    check_threshold(min_strength)?;
    let (n, p) = (design.n_rows(), design.n_cols());
    let sample_size = (10 * p).min(100_000);
    let mut rng = stream_rng(seed, SAMPLING_STREAM);
    let sample = sample_strengths(design, response, transform, sample_size, &mut rng)?;
    let choice = optimal_subsample_size(min_strength, &sample, n, p, 1..=MAX_SUBSAMPLE_SIZE)?;
    let repetitions = repetitions_for_target(choice.subsample_size, min_strength, target)?;
    let mut config = SearchConfig::new(choice.subsample_size, repetitions, min_strength).with_seed(seed);
    config.transform = transform;
    Ok(AutoParameters {
        runtime_exponent: runtime_exponent(min_strength, choice.gamma0).ok(),
        config,
        choice,
        sample_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::interaction_strength;
    use crate::rng::seeded;

    fn random_signs(rng: &mut impl Rng, n: usize) -> Vec<i8> {
        (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
    }

    /// Rademacher design with `Y = X_0 ∘ X_1` flipped on `flips` rows.
    fn planted(n: usize, p: usize, flips: usize, seed: u64) -> (PackedMatrix, SignVector) {
        let mut rng = seeded(seed);
        let cols: Vec<Vec<i8>> = (0..p).map(|_| random_signs(&mut rng, n)).collect();
        let y: Vec<i8> = (0..n)
            .map(|i| if i < flips { -cols[0][i] * cols[1][i] } else { cols[0][i] * cols[1][i] })
            .collect();
        (PackedMatrix::from_columns(&cols).unwrap(), SignVector::new(y).unwrap())
    }

    #[test]
    fn perfect_pair_found_in_one_repetition() {
        let (x, y) = planted(200, 40, 0, 1);
        for m in [1, 5, 20] {
            let cfg = SearchConfig::new(m, 1, 1.0).with_seed(m as u64).with_max_candidates(40 * 40);
            let r = xyz_search(Design::Binary(&x), Response::Signs(&y), &cfg).unwrap();
            assert!(r.contains(0, 1, Sign::Positive));
            let hit = r.hits.iter().find(|h| (h.j, h.k) == (0, 1)).unwrap();
            assert_eq!(hit.strength, 1.0);
            assert_eq!(hit.found_at_repetition, 0);
            assert_eq!(r.mode, SearchMode::Binary);
        }
    }

    #[test]
    fn negative_pass_finds_anti_interaction() {
        let (x, y) = planted(200, 30, 0, 2);
        let y = y.negated();
        let cfg = SearchConfig::new(12, 1, 1.0).with_seed(3);
        let r = xyz_search(Design::Binary(&x), Response::Signs(&y), &cfg).unwrap();
        assert!(r.contains(0, 1, Sign::Negative));
        assert!(!r.contains(0, 1, Sign::Positive));
        let cfg = cfg.with_negatives(false);
        let r = xyz_search(Design::Binary(&x), Response::Signs(&y), &cfg).unwrap();
        assert!(r.hits.is_empty());
    }

    #[test]
    fn hits_are_sound_and_deduplicated() {
        let (x, y) = planted(96, 50, 10, 4);
        let cfg = SearchConfig::new(3, 30, 0.62).with_seed(5).with_max_candidates(2500);
        let r = xyz_search(Design::Binary(&x), Response::Signs(&y), &cfg).unwrap();
        let z = build_z(&x, &y).unwrap();
        let zn = build_z(&x, &y.negated()).unwrap();
        let mut keys = std::collections::HashSet::new();
        for h in &r.hits {
            assert!(h.j < h.k);
            assert!(keys.insert((h.j, h.k, h.sign)));
            let zz = if h.sign == Sign::Positive { &z } else { &zn };
            assert_eq!(interaction_strength(&x, zz, h.j, h.k).unwrap(), h.strength);
            assert!(h.strength >= 0.62);
        }
        assert!(r.candidates_checked <= 2 * 50 * 49 / 2);
        assert!(r.candidates_checked <= r.candidate_pairs);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let (x, y) = planted(128, 80, 12, 6);
        let cfg = SearchConfig::new(4, 25, 0.6).with_seed(11);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| xyz_search(Design::Binary(&x), Response::Signs(&y), &cfg).unwrap())
        };
        let mut a = run(1);
        let mut b = run(4);
        a.wall_time_secs = 0.0;
        b.wall_time_secs = 0.0;
        assert_eq!(a, b);
        assert!(!a.hits.is_empty());
    }

    #[test]
    fn guard_aborts_repetitions() {
        let col = vec![1i8; 16];
        let x = PackedMatrix::from_columns(&vec![col; 10]).unwrap();
        let y = SignVector::new(vec![1; 16]).unwrap();
        let cfg = SearchConfig::new(4, 3, 0.9).with_max_candidates(50).with_negatives(false);
        let r = xyz_search(Design::Binary(&x), Response::Signs(&y), &cfg).unwrap();
        assert_eq!(r.aborted.len(), 3);
        assert!(r.aborted.iter().all(|a| a.candidates == 100));
        assert_eq!(r.candidates_checked, 0);
        assert!(r.hits.is_empty());
    }

    #[test]
    fn weighted_response_matches_weighted_strength() {
        let (x, y) = planted(300, 20, 30, 7);
        let mut rng = seeded(8);
        let yr: Vec<f64> = y
            .values()
            .iter()
            .map(|&s| f64::from(s) * (0.5 + rng.random::<f64>()))
            .collect();
        let yr = RealVector::new(yr).unwrap();
        let cfg = SearchConfig::new(6, 40, 0.7).with_seed(9);
        let r = xyz_search(Design::Binary(&x), Response::Real(&yr), &cfg).unwrap();
        assert_eq!(r.mode, SearchMode::ContinuousY);
        assert!(r.contains(0, 1, Sign::Positive));
        for h in r.hits.iter().filter(|h| h.sign == Sign::Positive) {
            let w = crate::matrix::weighted_interaction_strength(&x, &yr, h.j, h.k).unwrap();
            assert!((w - h.strength).abs() < 1e-12);
        }
    }

    #[test]
    fn real_design_requires_transform() {
        let x = RealMatrix::from_fn(10, 3, |i, j| ((i + j) as f64 / 20.0) - 0.3).unwrap();
        let y = RealVector::new(vec![1.0; 10]).unwrap();
        let cfg = SearchConfig::new(2, 2, 0.6);
        assert!(xyz_search(Design::Real(&x), Response::Real(&y), &cfg).is_err());
        let cfg = cfg.with_transform(Transform::Unbiased);
        let r = xyz_search(Design::Real(&x), Response::Real(&y), &cfg).unwrap();
        assert_eq!(r.mode, SearchMode::ContinuousXY);
        let bad = RealMatrix::from_fn(10, 3, |_, _| 2.0).unwrap();
        assert!(matches!(
            xyz_search(Design::Real(&bad), Response::Real(&y), &cfg),
            Err(XyzError::EntryOutOfRange { .. })
        ));
    }

    #[test]
    fn input_errors() {
        let (x, y) = planted(20, 5, 0, 1);
        let short = SignVector::new(vec![1; 19]).unwrap();
        let cfg = SearchConfig::new(2, 2, 0.9);
        assert!(matches!(
            xyz_search(Design::Binary(&x), Response::Signs(&short), &cfg),
            Err(XyzError::DimensionMismatch { .. })
        ));
        let zero = RealVector::new(vec![0.0; 20]).unwrap();
        assert_eq!(
            xyz_search(Design::Binary(&x), Response::Real(&zero), &cfg).unwrap_err(),
            XyzError::ZeroResponse
        );
        for bad in [
            SearchConfig::new(0, 1, 0.9),
            SearchConfig::new(65, 1, 0.9),
            SearchConfig::new(3, 0, 0.9),
            SearchConfig::new(3, 1, 0.0),
            SearchConfig::new(3, 1, 0.9).with_transform(Transform::Sign),
        ] {
            assert!(xyz_search(Design::Binary(&x), Response::Signs(&y), &bad).is_err());
        }
    }

    #[test]
    fn stop_after_first_discovery() {
        let (x, y) = planted(128, 60, 8, 12);
        let cfg = SearchConfig::new(8, 500, 0.9).with_seed(2).with_negatives(false);
        let r = xyz_search_until(Design::Binary(&x), Response::Signs(&y), &cfg, |h| {
            (h.j, h.k) == (0, 1)
        })
        .unwrap();
        let last = r.hits.last().unwrap();
        assert_eq!((last.j, last.k), (0, 1));
        assert_eq!(r.repetitions_run, last.found_at_repetition + 1);
        let full = xyz_search(Design::Binary(&x), Response::Signs(&y), &cfg).unwrap();
        let first = full.hits.iter().find(|h| (h.j, h.k) == (0, 1)).unwrap();
        assert_eq!(first.found_at_repetition, last.found_at_repetition);
    }

    #[test]
    fn sampled_strengths() {
        let col = vec![1i8, -1, 1, 1];
        let x = PackedMatrix::from_columns(&vec![col; 6]).unwrap();
        let y = SignVector::new(vec![1; 4]).unwrap();
        let s = sample_strengths(Design::Binary(&x), Response::Signs(&y), None, 50, &mut seeded(1)).unwrap();
        assert!(s.strengths().iter().all(|&v| v == 1.0));

        let (x, y) = planted(2000, 30, 0, 3);
        let s = sample_strengths(Design::Binary(&x), Response::Signs(&y), None, 4000, &mut seeded(2)).unwrap();
        assert_eq!(s.len(), 4000);
        // about 1/435 of samples hit the planted pair
        assert!((s.mean() - 0.5).abs() < 0.01, "{}", s.mean());
        assert!(sample_strengths(Design::Binary(&x), Response::Signs(&y), None, 0, &mut seeded(2)).is_err());
    }

    #[test]
    fn auto_parameters_reach_target() {
        let (x, y) = planted(128, 64, 6, 21);
        let a = auto_parameters(Design::Binary(&x), Response::Signs(&y), 0.95, 0.99, None, 4).unwrap();
        let c = &a.config;
        assert!(crate::params::discovery_probability(0.95, c.subsample_size, c.repetitions) >= 0.99);
        assert_eq!(a.sample_size, 640);
        assert!((a.choice.gamma0 - 64f64.powf(-1.0 / c.subsample_size as f64)).abs() < 1e-12);
    }
}

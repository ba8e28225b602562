use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use xyz_core::matrix::weighted_interaction_strength;
use xyz_core::oracle::{brute_force_search, Selection};
use xyz_core::rng::seeded;
use xyz_core::synth::{binary_with_noise, continuous_uniform, planted_binary};
use xyz_core::{xyz_search, Design, PackedMatrix, RealVector, Response, SearchConfig, Sign, SignVector, Transform};

fn oracle_pairs(design: Design<'_>, response: Response<'_>, transform: Option<Transform>, gamma: f64) -> BTreeSet<(usize, usize)> {
    brute_force_search(design, response, transform, Selection::Threshold(gamma), false, false)
        .unwrap()
        .selected
        .iter()
        .map(|s| (s.j, s.k))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn binary_hits_are_sound_and_counted_once(
        n in 20usize..200,
        p in 3usize..40,
        m in 1usize..8,
        l in 1usize..6,
        gamma in 0.55f64..1.0,
        seed in any::<u64>(),
    ) {
        let mut rng = seeded(seed);
        let x = PackedMatrix::from_fn(n, p, |_, _| rng.random::<bool>()).unwrap();
        let y = SignVector::new((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()).unwrap();
        let cfg = SearchConfig::new(m, l, gamma).with_seed(seed).with_max_candidates(p * p);
        let r = xyz_search(Design::Binary(&x), Response::Signs(&y), &cfg).unwrap();

        let pos = oracle_pairs(Design::Binary(&x), Response::Signs(&y), None, gamma);
        let neg = oracle_pairs(Design::Binary(&x), Response::Signs(&y.negated()), None, gamma);
        let mut seen = BTreeSet::new();
        for h in &r.hits {
            prop_assert!(h.j < h.k);
            prop_assert!(h.strength >= gamma);
            let truth = if h.sign == Sign::Positive { &pos } else { &neg };
            prop_assert!(truth.contains(&(h.j, h.k)));
            prop_assert!(seen.insert((h.j, h.k, h.sign == Sign::Positive)));
        }
        prop_assert_eq!(r.checked_per_repetition.len(), r.repetitions_run);
        prop_assert_eq!(r.checked_per_repetition.iter().sum::<usize>(), r.candidates_checked);
        // each unordered pair is evaluated at most once per sign
        prop_assert!(r.candidates_checked <= p * (p - 1));
        prop_assert!(r.candidates_checked <= r.candidate_pairs);
    }

    #[test]
    fn continuous_hits_are_sound(
        n in 20usize..120,
        p in 3usize..20,
        seed in any::<u64>(),
        unbiased in any::<bool>(),
    ) {
        let mut rng = seeded(seed);
        let (x, y) = continuous_uniform(n, p, (0, 1), &mut rng).unwrap();
        let t = if unbiased { Transform::Unbiased } else { Transform::Sign };
        let gamma = 0.6;
        let cfg = SearchConfig::new(3, 4, gamma).with_seed(seed).with_transform(t).with_max_candidates(p * p);
        let r = xyz_search(Design::Real(&x), Response::Real(&y), &cfg).unwrap();
        let pos = oracle_pairs(Design::Real(&x), Response::Real(&y), Some(t), gamma);
        let neg = oracle_pairs(Design::Real(&x), Response::Real(&y.negated()), Some(t), gamma);
        for h in &r.hits {
            let truth = if h.sign == Sign::Positive { &pos } else { &neg };
            prop_assert!(truth.contains(&(h.j, h.k)), "{:?}", h);
        }
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let (x, y) = planted_binary(500, 150, 0.8, (4, 90), &mut seeded(2)).unwrap();
    let cfg = SearchConfig::new(6, 30, 0.7).with_seed(11);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let mut r = pool.install(|| xyz_search(Design::Binary(&x), Response::Signs(&y), &cfg)).unwrap();
        r.wall_time_secs = 0.0;
        r
    };
    let one = run(1);
    assert_eq!(one, run(2));
    assert_eq!(one, run(5));
    assert!(one.contains(4, 90, Sign::Positive));
}

/// With a real response, rows are drawn with probability `|Y_i| / ||Y||_1`,
/// so one repetition keeps the pair with probability `γ̃^M`.
#[test]
fn weighted_single_repetition_rate() {
    let (x, y) = binary_with_noise(300, 6, (1, 4), 1.0, &mut seeded(6)).unwrap();
    let gamma = weighted_interaction_strength(&x, &y, 1, 4).unwrap();
    let m = 6;
    let runs = 4000;
    let mut hits = 0;
    for s in 0..runs {
        let cfg = SearchConfig::new(m, 1, 0.5).with_seed(s).with_negatives(false).with_max_candidates(36);
        let r = xyz_search(Design::Binary(&x), Response::Real(&y), &cfg).unwrap();
        if r.contains(1, 4, Sign::Positive) {
            hits += 1;
        }
    }
    let q = gamma.powi(m as i32);
    let sd = (q * (1.0 - q) / runs as f64).sqrt();
    let freq = hits as f64 / runs as f64;
    assert!((freq - q).abs() < 4.0 * sd, "{freq} vs {q}");
}

/// Candidate pairs in one repetition average `Σ_{j≠k} γ_jk^M` over ordered
/// (X, Z) column pairs.
#[test]
fn first_repetition_candidates_match_expectation() {
    let (n, p, m) = (200, 60, 4);
    let (x, y) = planted_binary(n, p, 0.9, (0, 1), &mut seeded(13)).unwrap();
    let z = xyz_core::matrix::build_z(&x, &y).unwrap();
    let mut expected = 0.0;
    for j in 0..p {
        for k in 0..p {
            if j != k {
                let g = xyz_core::matrix::interaction_strength(&x, &z, j, k).unwrap();
                expected += g.powi(m as i32);
            }
        }
    }
    let runs = 400;
    let mut total = 0usize;
    for s in 0..runs {
        let cfg = SearchConfig::new(m, 1, 0.99).with_seed(s).with_negatives(false).with_max_candidates(p * p);
        let r = xyz_search(Design::Binary(&x), Response::Signs(&y), &cfg).unwrap();
        total += r.candidate_pairs;
    }
    let mean = total as f64 / runs as f64;
    assert!((mean - expected).abs() < 0.1 * expected, "{mean} vs {expected}");
}

#[test]
fn real_response_zero_is_rejected() {
    let x = PackedMatrix::from_signs(3, 2, &[1, -1, 1, 1, 1, -1]).unwrap();
    let y = RealVector::new(vec![0.0; 3]).unwrap();
    let cfg = SearchConfig::new(2, 1, 0.7);
    assert!(xyz_search(Design::Binary(&x), Response::Real(&y), &cfg).is_err());
}

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rand_distr::{Beta, Distribution};
use statrs::distribution::{ContinuousCDF, Normal};

use xyz_core::experiments::{discovery_curves, discovery_trials, loglog_slope, time_to_discover};
use xyz_core::lasso::{lasso_path, LambdaGrid, LassoPathConfig};
use xyz_core::matrix::{
    build_z, interaction_strength, transformed_strength, unbiased_transform_sample, weighted_interaction_strength,
};
use xyz_core::oracle::{brute_force_search, explicit_lasso_path, normalized_prediction_error, two_stage_lasso, Selection};
use xyz_core::params::{discovery_probability, expected_complexity, optimal_subsample_size, repetitions_for_target, StrengthSample};
use xyz_core::projection::ProjectionKey;
use xyz_core::rng::{seeded, stream_rng};
use xyz_core::search::{auto_parameters, xyz_search};
use xyz_core::synth::{binary_with_noise, continuous_uniform, planted_binary, regression, RegressionSetting, RegressionSpec};
use xyz_core::{pairs::equal_pairs, Design, Response, SearchConfig, Sign, SignVector};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn oracle_soundness() -> Outcome {
    let start = Instant::now();
    let (n, p, gamma) = (128, 64, 0.95);
    let mut found = 0;
    let runs = 50;
    for seed in 0..runs {
        let mut rng = seeded(seed);
        let a = rng.random_range(0..p);
        let b = (a + rng.random_range(1..p)) % p;
        let (x, y) = planted_binary(n, p, gamma, (a, b), &mut rng).map_err(|e| e.to_string())?;
        let auto = auto_parameters(Design::Binary(&x), Response::Signs(&y), gamma, 0.99, None, seed)
            .map_err(|e| e.to_string())?;
        let report = xyz_search(Design::Binary(&x), Response::Signs(&y), &auto.config).map_err(|e| e.to_string())?;
        let neg = y.negated();
        let confirm = |yy: &SignVector| -> Result<Vec<(usize, usize, f64)>, String> {
            let r = brute_force_search(Design::Binary(&x), Response::Signs(yy), None, Selection::Threshold(gamma), false, false)
                .map_err(|e| e.to_string())?;
            Ok(r.selected.iter().map(|s| (s.j, s.k, s.strength)).collect())
        };
        let pos_truth = confirm(&y)?;
        let neg_truth = confirm(&neg)?;
        for h in &report.hits {
            let truth = match h.sign {
                Sign::Positive => &pos_truth,
                Sign::Negative => &neg_truth,
            };
            let ok = truth
                .iter()
                .any(|&(j, k, s)| (j, k) == (h.j, h.k) && (s - h.strength).abs() < 1e-12);
            if !ok || h.strength < gamma {
                return Err(format!("seed {seed}: hit {h:?} not confirmed by the oracle"));
            }
        }
        if report.contains(a.min(b), a.max(b), Sign::Positive) {
            found += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        found * 100 >= 95 * runs as usize && secs < 10.0,
        format!("planted pair found in {found}/{runs} runs, every hit confirmed, {secs:.2} s"),
    )
}

fn eta_law() -> Outcome {
    let (n, p, runs) = (100, 16, 1000);
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for gamma in [0.8, 0.9, 1.0] {
        for (m, l) in [(5, 10), (8, 20), (10, 1)] {
            let mut hits = 0;
            for r in 0..runs {
                let seed = (r as u64) << 8 | (m as u64) << 4 | (gamma * 10.0) as u64;
                let mut rng = seeded(seed);
                let (x, y) = planted_binary(n, p, gamma, (0, 1), &mut rng).map_err(|e| e.to_string())?;
                let cfg = SearchConfig::new(m, l, gamma)
                    .with_seed(seed)
                    .with_negatives(false)
                    .with_max_candidates(p * p);
                let report = xyz_search(Design::Binary(&x), Response::Signs(&y), &cfg).map_err(|e| e.to_string())?;
                if report.contains(0, 1, Sign::Positive) {
                    hits += 1;
                }
            }
            let eta = discovery_probability(gamma, m, l);
            let sd = (eta * (1.0 - eta) / runs as f64).sqrt();
            let freq = hits as f64 / runs as f64;
            let z = if sd > 0.0 { (freq - eta).abs() / sd } else if freq == eta { 0.0 } else { f64::INFINITY };
            worst = worst.max(z);
            lines.push(format!("γ={gamma} M={m} L={l}: {freq:.3} vs {eta:.3}"));
        }
    }
    ensure(worst <= 3.0, format!("max deviation {worst:.2} sd; {}", lines.join(", ")))
}

fn scaling_exponent() -> Outcome {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let ps = [1000usize, 2000, 4000, 8000, 16000];
    let (n, gamma, target) = (1000, 0.9, 0.55);
    let (batches, searches) = (5, 150);
    let mut medians = Vec::new();
    let mut ms = Vec::new();
    for &p in &ps {
        let mut totals = Vec::new();
        for b in 0..batches {
            let seed = 1000 * b as u64 + 17;
            let point = pool
                .install(|| time_to_discover(p, n, gamma, target, searches, seed))
                .map_err(|e| e.to_string())?;
            ms.push(point.subsample_size);
            totals.push(point.total_time());
        }
        totals.sort_by(f64::total_cmp);
        medians.push(totals[batches / 2]);
    }
    ms.dedup();
    let pf: Vec<f64> = ps.iter().map(|&p| p as f64).collect();
    let slope = loglog_slope(&pf, &medians);
    let predicted = 1.0 + gamma.ln() / target.ln();
    let secs = start.elapsed().as_secs_f64();
    ensure(
        (slope - predicted).abs() <= 0.15 && secs < 600.0,
        format!("slope {slope:.3} vs {predicted:.3}, M = {ms:?}, {secs:.1} s"),
    )
}

fn minimal_vs_dense() -> Outcome {
    let gammas = [0.6, 0.7, 0.8, 0.9, 0.95];
    let curves = discovery_curves(&[100, 1000, 10_000], &gammas, 1000).map_err(|e| e.to_string())?;
    if let Some(bad) = curves.iter().find(|c| c.minimal <= c.gaussian) {
        return Err(format!("analytic curves: {bad:?}"));
    }
    let trials = 20_000;
    let mut worst: f64 = 0.0;
    for (t, &gamma) in gammas.iter().enumerate() {
        let e = discovery_trials(1000, 1000, gamma, trials, 40 + t as u64).map_err(|e| e.to_string())?;
        for (rate, q) in [(e.minimal_rate(), e.minimal_expected), (e.gaussian_rate(), e.gaussian_expected)] {
            let sd = (q * (1.0 - q) / trials as f64).sqrt();
            worst = worst.max((rate - q).abs() / sd);
        }
        if e.minimal_rate() <= e.gaussian_rate() {
            return Err(format!("empirical order reversed at γ = {gamma}: {e:?}"));
        }
    }
    // two-sided 99.9% normal interval
    ensure(
        worst <= 3.29,
        format!("{} analytic points ordered; empirical rates at p = 1000 within {worst:.2} sd", curves.len()),
    )
}

fn continuous_transforms() -> Outcome {
    let mut rng = seeded(5);
    let (x, y) = continuous_uniform(10_000, 2, (0, 1), &mut rng).map_err(|e| e.to_string())?;
    let expected = transformed_strength(&x, &y, xyz_core::Transform::Unbiased, 0, 1).map_err(|e| e.to_string())?;
    let xt = unbiased_transform_sample(&x, &mut rng).map_err(|e| e.to_string())?;
    let sampled = weighted_interaction_strength(&xt, &y, 0, 1).map_err(|e| e.to_string())?;
    let a = 13.0 / 18.0;

    let (xb, yb) = binary_with_noise(100_000, 2, (0, 1), 1.0, &mut rng).map_err(|e| e.to_string())?;
    let z = build_z(&xb, &SignVector::sign_of(&yb)).map_err(|e| e.to_string())?;
    let measured = interaction_strength(&xb, &z, 0, 1).map_err(|e| e.to_string())?;
    let normal = Normal::new(0.0, 1.0).map_err(|e| e.to_string())?;
    let identity = 0.5 * (1.0 + (normal.cdf(1.0) - normal.cdf(-1.0)));
    ensure(
        (expected - a).abs() <= 0.02
            && (sampled - a).abs() <= 0.02
            && (measured - 0.84).abs() <= 0.01
            && (measured - identity).abs() <= 0.01,
        format!(
            "uniform: {expected:.4} expected, {sampled:.4} sampled vs {a:.4}; noisy binary: {measured:.4} vs 0.84 (identity {identity:.4})"
        ),
    )
}

fn max_coef_diff(a: &xyz_core::lasso::SparseFit, b: &xyz_core::lasso::SparseFit, p: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..p {
        worst = worst.max((a.main_coef(j) - b.main_coef(j)).abs());
        for k in j..p {
            worst = worst.max((a.pair_coef(j, k) - b.pair_coef(j, k)).abs());
        }
    }
    worst
}

fn lasso_equivalence() -> Outcome {
    let (n, p, instances) = (300, 100, 20);
    let train: Vec<usize> = (0..n * 4 / 5).collect();
    let test: Vec<usize> = (n * 4 / 5..n).collect();
    let (mut points, mut certified, mut worst) = (0, 0, 0.0f64);
    let (mut err_xyz, mut err_two) = (0.0, 0.0);
    for seed in 0..instances {
        let d = regression(&RegressionSpec::new(n, p, RegressionSetting::AntiHierarchical), &mut seeded(seed))
            .map_err(|e| e.to_string())?;
        let xt = d.x.select_rows(&train).map_err(|e| e.to_string())?;
        let yt = d.y.select(&train);
        let xs = d.x.select_rows(&test).map_err(|e| e.to_string())?;
        let ys = d.y.select(&test);
        let cfg = LassoPathConfig {
            grid: LambdaGrid::Auto { count: 20, ratio: 0.05 },
            certify: true,
            seed,
            ..Default::default()
        };
        let path = lasso_path(&xt, &yt, &cfg).map_err(|e| e.to_string())?;
        let lambdas: Vec<f64> = path.fits.iter().map(|f| f.lambda).collect();
        let reference = explicit_lasso_path(&xt, &yt, &lambdas, 1.0, 1e-10).map_err(|e| e.to_string())?;
        for (a, b) in path.fits.iter().zip(&reference.fits) {
            points += 1;
            if a.certified == Some(true) {
                certified += 1;
                worst = worst.max(max_coef_diff(a, b, p));
            }
        }
        let two = two_stage_lasso(&xt, &yt, &lambdas, 1e-10).map_err(|e| e.to_string())?;
        let best = |path: &xyz_core::lasso::LassoPath| -> Result<f64, String> {
            let mut best = f64::INFINITY;
            for fit in &path.fits {
                let pred = path.predict(fit, &xs).map_err(|e| e.to_string())?;
                best = best.min(normalized_prediction_error(ys.as_slice(), &pred));
            }
            Ok(best)
        };
        err_xyz += best(&path)? / instances as f64;
        err_two += best(&two)? / instances as f64;
    }
    let share = certified as f64 / points as f64;
    ensure(
        worst <= 1e-4 && share >= 0.9 && err_two > err_xyz,
        format!(
            "{certified}/{points} points certified, max coefficient gap {worst:.1e}; test error {err_xyz:.3} vs two-stage {err_two:.3}"
        ),
    )
}

fn strength_distributions(rng: &mut impl Rng, len: usize) -> Vec<Vec<f64>> {
    let beta = |a: f64, b: f64| Beta::new(a, b).expect("valid shape");
    let mut out = Vec::new();
    for (a, b) in [(50.0, 50.0), (20.0, 20.0), (5.0, 5.0), (2.0, 2.0), (8.0, 4.0), (4.0, 8.0)] {
        let d = beta(a, b);
        out.push((0..len).map(|_| d.sample(rng)).collect());
    }
    out.push((0..len).map(|_| rng.random_range(0.3..0.7)).collect());
    out.push((0..len).map(|_| rng.random::<f64>()).collect());
    let bulk = beta(30.0, 30.0);
    out.push(
        (0..len)
            .map(|i| if i % 100 == 0 { 0.85 } else { bulk.sample(rng) })
            .collect(),
    );
    out.push(vec![0.5; len]);
    out
}

fn pareto_optimality() -> Outcome {
    let (n, p) = (1000, 5000);
    let mut rng = stream_rng(9, 0);
    let dists = strength_distributions(&mut rng, 20_000);
    let mut checks = 0;
    for (d, strengths) in dists.into_iter().enumerate() {
        let sample = StrengthSample::new(strengths).map_err(|e| e.to_string())?;
        for gamma in [0.7, 0.8, 0.9] {
            let best = optimal_subsample_size(gamma, &sample, n, p, 1..=50).map_err(|e| e.to_string())?;
            let m_star = best.subsample_size;
            let l = repetitions_for_target(m_star, gamma, 0.99).map_err(|e| e.to_string())?;
            let eta = discovery_probability(gamma, m_star, l);
            let cost = expected_complexity(m_star, l, &sample, n, p).map_err(|e| e.to_string())?;
            for m in 1..=50 {
                let lm = repetitions_for_target(m, gamma, eta).map_err(|e| e.to_string())?;
                if discovery_probability(gamma, m, lm) < eta {
                    return Err(format!("distribution {d}: L' = {lm} does not match η at M' = {m}"));
                }
                let c = expected_complexity(m, lm, &sample, n, p).map_err(|e| e.to_string())?;
                if c < cost {
                    return Err(format!(
                        "distribution {d}, γ = {gamma}: C({m}, {lm}) = {c:.6e} < C({m_star}, {l}) = {cost:.6e}"
                    ));
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} comparisons over 10 distributions, none cheaper than the optimum"))
}

fn keys(values: &[u64]) -> Vec<ProjectionKey> {
    values
        .iter()
        .enumerate()
        .map(|(column, &key)| ProjectionKey { column, key })
        .collect()
}

fn equal_pairs_exactness() -> Outcome {
    // columns numbered from 1 in the figure
    let x = keys(&[100, 101, 7, 102, 3, 103, 9, 104, 9]);
    let z = keys(&[9, 3, 105, 7, 9, 7, 106, 107, 108]);
    let got = equal_pairs(&x, &z);
    let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = got
        .blocks()
        .iter()
        .map(|b| {
            let mut xs: Vec<usize> = b.x_indices.iter().map(|j| j + 1).collect();
            let mut zs: Vec<usize> = b.z_indices.iter().map(|k| k + 1).collect();
            xs.sort_unstable();
            zs.sort_unstable();
            (xs, zs)
        })
        .collect();
    blocks.sort();
    let expected = vec![(vec![3], vec![4, 6]), (vec![5], vec![2]), (vec![7, 9], vec![1, 5])];
    if blocks != expected {
        return Err(format!("fixture returned {blocks:?}"));
    }

    let mut rng = seeded(8);
    for t in 0..1000 {
        let p = rng.random_range(1..=64);
        let alphabet = rng.random_range(1..=2 * p as u64);
        let xv: Vec<u64> = (0..p).map(|_| rng.random_range(0..alphabet)).collect();
        let zv: Vec<u64> = (0..p).map(|_| rng.random_range(0..alphabet)).collect();
        let e = equal_pairs(&keys(&xv), &keys(&zv));
        let listed: Vec<(usize, usize)> = e.iter().collect();
        let set: BTreeSet<(usize, usize)> = listed.iter().copied().collect();
        let mut truth = BTreeSet::new();
        for j in 0..p {
            for k in 0..p {
                if xv[j] == zv[k] {
                    truth.insert((j, k));
                }
            }
        }
        if set != truth || listed.len() != set.len() || e.total_pairs() != truth.len() {
            return Err(format!("instance {t} (p = {p}) differs from the double loop"));
        }
    }
    Ok("figure fixture exact; 1000 random instances match the double loop".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle soundness and completeness", oracle_soundness),
        ("discovery probability law", eta_law),
        ("scaling exponent", scaling_exponent),
        ("minimal subsampling vs dense projection", minimal_vs_dense),
        ("continuous transforms", continuous_transforms),
        ("lasso path equivalence", lasso_equivalence),
        ("Pareto optimality of the chosen M", pareto_optimality),
        ("equal-pairs exactness", equal_pairs_exactness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {} {name}: {msg} [{secs:.1} s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg} [{secs:.1} s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

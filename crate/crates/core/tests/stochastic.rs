//! Monte Carlo samplers and estimators against closed-form oracles.

use std::f64::consts::PI;

use fractal_diffusion::analytic::{moment_2beta, StretchedGaussian};
use fractal_diffusion::stochastic::*;
use fractal_diffusion::FractalIndices;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::gamma::gamma;

fn line(a: f64, b: f64, d: f64) -> StretchedGaussian {
    StretchedGaussian::line(FractalIndices::new(a, b).unwrap(), d).unwrap()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    sorted[((sorted.len() - 1) as f64 * q).round() as usize]
}

#[test]
fn identity_fabric_samples_are_gaussian() {
    let g = line(1.0, 1.0, 0.5);
    let t = 2.0;
    let n = 100_000;
    let xs = sorted(sample_stretched_gaussian(&g, t, n, 11).unwrap());
    let normal = Normal::new(0.0, (2.0 * 0.5 * t).sqrt()).unwrap();
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = normal.cdf(x);
            (c - i as f64 / n as f64)
                .abs()
                .max(((i + 1) as f64 / n as f64 - c).abs())
        })
        .fold(0.0, f64::max);
    // Kolmogorov critical value at the 1% level
    assert!(ks < 1.628 / (n as f64).sqrt(), "KS statistic {ks}");
}

#[test]
fn histograms_match_the_analytic_density() {
    let fabrics = [0.5, 2.0 / 3.0, 1.0];
    let n = 1_000_000;
    let bins = 64;
    let critical = ChiSquared::new((bins - 1) as f64).unwrap();
    for (s, &a) in fabrics.iter().enumerate() {
        for (r, &b) in fabrics.iter().enumerate() {
            let g = line(a, b, 1.0);
            let t = 1.5;
            let xs = sample_stretched_gaussian(&g, t, n, (10 * s + r) as u64).unwrap();
            // bin edges on a symmetric range holding all but 1e-4 of the mass
            let reach = {
                let mut x = 1.0;
                while 1.0 - g.cdf_line(x, t).unwrap() > 5e-5 {
                    x *= 1.5;
                }
                x
            };
            let edges: Vec<f64> = (0..=bins)
                .map(|i| -reach + 2.0 * reach * i as f64 / bins as f64)
                .collect();
            let mut counts = vec![0usize; bins + 2];
            for &x in &xs {
                let k = edges.partition_point(|&e| e <= x);
                counts[k.min(bins + 1)] += 1;
            }
            let mut chi2 = 0.0;
            for k in 1..=bins {
                let expected = n as f64 * g.cell_mass(edges[k - 1], edges[k], t).unwrap();
                chi2 += (counts[k] as f64 - expected).powi(2) / expected;
            }
            let p = 1.0 - critical.cdf(chi2);
            assert!(p > 0.01, "α={a} β={b}: χ² = {chi2}, p = {p}");
        }
    }
}

#[test]
fn transformed_moment_of_samples() {
    let g = line(0.8, 0.6, 1.0);
    let xs = sample_stretched_gaussian(&g, 2.0, 1_000_000, 3).unwrap();
    let vals: Vec<f64> = xs.iter().map(|x| x.abs().powf(1.2)).collect();
    let (mean, se) = mean_and_stderr(&vals);
    let expected = 2.0 * 2f64.powf(0.8);
    assert!((mean / expected - 1.0).abs() < 0.01);
    assert!((mean - expected).abs() < 3.0 * se);
}

#[test]
fn brownian_ensemble_spreads_linearly() {
    let times = log_schedule(0.1, 10.0, 12).unwrap();
    let stats = walk_ensemble(FractalIndices::classical(), 0.7, &times, 100_000, 5).unwrap();
    for (j, &t) in times.iter().enumerate() {
        assert!((stats.msd[j] - 1.4 * t).abs() < 3.0 * stats.msd_stderr[j]);
    }
}

#[test]
fn msd_exponents_are_recovered() {
    let times = log_schedule(0.1, 10.0, 16).unwrap();
    for (a, b) in [(1.0, 1.0), (1.0, 2.0 / 3.0), (0.5, 1.0), (0.8, 0.75)] {
        let i = FractalIndices::new(a, b).unwrap();
        let stats = walk_ensemble(i, 1.0, &times, 100_000, 2024).unwrap();
        let fit = estimate_msd_exponent(&stats).unwrap();
        let eta = a / b;
        assert!((fit.eta_hat - eta).abs() <= 0.05, "α={a} β={b}: {fit:?}");
        assert!((fit.eta_hat - eta).abs() <= 3.0 * fit.stderr, "α={a} β={b}: {fit:?}");
        assert!(fit.stderr > 0.0 && fit.points == 16);
        let g = StretchedGaussian::line(i, 1.0).unwrap();
        for (j, &t) in times.iter().enumerate() {
            let expected = moment_2beta(&g, t).unwrap();
            assert!((stats.moment_2beta[j] - expected).abs() < 3.0 * stats.moment_2beta_stderr[j]);
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let times = log_schedule(0.5, 50.0, 9).unwrap();
            let stats = walk_ensemble(FractalIndices::new(0.9, 0.7).unwrap(), 1.0, &times, 20_000, 8).unwrap();
            let levy = sample_levy(1.3, 50_000, 8).unwrap();
            (stats, levy)
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn cauchy_quartiles() {
    let xs = sorted(sample_levy(1.0, 1_000_000, 17).unwrap());
    let median = quantile(&xs, 0.5);
    let iqr = quantile(&xs, 0.75) - quantile(&xs, 0.25);
    assert!(median.abs() < 0.01);
    assert!((iqr / 2.0 - 1.0).abs() < 0.02, "IQR {iqr}");
}

#[test]
fn stable_characteristic_function() {
    for a in [0.7, 1.5] {
        let xs = sample_levy(a, 1_000_000, 23).unwrap();
        for i in 0..=30 {
            let k = i as f64 * 0.1;
            let cf: Vec<f64> = xs.iter().map(|x| (k * x).cos()).collect();
            let (mean, se) = mean_and_stderr(&cf);
            let expected = (-k.powf(a)).exp();
            assert!(
                (mean - expected).abs() < 4.0 * se.max(1e-4),
                "a={a} k={k}: {mean} vs {expected}"
            );
        }
    }
}

#[test]
fn near_gaussian_stability_index() {
    // exp(-k²) is the characteristic function of N(0, 2)
    let xs = sorted(sample_levy(1.99, 1_000_000, 4).unwrap());
    let normal = Normal::new(0.0, 2f64.sqrt()).unwrap();
    for q in [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95] {
        let z = normal.inverse_cdf(q);
        assert!((quantile(&xs, q) - z).abs() < 0.02 * z.abs().max(0.1), "q={q}");
    }
    let (_, se) = mean_and_stderr(&xs);
    assert!(se.is_finite());
}

#[test]
fn first_absolute_moment_of_stable_law() {
    let a = 1.5;
    let xs = sample_levy(a, 1_000_000, 31).unwrap();
    let abs: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
    let mean = pairwise_sum(&abs) / abs.len() as f64;
    let expected = 2.0 * gamma(1.0 - 1.0 / a) / PI;
    assert!((mean / expected - 1.0).abs() < 0.02, "{mean} vs {expected}");
}

#[test]
fn moment_growth_verdicts() {
    let sizes = half_decade_sizes(3, 6);
    let second = diverging_moment_demo(1.5, 2.0, &sizes, 20, 1).unwrap();
    assert_eq!(second.verdict, MomentVerdict::Diverging, "{second:?}");
    assert!(second.trend_lower > 0.0);
    let first = diverging_moment_demo(1.5, 1.0, &sizes, 20, 1).unwrap();
    assert_eq!(first.verdict, MomentVerdict::Converging);
    assert!(first.last_change <= 0.05);
    assert!(diverging_moment_demo(2.0, 1.0, &sizes, 20, 1).is_err());
}

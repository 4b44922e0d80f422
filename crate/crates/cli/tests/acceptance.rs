//! Acceptance criteria 1 to 10. Each criterion prints one line
//! `criterion N [PASS|FAIL] name: detail (secs)`; run with `--nocapture`.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use fractal_diffusion::analytic::{
    mittag_leffler, moment_2beta, relaxation_mittag_leffler, RichardsonKernel, StretchedGaussian,
};
use fractal_diffusion::quadrature::integrate_to_infinity_with_breaks;
use fractal_diffusion::quantum::{dispersion_table, plane_wave_residual, PlaneWaveGrid, QuantumFabric};
use fractal_diffusion::solver::{
    convergence_study, green_grid, greens_function_check, richardson_check, richardson_vs_present, SolverOptions,
};
use fractal_diffusion::stochastic::{
    diverging_moment_demo, estimate_msd_exponent, half_decade_sizes, log_schedule, walk_ensemble, MomentVerdict,
};
use fractal_diffusion::FractalIndices;

const GRID: [f64; 5] = [0.25, 0.5, 2.0 / 3.0, 0.75, 1.0];

fn idx(a: f64, b: f64) -> FractalIndices {
    FractalIndices::new(a, b).unwrap()
}

/// Prints the criterion line, then fails the test if the check or the
/// runtime budget failed.
fn report(n: u32, name: &str, passed: bool, detail: String, started: Instant, budget: f64) {
    let secs = started.elapsed().as_secs_f64();
    let ok = passed && secs < budget;
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n} [{tag}] {name}: {detail} ({secs:.2} s, budget {budget} s)");
    assert!(ok, "criterion {n} failed: {detail} in {secs:.2} s");
}

/// `2∫_0^∞ f(x) P(x,t) dx` by adaptive quadrature with a break at the width.
fn even_integral(g: &StretchedGaussian, t: f64, f: impl Fn(f64) -> f64) -> f64 {
    let i = g.indices();
    let width = (4.0 * g.diffusivity() * t.powf(i.alpha())).sqrt().powf(1.0 / i.beta());
    integrate_to_infinity_with_breaks(
        |x| {
            if x == 0.0 {
                0.0
            } else {
                2.0 * f(x) * g.pdf_line(x, t).unwrap()
            }
        },
        0.0,
        &[width],
        1e-13,
        1e-12,
    )
    .unwrap()
    .value
}

#[test]
fn criterion_01_normalization() {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for a in GRID {
        for b in GRID {
            let g = StretchedGaussian::line(idx(a, b), 1.0).unwrap();
            worst = worst.max((even_integral(&g, 1.0, |_| 1.0) - 1.0).abs());
        }
    }
    report(
        1,
        "normalization",
        worst <= 1e-8,
        format!("worst |mass-1| = {worst:.2e} over 25 fabrics"),
        started,
        10.0,
    );
}

#[test]
fn criterion_02_moment_identity() {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for a in GRID {
        for b in GRID {
            let g = StretchedGaussian::line(idx(a, b), 1.0).unwrap();
            let t = 1.7;
            let q = even_integral(&g, t, |x| x.powf(2.0 * b));
            worst = worst.max((q / moment_2beta(&g, t).unwrap() - 1.0).abs());
        }
    }
    report(
        2,
        "moment identity",
        worst <= 1e-6,
        format!("worst relative error = {worst:.2e}"),
        started,
        10.0,
    );
}

#[test]
fn criterion_03_green_function() {
    let started = Instant::now();
    let opts = SolverOptions::default();
    let mut passed = true;
    let mut detail = Vec::new();
    for (a, b) in [(1.0, 2.0 / 3.0), (0.5, 1.0)] {
        let i = idx(a, b);
        let check = greens_function_check(i, 1.0, 1.0, &green_grid(i, 1.0, 1.0, 4096).unwrap(), &opts).unwrap();
        let study = convergence_study(i, 1.0, 1.0, &[512, 1024, 2048, 4096], &opts).unwrap();
        passed &= check.l2_rel_error <= 5e-3 && check.min_value >= 0.0 && study.min_order() >= 1.8;
        detail.push(format!(
            "(α={a:.3}, β={b:.3}) L2 {:.2e} order {:.2}",
            check.l2_rel_error,
            study.min_order()
        ));
    }
    report(3, "green function", passed, detail.join("; "), started, 60.0);
}

#[test]
fn criterion_04_msd_scaling() {
    let schedule = log_schedule(0.1, 10.0, 16).unwrap();
    for (a, b) in [(1.0, 1.0), (1.0, 2.0 / 3.0), (0.5, 1.0)] {
        let started = Instant::now();
        let stats = walk_ensemble(idx(a, b), 1.0, &schedule, 100_000, 42).unwrap();
        let fit = estimate_msd_exponent(&stats).unwrap();
        let expected = a / b;
        let err = (fit.eta_hat - expected).abs();
        report(
            4,
            "msd scaling",
            err <= 0.05,
            format!(
                "(α={a:.3}, β={b:.3}) η̂ = {:.4} ± {:.4}, expected {expected:.4}",
                fit.eta_hat, fit.stderr
            ),
            started,
            30.0,
        );
    }
}

#[test]
fn criterion_05_diverging_moments() {
    let started = Instant::now();
    let sizes = half_decade_sizes(3, 6);
    let second = diverging_moment_demo(1.5, 2.0, &sizes, 20, 42).unwrap();
    let first = diverging_moment_demo(1.5, 1.0, &sizes, 20, 42).unwrap();
    let passed = second.verdict == MomentVerdict::Diverging && second.trend_lower > 0.0 && first.last_change <= 0.05;
    report(
        5,
        "diverging moments",
        passed,
        format!(
            "order 2 {:?} (trend lower bound {:.2}); order 1 last change {:.3}",
            second.verdict, second.trend_lower, first.last_change
        ),
        started,
        60.0,
    );
}

#[test]
fn criterion_06_fourier_relaxation() {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for (a, b) in [(1.0, 2.0 / 3.0), (0.5, 1.0), (0.75, 0.5), (1.0, 1.0)] {
        let g = StretchedGaussian::line(idx(a, b), 1.0).unwrap();
        for j in 0..=50 {
            let k = 0.1 * j as f64;
            let t: f64 = 0.8;
            let exact = (-k.powf(2.0 * b) * t.powf(a)).exp();
            worst = worst.max((g.fourier_hatted(k, t).unwrap() - exact).abs());
        }
    }
    let g = StretchedGaussian::line(FractalIndices::classical(), 1.0).unwrap();
    let times: Vec<f64> = (1..=40).map(|i| 0.05 * i as f64).collect();
    let mut debye: f64 = 0.0;
    for k in [0.5, 1.0, 2.0] {
        let ml = relaxation_mittag_leffler(&g, k, &times).unwrap();
        for (t, v) in times.iter().zip(&ml.values) {
            debye = debye.max((g.fourier_hatted(k, *t).unwrap() - v).abs());
        }
    }
    report(
        6,
        "fourier relaxation",
        worst <= 1e-6 && debye <= 1e-10,
        format!("transform error {worst:.2e}; Debye limit error {debye:.2e}"),
        started,
        5.0,
    );
}

#[test]
fn criterion_07_mittag_leffler_tail() {
    let started = Instant::now();
    let t: f64 = 1e4;
    let value = mittag_leffler(0.5, t.sqrt()).unwrap() * std::f64::consts::PI.sqrt() * t.sqrt();
    report(
        7,
        "mittag-leffler tail",
        (0.98..=1.02).contains(&value),
        format!("E·Γ(1-α)·t^α = {value:.5}"),
        started,
        1.0,
    );
}

#[test]
fn criterion_08_richardson() {
    let started = Instant::now();
    let opts = SolverOptions::default();
    let kernel = RichardsonKernel::new(1.0, 2.0 / 3.0, 3).unwrap();
    let profile = richardson_check(&kernel, 0.01, 1.0, 1024, &opts).unwrap();
    let cmp = richardson_vs_present(2.0 / 3.0, 1.0, 0.2, 1.0, 1024, &opts).unwrap();
    report(
        8,
        "richardson comparison",
        profile.l2_rel_error <= 1e-2 && cmp.ratio > 10.0,
        format!(
            "profile L2 {:.2e}; model difference {:.2e} is {:.0}x the discretization error",
            profile.l2_rel_error, cmp.difference, cmp.ratio
        ),
        started,
        60.0,
    );
}

#[test]
fn criterion_09_quantum() {
    let started = Instant::now();
    let mut closure: f64 = 0.0;
    for (a, b) in [(1.0, 1.0), (0.5, 2.0 / 3.0), (0.75, 0.5), (0.3, 0.9)] {
        let qf = QuantumFabric::new(idx(a, b), 1.3, 0.7, 0.9).unwrap();
        for row in dispersion_table(&qf, 100.0, 1001).unwrap() {
            let kinetic = row.momentum * row.momentum / (2.0 * qf.mass());
            closure = closure.max((row.energy - kinetic).abs() / kinetic.max(1.0));
        }
    }
    let qf = QuantumFabric::new(idx(0.5, 2.0 / 3.0), 1.0, 1.0, 1.0).unwrap();
    let residual = plane_wave_residual(&qf, 2.0, &PlaneWaveGrid::default())
        .unwrap()
        .residual;
    let control = plane_wave_residual(
        &qf,
        2.0,
        &PlaneWaveGrid {
            nu_scale: 1.1,
            ..PlaneWaveGrid::default()
        },
    )
    .unwrap()
    .residual;
    report(
        9,
        "quantum consistency",
        closure <= 1e-12 && residual <= 1e-6 && control >= 1e-2,
        format!("closure {closure:.2e}; residual {residual:.2e}; control {control:.2e}"),
        started,
        5.0,
    );
}

fn run(dir: &Path, args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_fracdiff"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .unwrap();
    out.status.code().unwrap_or(-1)
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn criterion_10_determinism() {
    let started = Instant::now();
    let commands: [&[&str]; 11] = [
        &["pdf", "--alpha", "0.5", "--beta", "0.6667", "--format", "json"],
        &["pdf", "--alpha", "1", "--beta", "0.75", "--d", "3"],
        &["solve", "--alpha", "1", "--beta", "0.6667", "--check-green"],
        &["solve", "--model", "richardson", "--beta", "0.6667"],
        &["solve", "--model", "richardson", "--beta", "0.6667", "--d", "3"],
        &["walk", "--alpha", "1", "--beta", "0.6667", "--fit-eta", "--snapshot"],
        &["walk", "--levy", "1.5"],
        &["walk", "--levy", "1.5", "--demo-divergence", "--max-decade", "5"],
        &[
            "quantum",
            "--alpha",
            "0.5",
            "--beta",
            "0.6667",
            "--verify-plane-wave",
            "--svg",
        ],
        &["sweep", "--quantity", "moment"],
        &[
            "sweep",
            "--quantity",
            "eta",
            "--alphas",
            "1",
            "--betas",
            "1,0.6667",
            "--walkers",
            "20000",
        ],
    ];
    let root = tempfile::tempdir().unwrap();
    let mut failures = Vec::new();
    let mut compared = 0;
    for (i, args) in commands.iter().enumerate() {
        let (a, b, c) = (
            root.path().join(format!("{i}a")),
            root.path().join(format!("{i}b")),
            root.path().join(format!("{i}c")),
        );
        let codes = [run(&a, args), run(&b, args)];
        let config = a.join("config.json");
        let rerun = run(&c, &[args[0], "--config", config.to_str().unwrap()]);
        let (fa, fb, fc) = (files(&a), files(&b), files(&c));
        compared += fa.len();
        if codes != [0, 0] || rerun != 0 || fa.is_empty() || fa != fb || fa != fc {
            failures.push(args.join(" "));
        }
    }
    report(
        10,
        "determinism",
        failures.is_empty(),
        format!(
            "{} runs, {compared} files byte-identical; mismatches: {failures:?}",
            commands.len() * 3
        ),
        started,
        300.0,
    );
}

//! Solver checks against analytic kernels and against each other.

use fractal_diffusion::analytic::{gaussian_hat, RichardsonKernel};
use fractal_diffusion::solver::*;
use fractal_diffusion::{FractalIndices, SampledField};

fn idx(a: f64, b: f64) -> FractalIndices {
    FractalIndices::new(a, b).unwrap()
}

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

#[test]
fn hatted_pulse_relaxes_to_heat_kernel() {
    let nodes = uniform(-12.0, 12.0, 2048);
    let t0 = 0.01;
    let init = SampledField::from_fn(nodes.clone(), |x| gaussian_hat(1.0, x, t0)).unwrap();
    let out = solve_hat_diffusion(&init, 1.0, 1.0, &SolverOptions::default()).unwrap();
    let exact: Vec<f64> = nodes.iter().map(|&x| gaussian_hat(1.0, x, 1.0 + t0)).collect();
    assert!(rel_l2(out.values(), &exact) <= 1e-3);
}

#[test]
fn shifted_pulse_gives_shifted_solution() {
    let nodes = uniform(-10.0, 10.0, 401);
    let h = nodes[1] - nodes[0];
    let shift = 40;
    let a = SampledField::from_fn(nodes.clone(), |x| gaussian_hat(1.0, x + 2.0, 0.05)).unwrap();
    let b = SampledField::from_fn(nodes.clone(), |x| gaussian_hat(1.0, x + 2.0 - shift as f64 * h, 0.05)).unwrap();
    let opts = SolverOptions::default();
    let ua = solve_hat_diffusion(&a, 1.0, 0.5, &opts).unwrap();
    let ub = solve_hat_diffusion(&b, 1.0, 0.5, &opts).unwrap();
    for i in 60..340 {
        assert!((ua.values()[i] - ub.values()[i + shift]).abs() < 1e-10);
    }
}

#[test]
fn identity_fabric_transport_equals_heat_equation() {
    let grid = Grid1D::symmetric(8.0, 256, Spacing::Physical).unwrap();
    let nodes = grid.physical_mesh().nodes;
    let init = SampledField::from_fn(nodes, |x| gaussian_hat(1.0, x, 0.1)).unwrap();
    let opts = SolverOptions::default();
    let hat = solve_hat_diffusion(&init, 1.0, 1.0, &opts).unwrap();
    let phys = solve_physical_transport(&init, FractalIndices::classical(), 1.0, 0.0, 1.0, &grid, &opts).unwrap();
    assert_eq!(hat, phys);
    let rich = solve_richardson(&init, 1.0, 1.0, 1, 0.0, 1.0, &grid, &opts).unwrap();
    assert_eq!(rich, phys);
}

#[test]
fn no_flux_transport_conserves_mass_and_sign() {
    let grid = Grid1D::symmetric(3.0, 512, Spacing::Hatted { beta: 2.0 / 3.0 }).unwrap();
    let mesh = grid.physical_mesh();
    let init = SampledField::from_fn(mesh.nodes.clone(), |x| (-(x - 0.5) * (x - 0.5) * 8.0).exp()).unwrap();
    let opts = SolverOptions {
        boundary: Boundary::NoFlux,
        ..SolverOptions::default()
    };
    let out = solve_physical_transport(&init, idx(0.8, 2.0 / 3.0), 1.0, 0.0, 2.0, &grid, &opts).unwrap();
    let widths = mesh.widths();
    let mass = |v: &[f64]| v.iter().zip(&widths).map(|(a, w)| a * w).sum::<f64>();
    let (m0, m1) = (mass(init.values()), mass(out.values()));
    assert!((m1 - m0).abs() / m0 <= 1e-8 * 2.0);
    assert!(out.values().iter().all(|&v| v >= 0.0));
}

#[test]
fn explicit_scheme_cross_checks_implicit() {
    let nodes = uniform(-6.0, 6.0, 241);
    let init = SampledField::from_fn(nodes.clone(), |x| gaussian_hat(1.0, x, 0.2)).unwrap();
    let implicit = solve_hat_diffusion(
        &init,
        1.0,
        0.5,
        &SolverOptions {
            diffusion_number: 0.05,
            ..SolverOptions::default()
        },
    )
    .unwrap();
    let explicit = solve_hat_diffusion(
        &init,
        1.0,
        0.5,
        &SolverOptions {
            scheme: Scheme::Explicit,
            diffusion_number: 0.05,
            ..SolverOptions::default()
        },
    )
    .unwrap();
    assert!(rel_l2(explicit.values(), implicit.values()) < 1e-3);
}

#[test]
fn green_function_checks() {
    let opts = SolverOptions::default();
    let classical = greens_function_check(
        FractalIndices::classical(),
        1.0,
        1.0,
        &green_grid(FractalIndices::classical(), 1.0, 1.0, 2048).unwrap(),
        &opts,
    )
    .unwrap();
    assert!(classical.l2_rel_error <= 1e-3);
    for (a, b) in [(1.0, 2.0 / 3.0), (0.5, 1.0), (0.6, 0.5)] {
        let i = idx(a, b);
        let report = greens_function_check(i, 1.0, 1.0, &green_grid(i, 1.0, 1.0, 4096).unwrap(), &opts).unwrap();
        assert!(report.l2_rel_error <= 5e-3, "α={a} β={b}: {report:?}");
        assert!(report.min_value >= 0.0);
        assert!(report.mass_drift < 1e-10);
        assert_eq!(report.schema_version, "1");
    }
}

#[test]
fn green_function_converges_at_second_order() {
    let study = convergence_study(
        idx(1.0, 2.0 / 3.0),
        1.0,
        1.0,
        &[512, 1024, 2048, 4096],
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(study.monotone(), "{study:?}");
    assert!(study.min_order() >= 1.8, "{study:?}");
}

#[test]
fn physical_and_hatted_solvers_agree() {
    let values = [0.5, 2.0 / 3.0, 0.75, 1.0];
    for a in values {
        for b in values {
            let report = coordinate_equivalence(idx(a, b), 1.0, 1.0, 4096, &SolverOptions::default()).unwrap();
            assert!(report.l2_rel_error <= 5e-3, "α={a} β={b}: {report:?}");
            assert!(report.mass_drift <= 1e-8);
            assert!(report.min_value >= 0.0);
        }
    }
}

#[test]
fn origin_node_is_rejected_for_singular_fabrics() {
    let err = coordinate_equivalence(idx(1.0, 0.75), 1.0, 1.0, 257, &SolverOptions::default()).unwrap_err();
    assert!(matches!(err, fractal_diffusion::Error::Refinement(_)));
}

#[test]
fn green_function_is_self_similar() {
    for (a, b) in [(1.0, 2.0 / 3.0), (0.5, 1.0), (0.75, 0.5)] {
        let err = self_similarity(idx(a, b), 1.0, 0.5, 2048, &SolverOptions::default()).unwrap();
        assert!(err <= 1e-2, "α={a} β={b}: {err}");
    }
}

#[test]
fn richardson_profile_matches_kernel() {
    let kernel = RichardsonKernel::new(1.0, 2.0 / 3.0, 3).unwrap();
    let report = richardson_check(&kernel, 0.01, 1.0, 1024, &SolverOptions::default()).unwrap();
    assert!(report.l2_rel_error <= 1e-2, "{}", report.l2_rel_error);
    assert!((report.amplitude - 1.0).abs() < 1e-2);
    let classical = RichardsonKernel::new(0.5, 1.0, 2).unwrap();
    let report = richardson_check(&classical, 0.01, 1.0, 1024, &SolverOptions::default()).unwrap();
    assert!(report.l2_rel_error <= 1e-2);
}

#[test]
fn richardson_and_present_models_differ() {
    let cmp = richardson_vs_present(2.0 / 3.0, 1.0, 0.2, 1.0, 1024, &SolverOptions::default()).unwrap();
    assert!(cmp.ratio > 10.0, "{cmp:?}");
    let same = richardson_vs_present(1.0, 1.0, 0.2, 1.0, 256, &SolverOptions::default()).unwrap();
    assert_eq!(same.difference, 0.0);
}

#[test]
fn richardson_line_green_function() {
    let opts = SolverOptions::default();
    let t = 1.0;
    let grid = green_grid(idx(1.0, 1.0), 0.8, t, 1024).unwrap();
    let present = green_function_solution(idx(1.0, 1.0), 0.8, t, &grid, &opts).unwrap();
    let kernel = RichardsonKernel::new(0.8, 1.0, 1).unwrap();
    let line = richardson_line_solution(&kernel, t, &grid, &opts).unwrap();
    let untimed = |r: &SolveReport| SolveReport {
        wall_time: None,
        ..r.clone()
    };
    assert_eq!(untimed(&line.report), untimed(&present.report));
    assert_eq!(line.numeric, present.numeric);
    assert_eq!(line.exact, present.exact);

    for beta in [2.0 / 3.0, 0.8] {
        let kernel = RichardsonKernel::new(1.0, beta, 1).unwrap();
        let grid = green_grid(idx(1.0, beta), beta * beta, t, 2048).unwrap();
        let r = richardson_line_solution(&kernel, t, &grid, &opts).unwrap().report;
        assert!(r.l2_rel_error < 5e-3, "β={beta}: {r:?}");
        assert!(r.mass_drift < 1e-10);
    }
}

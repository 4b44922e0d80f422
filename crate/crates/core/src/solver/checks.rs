//! Verification harnesses built on the solvers: Green's-function checks,
//! convergence, coordinate equivalence, self-similarity and the Richardson
//! comparisons.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::fv::Mesh;
use super::{
    hat_operator, relative_errors, richardson_operator, transport_operator, Grid1D, SolveReport, SolverOptions,
    Spacing, SCHEMA_VERSION,
};
use crate::analytic::{RichardsonKernel, StretchedGaussian};
use crate::error::{config, Result};
use crate::fabric::{signed_pow, FractalIndices, SampledField};

/// Hatted half-width at which the kernel has decayed to `e^{-30}` of its peak.
fn hat_half_width(diffusivity: f64, t_hat: f64) -> f64 {
    (120.0 * diffusivity * t_hat).sqrt()
}

/// Hatted-uniform grid wide enough for the Green's function at time `t`.
pub fn green_grid(idx: FractalIndices, diffusivity: f64, t: f64, n: usize) -> Result<Grid1D> {
    let half = hat_half_width(diffusivity, t.powf(idx.alpha())).powf(1.0 / idx.beta());
    Grid1D::symmetric(half, n, Spacing::Hatted { beta: idx.beta() })
}

fn mean_spacing(nodes: &[f64]) -> f64 {
    (nodes[nodes.len() - 1] - nodes[0]) / (nodes.len() - 1) as f64
}

/// Initial data shared by the Green's-function harnesses: the hatted heat
/// kernel at `t̂0 = (3ĥ)²/2D` (a Gaussian three cells wide) as cell masses.
struct Pulse {
    hat: Mesh,
    phys: Mesh,
    t_hat0: f64,
    masses: Vec<f64>,
}

impl Pulse {
    fn new(idx: FractalIndices, diffusivity: f64, grid: &Grid1D) -> Result<Self> {
        let heat = StretchedGaussian::line(FractalIndices::classical(), diffusivity)?;
        Self::build(grid, idx.beta(), diffusivity, |hat, _, t0| {
            heat.cell_mass(hat[0], hat[1], t0)
        })
    }

    /// `mass(hatted cell, physical cell, t̂0)` gives the initial cell masses.
    fn build(
        grid: &Grid1D,
        beta: f64,
        hat_diffusivity: f64,
        mass: impl Fn(&[f64], &[f64], f64) -> Result<f64>,
    ) -> Result<Self> {
        let hat = grid.hatted_mesh(beta);
        let phys = grid.physical_mesh();
        let h = mean_spacing(&hat.nodes);
        let t_hat0 = (3.0 * h).powi(2) / (2.0 * hat_diffusivity);
        let masses = hat
            .faces
            .windows(2)
            .zip(phys.faces.windows(2))
            .map(|(a, b)| mass(a, b, t_hat0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            hat,
            phys,
            t_hat0,
            masses,
        })
    }

    fn hat_density(&self) -> Vec<f64> {
        self.masses.iter().zip(self.hat.widths()).map(|(m, w)| m / w).collect()
    }

    fn phys_density(&self) -> Vec<f64> {
        self.masses.iter().zip(self.phys.widths()).map(|(m, w)| m / w).collect()
    }

    /// Step count and hatted step covering `t̂0 → t̂`, at least 10 steps.
    fn plan(&self, t_hat: f64, diffusivity: f64, opts: &SolverOptions) -> Result<(usize, f64)> {
        let duration = t_hat - self.t_hat0;
        let h = mean_spacing(&self.hat.nodes);
        let (steps, _) = opts.step_plan(duration.max(0.0), diffusivity, h)?;
        if steps < 10 {
            let dt = duration / 10.0;
            if !(duration > 0.0) || dt > 0.5 * self.t_hat0 {
                return Err(config(format!(
                    "time t̂ = {t_hat} is too early for this grid; the initial pulse is already t̂0 = {}",
                    self.t_hat0
                )));
            }
            return Ok((10, dt));
        }
        Ok((steps, duration / steps as f64))
    }
}

/// Numeric and exact cell-averaged densities from a Green's-function run.
#[derive(Debug, Clone)]
pub struct GreenSolution {
    pub report: SolveReport,
    /// Numeric density at the physical nodes, mapped back from hatted space.
    pub numeric: SampledField<f64>,
    pub exact: SampledField<f64>,
    /// Numeric probability mass per cell.
    pub cell_masses: Vec<f64>,
    /// Physical cell faces.
    pub faces: Vec<f64>,
}

/// Heat equation in hatted coordinates from a narrow pulse, mapped back to
/// physical coordinates with the cell Jacobian `Δx̂/Δx` and compared with
/// the stretched Gaussian averaged over the same cells.
pub fn green_function_solution(
    idx: FractalIndices,
    diffusivity: f64,
    t: f64,
    grid: &Grid1D,
    opts: &SolverOptions,
) -> Result<GreenSolution> {
    let started = Instant::now();
    let exact_g = StretchedGaussian::line(idx, diffusivity)?;
    if !(t > 0.0) {
        return Err(crate::error::domain(format!("time must be > 0, got {t}")));
    }
    let pulse = Pulse::new(idx, diffusivity, grid)?;
    let t_hat = t.powf(idx.alpha());
    let (steps, dt) = pulse.plan(t_hat, diffusivity, opts)?;
    let op = hat_operator(&pulse.hat, diffusivity, opts.boundary)?;
    let mut u = pulse.hat_density();
    op.advance(&mut u, dt, steps, opts.scheme)?;

    let hat_w = pulse.hat.widths();
    let cell_masses: Vec<f64> = u.iter().zip(&hat_w).map(|(u, w)| u * w).collect();
    let min_value = u.iter().copied().fold(f64::INFINITY, f64::min);
    pulse.finish(grid, steps, started, cell_masses, min_value, |a, b| {
        exact_g.cell_density(a, b, t)
    })
}

impl Pulse {
    /// Physical densities from the final cell masses, compared with the
    /// exact cell averages.
    fn finish(
        self,
        grid: &Grid1D,
        steps: usize,
        started: Instant,
        cell_masses: Vec<f64>,
        min_value: f64,
        exact_density: impl Fn(f64, f64) -> Result<f64>,
    ) -> Result<GreenSolution> {
        let phys_w = self.phys.widths();
        let numeric: Vec<f64> = cell_masses.iter().zip(&phys_w).map(|(m, w)| m / w).collect();
        let exact = self
            .phys
            .faces
            .windows(2)
            .map(|w| exact_density(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        let (l2, linf) = relative_errors(&numeric, &exact, &phys_w);
        let m0: f64 = self.masses.iter().sum();
        let m1: f64 = cell_masses.iter().sum();
        let report = SolveReport {
            schema_version: SCHEMA_VERSION.to_string(),
            l2_rel_error: l2,
            linf_rel_error: linf,
            grid: *grid,
            steps,
            wall_time: Some(started.elapsed().as_secs_f64()),
            mass_drift: (m1 - m0).abs() / m0,
            min_value,
        };
        Ok(GreenSolution {
            report,
            numeric: SampledField::new(self.phys.nodes.clone(), numeric)?,
            exact: SampledField::new(self.phys.nodes, exact)?,
            cell_masses,
            faces: self.phys.faces,
        })
    }
}

/// Richardson's equation on the line (`d = 1`) from its own kernel at an
/// early time, compared with the kernel averaged over the same cells at
/// `t`. At `β = 1` and `k0 = D` this repeats [`green_function_solution`]
/// for the classical fabric.
pub fn richardson_line_solution(
    kernel: &RichardsonKernel,
    t: f64,
    grid: &Grid1D,
    opts: &SolverOptions,
) -> Result<GreenSolution> {
    let started = Instant::now();
    if kernel.dim() != 1 {
        return Err(config(format!(
            "the line solution needs d = 1, got d = {}",
            kernel.dim()
        )));
    }
    if !(t > 0.0) {
        return Err(crate::error::domain(format!("time must be > 0, got {t}")));
    }
    let beta = kernel.beta();
    let hat_diffusivity = kernel.k0() * beta * beta;
    let pulse = Pulse::build(grid, beta, hat_diffusivity, |_, phys, t0| {
        kernel.cell_mass_line(phys[0], phys[1], t0)
    })?;
    let (steps, dt) = pulse.plan(t, hat_diffusivity, opts)?;
    let op = richardson_operator(&pulse.phys, kernel.k0(), beta, 1, opts.boundary)?;
    let mut u = pulse.phys_density();
    op.advance(&mut u, dt, steps, opts.scheme)?;
    let cell_masses: Vec<f64> = u.iter().zip(pulse.phys.widths()).map(|(u, w)| u * w).collect();
    let min_value = u.iter().copied().fold(f64::INFINITY, f64::min);
    pulse.finish(grid, steps, started, cell_masses, min_value, |a, b| {
        Ok(kernel.cell_mass_line(a, b, t)? / (b - a))
    })
}

/// Error report of [`green_function_solution`].
pub fn greens_function_check(
    idx: FractalIndices,
    diffusivity: f64,
    t: f64,
    grid: &Grid1D,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    Ok(green_function_solution(idx, diffusivity, t, grid, opts)?.report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub n: Vec<usize>,
    pub spacing: Vec<f64>,
    pub l2_rel_error: Vec<f64>,
    /// `ln(e_i/e_{i+1}) / ln(h_i/h_{i+1})` for each refinement.
    pub orders: Vec<f64>,
}

impl ConvergenceStudy {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn monotone(&self) -> bool {
        self.l2_rel_error.windows(2).all(|w| w[1] < w[0])
    }
}

/// Green's-function errors on the default domain for each node count.
pub fn convergence_study(
    idx: FractalIndices,
    diffusivity: f64,
    t: f64,
    ns: &[usize],
    opts: &SolverOptions,
) -> Result<ConvergenceStudy> {
    if ns.len() < 2 {
        return Err(config("a convergence study needs at least two grids"));
    }
    let mut spacing = Vec::new();
    let mut errors = Vec::new();
    for &n in ns {
        let grid = green_grid(idx, diffusivity, t, n)?;
        spacing.push(mean_spacing(&grid.hatted_mesh(idx.beta()).nodes));
        errors.push(greens_function_check(idx, diffusivity, t, &grid, opts)?.l2_rel_error);
    }
    let orders = (1..ns.len())
        .map(|i| (errors[i - 1] / errors[i]).ln() / (spacing[i - 1] / spacing[i]).ln())
        .collect();
    Ok(ConvergenceStudy {
        n: ns.to_vec(),
        spacing,
        l2_rel_error: errors,
        orders,
    })
}

/// Physical-coordinate transport solution against the mapped hatted one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub l2_rel_error: f64,
    pub linf_rel_error: f64,
    /// Relative mass change of the physical solver.
    pub mass_drift: f64,
    pub min_value: f64,
    pub steps: usize,
}

/// Pointwise Jacobian `dx̂/dx = β|x|^{β-1}` taking hatted densities to
/// physical ones.
fn hat_to_physical(u: &[f64], nodes: &[f64], beta: f64) -> Vec<f64> {
    u.iter()
        .zip(nodes)
        .map(|(u, x)| beta * u / x.abs().powf(1.0 - beta))
        .collect()
}

/// Runs both solvers from the same pulse on the default domain with `n`
/// nodes; `n` must be even so that the origin is a cell face.
pub fn coordinate_equivalence(
    idx: FractalIndices,
    diffusivity: f64,
    t: f64,
    n: usize,
    opts: &SolverOptions,
) -> Result<EquivalenceReport> {
    let grid = green_grid(idx, diffusivity, t, n)?;
    let pulse = Pulse::new(idx, diffusivity, &grid)?;
    let (steps, dt) = pulse.plan(t.powf(idx.alpha()), diffusivity, opts)?;
    let beta = idx.beta();
    let nodes = &pulse.phys.nodes;

    // both start from the same mass in every cell
    let mut u = pulse.hat_density();
    let mut p = pulse.phys_density();
    let phys_w = pulse.phys.widths();
    let m0: f64 = pulse.masses.iter().sum();
    hat_operator(&pulse.hat, diffusivity, opts.boundary)?.advance(&mut u, dt, steps, opts.scheme)?;
    transport_operator(&pulse.phys, beta, diffusivity, opts.boundary)?.advance(&mut p, dt, steps, opts.scheme)?;

    let mapped = hat_to_physical(&u, nodes, beta);
    let (l2, linf) = relative_errors(&p, &mapped, &phys_w);
    let m1: f64 = p.iter().zip(&phys_w).map(|(p, w)| p * w).sum();
    Ok(EquivalenceReport {
        l2_rel_error: l2,
        linf_rel_error: linf,
        mass_drift: (m1 - m0).abs() / m0,
        min_value: p.iter().copied().fold(f64::INFINITY, f64::min),
        steps,
    })
}

/// Collapse error of the numeric Green's function at `t` and `4t` under
/// `x → x/λ`, `P → λP` with `λ = 4^{α/2β}`.
pub fn self_similarity(idx: FractalIndices, diffusivity: f64, t: f64, n: usize, opts: &SolverOptions) -> Result<f64> {
    let grid = green_grid(idx, diffusivity, 4.0 * t, n)?;
    let early = green_function_solution(idx, diffusivity, t, &grid, opts)?;
    let late = green_function_solution(idx, diffusivity, 4.0 * t, &grid, opts)?;
    let beta = idx.beta();
    let lambda = 4f64.powf(0.5 * idx.alpha() / beta);

    // cumulative mass of the late solution, linear in x̂ within each cell
    let hat_faces: Vec<f64> = late.faces.iter().map(|&f| signed_pow(f, beta)).collect();
    let mut cumulative = vec![0.0; hat_faces.len()];
    for (i, m) in late.cell_masses.iter().enumerate() {
        cumulative[i + 1] = cumulative[i] + m;
    }
    let cdf = |x: f64| -> f64 {
        let s = signed_pow(x, beta);
        let last = hat_faces.len() - 1;
        if s <= hat_faces[0] {
            return 0.0;
        }
        if s >= hat_faces[last] {
            return cumulative[last];
        }
        let j = hat_faces.partition_point(|&f| f <= s) - 1;
        let frac = (s - hat_faces[j]) / (hat_faces[j + 1] - hat_faces[j]);
        cumulative[j] + frac * (cumulative[j + 1] - cumulative[j])
    };
    let widths: Vec<f64> = early.faces.windows(2).map(|w| w[1] - w[0]).collect();
    let collapsed: Vec<f64> = early
        .faces
        .windows(2)
        .zip(&widths)
        .map(|(w, width)| (cdf(lambda * w[1]) - cdf(lambda * w[0])) / width)
        .collect();
    Ok(relative_errors(&collapsed, early.numeric.values(), &widths).0)
}

/// Radial Richardson solution against the unit-mass kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonReport {
    /// L2 relative error after scaling the numeric profile by `amplitude`.
    pub l2_rel_error: f64,
    /// Least-squares amplitude factor.
    pub amplitude: f64,
    pub steps: usize,
    pub profile: Vec<[f64; 3]>,
}

/// Runs Richardson's equation from the kernel at `t0` to `t1` on a radial
/// grid uniform in `r^β`, and compares the profile with the kernel at `t1`.
pub fn richardson_check(
    kernel: &RichardsonKernel,
    t0: f64,
    t1: f64,
    n: usize,
    opts: &SolverOptions,
) -> Result<RichardsonReport> {
    if !(t0 > 0.0 && t1 > t0) {
        return Err(config(format!("need 0 < t0 < t1, got {t0} and {t1}")));
    }
    let beta = kernel.beta();
    let hat_diffusivity = kernel.k0() * beta * beta;
    let radius = hat_half_width(hat_diffusivity, t1).powf(1.0 / beta);
    let grid = Grid1D::new(0.0, radius, n, Spacing::Hatted { beta })?;
    let mesh = grid.physical_mesh();
    let init = mesh
        .nodes
        .iter()
        .map(|&r| kernel.pdf(r, t0))
        .collect::<Result<Vec<_>>>()?;
    let op = richardson_operator(&mesh, kernel.k0(), beta, kernel.dim(), opts.boundary)?;
    let mut u = init;
    let h = mean_spacing(&grid.hatted_mesh(beta).nodes);
    let (steps, dt) = opts.step_plan(t1 - t0, hat_diffusivity, h)?;
    op.advance(&mut u, dt, steps, opts.scheme)?;

    let exact = mesh
        .nodes
        .iter()
        .map(|&r| kernel.pdf(r, t1))
        .collect::<Result<Vec<_>>>()?;
    let w = &op.volume;
    let num: f64 = u.iter().zip(&exact).zip(w).map(|((a, b), w)| a * b * w).sum();
    let den: f64 = u.iter().zip(w).map(|(a, w)| a * a * w).sum();
    let amplitude = num / den;
    let scaled: Vec<f64> = u.iter().map(|v| v * amplitude).collect();
    let (l2, _) = relative_errors(&scaled, &exact, w);
    let profile = mesh
        .nodes
        .iter()
        .zip(&u)
        .zip(&exact)
        .map(|((&r, &a), &b)| [r, a, b])
        .collect();
    Ok(RichardsonReport {
        l2_rel_error: l2,
        amplitude,
        steps,
        profile,
    })
}

/// Richardson's equation against the present transport-diffusion model on
/// the line, from the same initial Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    /// L2 relative difference between the two models.
    pub difference: f64,
    /// Larger of the two models' coarse-vs-fine grid differences.
    pub discretization_error: f64,
    pub ratio: f64,
    pub steps: usize,
}

/// Both models with `k0 = D/β²`, so their diffusivities coincide and only
/// the drift term of the present model separates them. A second run on
/// `2n` nodes estimates the discretization error; `n` must be even.
pub fn richardson_vs_present(
    beta: f64,
    diffusivity: f64,
    width: f64,
    t: f64,
    n: usize,
    opts: &SolverOptions,
) -> Result<ModelComparison> {
    if !n.is_multiple_of(2) {
        return Err(config("the model comparison needs an even node count"));
    }
    let idx = FractalIndices::new(1.0, beta)?;
    let k0 = diffusivity / (beta * beta);
    let pulse = StretchedGaussian::line(FractalIndices::classical(), 1.0)?;
    let run = |n: usize| -> Result<(Mesh, Vec<f64>, Vec<f64>, usize)> {
        let grid = green_grid(idx, diffusivity, t, n)?;
        let mesh = grid.physical_mesh();
        // Gaussian of standard deviation `width`
        let var_t = 0.5 * width * width;
        let init = mesh
            .nodes
            .iter()
            .map(|&x| pulse.pdf_line(x, var_t))
            .collect::<Result<Vec<_>>>()?;
        let h = mean_spacing(&grid.hatted_mesh(beta).nodes);
        let (steps, dt) = opts.step_plan(t, diffusivity, h)?;
        let mut present = init.clone();
        transport_operator(&mesh, beta, diffusivity, opts.boundary)?.advance(&mut present, dt, steps, opts.scheme)?;
        let mut richardson = init;
        richardson_operator(&mesh, k0, beta, 1, opts.boundary)?.advance(&mut richardson, dt, steps, opts.scheme)?;
        Ok((mesh, present, richardson, steps))
    };
    let (coarse, p_c, r_c, _) = run(n)?;
    let (fine, p_f, r_f, steps) = run(2 * n)?;
    let w_c = coarse.widths();
    let on_coarse = |v: &[f64]| interpolate_hatted(&fine.nodes, v, &coarse.nodes, beta);
    let disc_p = relative_errors(&p_c, &on_coarse(&p_f), &w_c).0;
    let disc_r = relative_errors(&r_c, &on_coarse(&r_f), &w_c).0;
    let difference = relative_errors(&r_f, &p_f, &fine.widths()).0;
    let discretization_error = disc_p.max(disc_r);
    Ok(ModelComparison {
        difference,
        discretization_error,
        ratio: difference / discretization_error,
        steps,
    })
}

/// Linear interpolation in `x̂` of the hatted density `|x|^{1-β} P`, which
/// is smooth through the origin, returned as a physical density.
fn interpolate_hatted(nodes: &[f64], density: &[f64], at: &[f64], beta: f64) -> Vec<f64> {
    let s: Vec<f64> = nodes.iter().map(|&x| signed_pow(x, beta)).collect();
    let u: Vec<f64> = density
        .iter()
        .zip(nodes)
        .map(|(p, x)| p * x.abs().powf(1.0 - beta))
        .collect();
    at.iter()
        .map(|&x| {
            let q = signed_pow(x, beta);
            let j = s.partition_point(|&v| v <= q).clamp(1, s.len() - 1);
            let frac = (q - s[j - 1]) / (s[j] - s[j - 1]);
            let v = u[j - 1] + frac * (u[j] - u[j - 1]);
            v / x.abs().powf(1.0 - beta)
        })
        .collect()
}

//! Finite-volume solvers for the hatted heat equation, the physical
//! transport-diffusion equation and Richardson's equation.
//!
//! All solvers step uniformly in hatted time `t̂ = t^α`, so the equations
//! they integrate are autonomous. The default scheme is backward Euler with
//! `Δt̂ = λ ĥ²/D` for a fixed diffusion number `λ`, which keeps the time
//! error of the same order as the spatial error.

mod checks;
pub mod fv;

use serde::{Deserialize, Serialize};

pub use checks::{
    convergence_study, coordinate_equivalence, green_function_solution, green_grid, greens_function_check,
    richardson_check, richardson_line_solution, richardson_vs_present, self_similarity, ConvergenceStudy,
    EquivalenceReport, GreenSolution, ModelComparison, RichardsonReport,
};
pub use fv::{Boundary, Mesh, Scheme};

use crate::error::{config, domain, Error, Result};
use crate::fabric::{signed_pow, FractalIndices, SampledField};
use fv::{FaceCoefficients, Operator};

/// Version tag written into every JSON report.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spacing {
    /// Uniform in physical `x`.
    Physical,
    /// Uniform in `x̂ = sign(x)|x|^β`.
    Hatted { beta: f64 },
}

/// A 1-D grid description; node placement is fixed by `spacing`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub spacing: Spacing,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize, spacing: Spacing) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(config(format!("grid bounds out of order: [{x_min}, {x_max}]")));
        }
        if n < 16 {
            return Err(config(format!("a grid needs at least 16 nodes, got {n}")));
        }
        if let Spacing::Hatted { beta } = spacing {
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(domain(format!("grid beta must lie in (0, 1], got {beta}")));
            }
        }
        Ok(Self {
            x_min,
            x_max,
            n,
            spacing,
        })
    }

    /// Symmetric line grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize, spacing: Spacing) -> Result<Self> {
        Self::new(-half_width, half_width, n, spacing)
    }

    fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let h = (hi - lo) / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + i as f64 * h })
            .collect()
    }

    fn midpoint_faces(nodes: &[f64]) -> Vec<f64> {
        let n = nodes.len();
        let mut faces = Vec::with_capacity(n + 1);
        faces.push(nodes[0]);
        faces.extend(nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        faces.push(nodes[n - 1]);
        faces
    }

    /// Nodes and faces in physical coordinates.
    pub fn physical_mesh(&self) -> Mesh {
        match self.spacing {
            Spacing::Physical => {
                let nodes = Self::uniform(self.x_min, self.x_max, self.n);
                let faces = Self::midpoint_faces(&nodes);
                Mesh { nodes, faces }
            }
            Spacing::Hatted { beta } => {
                let hat = self.hatted_mesh(beta);
                let back = |v: &Vec<f64>| v.iter().map(|&s| signed_pow(s, 1.0 / beta)).collect();
                let mut mesh = Mesh {
                    nodes: back(&hat.nodes),
                    faces: back(&hat.faces),
                };
                // keep the physical end points exact
                let n = mesh.nodes.len();
                mesh.nodes[0] = self.x_min;
                mesh.nodes[n - 1] = self.x_max;
                mesh.faces[0] = self.x_min;
                mesh.faces[n] = self.x_max;
                mesh
            }
        }
    }

    /// Nodes and faces in hatted coordinates `x̂ = sign(x)|x|^β`.
    pub fn hatted_mesh(&self, beta: f64) -> Mesh {
        match self.spacing {
            Spacing::Hatted { beta: grid_beta } if grid_beta == beta => {
                let lo = signed_pow(self.x_min, beta);
                let hi = signed_pow(self.x_max, beta);
                let nodes = Self::uniform(lo, hi, self.n);
                let faces = Self::midpoint_faces(&nodes);
                Mesh { nodes, faces }
            }
            _ => {
                let phys = self.physical_mesh();
                let fwd = |v: &Vec<f64>| v.iter().map(|&x| signed_pow(x, beta)).collect();
                Mesh {
                    nodes: fwd(&phys.nodes),
                    faces: fwd(&phys.faces),
                }
            }
        }
    }
}

/// Error norms of a numeric-vs-analytic comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema_version: String,
    pub l2_rel_error: f64,
    pub linf_rel_error: f64,
    pub grid: Grid1D,
    pub steps: usize,
    /// Seconds; excluded from byte-stable outputs.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time: Option<f64>,
    /// Relative change of total mass over the run.
    pub mass_drift: f64,
    /// Smallest value of the numeric solution.
    pub min_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub scheme: Scheme,
    pub boundary: Boundary,
    /// `λ = D Δt̂ / ĥ²` used to pick the step when `steps` is not given.
    pub diffusion_number: f64,
    /// Fixed step count; overrides `diffusion_number`.
    pub steps: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            scheme: Scheme::Implicit,
            boundary: Boundary::DirichletZero,
            diffusion_number: 2.0,
            steps: None,
        }
    }
}

impl SolverOptions {
    fn step_plan(&self, duration: f64, diffusivity: f64, mean_hat_spacing: f64) -> Result<(usize, f64)> {
        if !(duration >= 0.0) {
            return Err(domain(format!("hatted duration must be >= 0, got {duration}")));
        }
        if duration == 0.0 {
            return Ok((0, 0.0));
        }
        let steps = match self.steps {
            Some(s) if s > 0 => s,
            Some(_) => return Err(config("step count must be positive")),
            None => {
                if !(self.diffusion_number > 0.0) {
                    return Err(config("diffusion number must be > 0"));
                }
                let dt = self.diffusion_number * mean_hat_spacing * mean_hat_spacing / diffusivity;
                (duration / dt).ceil().max(1.0) as usize
            }
        };
        Ok((steps, duration / steps as f64))
    }
}

fn check_init(init: &SampledField<f64>, mesh: &Mesh) -> Result<()> {
    if init.len() != mesh.len() {
        return Err(config(format!(
            "initial field has {} nodes, grid has {}",
            init.len(),
            mesh.len()
        )));
    }
    let mismatch = init
        .nodes()
        .iter()
        .zip(&mesh.nodes)
        .any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + b.abs()));
    if mismatch {
        return Err(config("initial field nodes do not match the grid"));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be > 0, got {v}")))
    }
}

fn mean_spacing(nodes: &[f64]) -> f64 {
    (nodes[nodes.len() - 1] - nodes[0]) / (nodes.len() - 1) as f64
}

/// Backward-Euler integration of an assembled operator; returns the step count.
fn integrate(
    op: &Operator,
    u: &mut [f64],
    duration: f64,
    diffusivity: f64,
    hat_spacing: f64,
    opts: &SolverOptions,
) -> Result<usize> {
    let (steps, dt) = opts.step_plan(duration, diffusivity, hat_spacing)?;
    if steps > 0 {
        op.advance(u, dt, steps, opts.scheme)?;
    }
    Ok(steps)
}

pub(crate) fn hat_operator(mesh: &Mesh, diffusivity: f64, boundary: Boundary) -> Result<Operator> {
    let conductance = mesh.nodes.windows(2).map(|w| diffusivity / (w[1] - w[0])).collect();
    Operator::assemble(mesh.widths(), &FaceCoefficients::symmetric(conductance), boundary)
}

fn node_at_origin(mesh: &Mesh) -> bool {
    mesh.nodes.contains(&0.0)
}

/// Physical-density form of the transport-diffusion equation, with flux
/// `J = -K P_x + V P`, `K = (D/β²)|x|^{2-2β}` and
/// `V = -(D(1-β)/β²) sign(x)|x|^{1-2β}`.
///
/// The flux factors as `J = -(D/β²)|x|^{1-β} (|x|^{1-β} P)_x`; holding `J`
/// constant between two nodes and integrating exactly gives
/// `F = D/(β Δx̂) (|x_L|^{1-β} P_L - |x_R|^{1-β} P_R)` with
/// `Δx̂ = x̂_R - x̂_L`. This stays finite on a face at `x = 0`, so the
/// singular point is a face and never a node.
pub(crate) fn transport_operator(mesh: &Mesh, beta: f64, diffusivity: f64, boundary: Boundary) -> Result<Operator> {
    if beta < 1.0 && node_at_origin(mesh) {
        return Err(Error::Refinement(
            "a node sits at x = 0 where the density is singular; use an even node count so the origin is a cell face"
                .into(),
        ));
    }
    let weight = |x: f64| x.abs().powf(1.0 - beta);
    let mut from_left = Vec::with_capacity(mesh.len() - 1);
    let mut from_right = Vec::with_capacity(mesh.len() - 1);
    for w in mesh.nodes.windows(2) {
        let g = diffusivity / (beta * (signed_pow(w[1], beta) - signed_pow(w[0], beta)));
        from_left.push(g * weight(w[0]));
        from_right.push(g * weight(w[1]));
    }
    Operator::assemble(mesh.widths(), &FaceCoefficients { from_left, from_right }, boundary)
}

/// `∫_a^b |x|^{2β-2} dx`, infinite when the integral diverges at 0.
fn inverse_power_integral(a: f64, b: f64, beta: f64) -> f64 {
    let p = 2.0 * beta - 1.0;
    let crosses = a < 0.0 && b > 0.0 || a == 0.0 || b == 0.0;
    if p <= 0.0 && crosses {
        return f64::INFINITY;
    }
    if p == 0.0 {
        return (b.abs() / a.abs()).ln().abs();
    }
    (signed_pow(b, p) - signed_pow(a, p)) / p
}

/// Richardson's operator `r^{1-d} ∂_r(k0 r^{d+1-2β} ∂_r)`, radial for meshes
/// starting at 0 and a full line for `d = 1` meshes that straddle it.
///
/// On the line the face conductance is the exact harmonic mean
/// `k0 / ∫ |x|^{2β-2} dx` over the node gap, which stays finite across the
/// origin for `β > 1/2`. Radial faces use the coefficient at the face.
pub(crate) fn richardson_operator(mesh: &Mesh, k0: f64, beta: f64, dim: u32, boundary: Boundary) -> Result<Operator> {
    let n = mesh.len();
    let d = dim as f64;
    let line = mesh.nodes[0] < 0.0;
    if line && dim != 1 {
        return Err(config("only d = 1 problems may extend to negative coordinates"));
    }
    if !line && mesh.nodes[0] != 0.0 {
        return Err(config("radial meshes must start at r = 0"));
    }
    let conductance: Vec<f64> = (1..n)
        .map(|j| {
            let (a, b) = (mesh.nodes[j - 1], mesh.nodes[j]);
            if line {
                k0 / inverse_power_integral(a, b, beta)
            } else {
                let f = mesh.faces[j];
                f.powf(d - 1.0) * k0 * f.powf(2.0 - 2.0 * beta) / (b - a)
            }
        })
        .collect();
    let volume = if line {
        mesh.widths()
    } else {
        mesh.faces
            .windows(2)
            .map(|w| (w[1].powf(d) - w[0].powf(d)) / d)
            .collect()
    };
    let op = Operator::assemble(volume, &FaceCoefficients::symmetric(conductance), boundary)?;
    // the centre of a radial problem is a symmetry point
    Ok(if line { op } else { op.reflecting_start() })
}

/// Heat equation `∂u/∂t̂ = D ∂²u/∂x̂²` on the nodes of `init` (hatted
/// coordinates) for a hatted duration `t_hat_final`.
pub fn solve_hat_diffusion(
    init: &SampledField<f64>,
    diffusivity: f64,
    t_hat_final: f64,
    opts: &SolverOptions,
) -> Result<SampledField<f64>> {
    check_positive("diffusivity", diffusivity)?;
    let mesh = Mesh::from_nodes(init.nodes().to_vec())?;
    let (field, _) = solve_hat_on(&mesh, init.values(), diffusivity, t_hat_final, opts)?;
    Ok(field)
}

pub(crate) fn solve_hat_on(
    mesh: &Mesh,
    init: &[f64],
    diffusivity: f64,
    duration: f64,
    opts: &SolverOptions,
) -> Result<(SampledField<f64>, usize)> {
    let op = hat_operator(mesh, diffusivity, opts.boundary)?;
    let mut u = init.to_vec();
    let steps = integrate(&op, &mut u, duration, diffusivity, mean_spacing(&mesh.nodes), opts)?;
    Ok((SampledField::new(mesh.nodes.clone(), u)?, steps))
}

/// Physical-coordinate transport-diffusion equation on `grid`, from physical
/// time `t_start` to `t_final`, stepping uniformly in `t̂ = t^α`.
pub fn solve_physical_transport(
    init: &SampledField<f64>,
    idx: FractalIndices,
    diffusivity: f64,
    t_start: f64,
    t_final: f64,
    grid: &Grid1D,
    opts: &SolverOptions,
) -> Result<SampledField<f64>> {
    check_positive("diffusivity", diffusivity)?;
    let mesh = grid.physical_mesh();
    check_init(init, &mesh)?;
    let duration = hatted_duration(idx, t_start, t_final)?;
    let (field, _) = solve_transport_on(&mesh, init.values(), idx, diffusivity, duration, grid, opts)?;
    Ok(field)
}

pub(crate) fn solve_transport_on(
    mesh: &Mesh,
    init: &[f64],
    idx: FractalIndices,
    diffusivity: f64,
    duration: f64,
    grid: &Grid1D,
    opts: &SolverOptions,
) -> Result<(SampledField<f64>, usize)> {
    let op = transport_operator(mesh, idx.beta(), diffusivity, opts.boundary)?;
    let mut u = init.to_vec();
    let hat_spacing = mean_spacing(&grid.hatted_mesh(idx.beta()).nodes);
    let steps = integrate(&op, &mut u, duration, diffusivity, hat_spacing, opts)?;
    Ok((SampledField::new(mesh.nodes.clone(), u)?, steps))
}

pub(crate) fn hatted_duration(idx: FractalIndices, t_start: f64, t_final: f64) -> Result<f64> {
    if !(t_start >= 0.0 && t_final >= t_start) {
        return Err(domain(format!(
            "need 0 <= t_start <= t_final, got {t_start} and {t_final}"
        )));
    }
    Ok(t_final.powf(idx.alpha()) - t_start.powf(idx.alpha()))
}

/// Richardson's equation from `t_start` to `t_final` (`α = 1`).
#[allow(clippy::too_many_arguments)]
pub fn solve_richardson(
    init: &SampledField<f64>,
    k0: f64,
    beta: f64,
    dim: u32,
    t_start: f64,
    t_final: f64,
    grid: &Grid1D,
    opts: &SolverOptions,
) -> Result<SampledField<f64>> {
    let mesh = grid.physical_mesh();
    check_init(init, &mesh)?;
    let (field, _) = solve_richardson_on(&mesh, init.values(), k0, beta, dim, t_final - t_start, opts)?;
    Ok(field)
}

pub(crate) fn solve_richardson_on(
    mesh: &Mesh,
    init: &[f64],
    k0: f64,
    beta: f64,
    dim: u32,
    duration: f64,
    opts: &SolverOptions,
) -> Result<(SampledField<f64>, usize)> {
    check_positive("k0", k0)?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(domain(format!("beta must lie in (0, 1], got {beta}")));
    }
    if dim == 0 {
        return Err(domain("dimension must be >= 1"));
    }
    let op = richardson_operator(mesh, k0, beta, dim, opts.boundary)?;
    let mut u = init.to_vec();
    // time scale of the hatted problem: r̂ = r^β diffuses with k0·β²
    let hat_spacing = mean_spacing(&mesh.nodes.iter().map(|&r| signed_pow(r, beta)).collect::<Vec<_>>());
    let steps = integrate(&op, &mut u, duration, k0 * beta * beta, hat_spacing, opts)?;
    Ok((SampledField::new(mesh.nodes.clone(), u)?, steps))
}

/// Weighted relative L2 and L∞ errors.
pub(crate) fn relative_errors(numeric: &[f64], exact: &[f64], weights: &[f64]) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut max_diff: f64 = 0.0;
    let mut max_exact: f64 = 0.0;
    for ((a, b), w) in numeric.iter().zip(exact).zip(weights) {
        num += (a - b) * (a - b) * w;
        den += b * b * w;
        max_diff = max_diff.max((a - b).abs());
        max_exact = max_exact.max(b.abs());
    }
    ((num / den).sqrt(), max_diff / max_exact)
}

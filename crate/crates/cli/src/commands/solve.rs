use clap::{Args, ValueEnum};
use fractal_diffusion::analytic::RichardsonKernel;
use fractal_diffusion::solver::{
    green_function_solution, green_grid, richardson_check, richardson_line_solution, Boundary, GreenSolution, Scheme,
    SolverOptions, SCHEMA_VERSION,
};
use fractal_diffusion::FractalIndices;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Experiment;
use crate::config::{required, Globals};
use crate::error::{CliError, Result};
use crate::output::{print_json, Output};
use crate::svg::{Plot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Transport-diffusion on the fractal fabric
    Present,
    /// Richardson's equation with `K = k0 r^(2-2β)`
    Richardson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeArg {
    Implicit,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryArg {
    Dirichlet,
    NoFlux,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveArgs {
    /// Equation to solve [default: present]
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Time index α (present model)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Space index β
    #[arg(long)]
    pub beta: Option<f64>,
    /// Spatial dimension; above 1 only for the Richardson model [default: 1]
    #[arg(long = "d", value_name = "DIM")]
    pub d: Option<u32>,
    /// Diffusivity D of the present model [default: 1]
    #[arg(long)]
    pub diffusivity: Option<f64>,
    /// Richardson constant k0 [default: D/β²]
    #[arg(long)]
    pub k0: Option<f64>,
    /// Final time [default: 1]
    #[arg(long)]
    pub t: Option<f64>,
    /// Start time of radial Richardson runs [default: t/10]
    #[arg(long)]
    pub t0: Option<f64>,
    /// Grid nodes [default: 2048]
    #[arg(short = 'n', long)]
    pub nodes: Option<usize>,
    /// Fail (exit 1) when the error against the Green's function exceeds the tolerance
    #[arg(long)]
    pub check_green: bool,
    /// L2 relative error allowed by --check-green [default: 5e-3]
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Record wall time in the report (breaks byte-identical reruns)
    #[arg(long)]
    pub timing: bool,
    /// Time stepping [default: implicit]
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Outer boundary [default: dirichlet]
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
    /// D Δt̂ / ĥ² of the time step [default: 2]
    #[arg(long)]
    pub diffusion_number: Option<f64>,
}

impl SolveArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            scheme: match self.scheme {
                Some(SchemeArg::Explicit) => Scheme::Explicit,
                _ => Scheme::Implicit,
            },
            boundary: match self.boundary {
                Some(BoundaryArg::NoFlux) => Boundary::NoFlux,
                _ => Boundary::DirichletZero,
            },
            diffusion_number: self.diffusion_number.unwrap_or(2.0),
            steps: None,
        }
    }

    fn check(&self, l2: f64) -> Result<()> {
        let tol = self.tolerance.unwrap_or(5e-3);
        if self.check_green && !(l2 <= tol) {
            return Err(CliError::Tolerance(format!("L2 relative error {l2:e} exceeds {tol:e}")));
        }
        Ok(())
    }

    fn line_outputs(&self, sol: GreenSolution, out: &Output) -> Result<()> {
        let mut report = sol.report;
        if !self.timing {
            report.wall_time = None;
        }
        let xs = sol.numeric.nodes();
        out.table(
            "field",
            &["x", "numeric", "exact"],
            &[xs, sol.numeric.values(), sol.exact.values()],
        )?;
        let peak = sol.exact.values().iter().copied().fold(0.0, f64::max);
        out.plot(
            "field",
            &Plot::new("solution against the Green's function", "x", "P(x, t)")
                .clip(2.0 * peak)
                .with(Series::new("numeric", xs, sol.numeric.values()))
                .with(Series::new("exact", xs, sol.exact.values())),
        )?;
        out.json("report", &report)?;
        print_json(&report);
        self.check(report.l2_rel_error)
    }
}

impl Experiment for SolveArgs {
    const NAME: &'static str = "solve";

    fn resolve(mut self) -> Result<Self> {
        let model = *self.model.get_or_insert(Model::Present);
        let beta = required(self.beta, Self::NAME, "--beta <BETA>")?;
        let d = *self.d.get_or_insert(1);
        let diffusivity = *self.diffusivity.get_or_insert(1.0);
        let t = *self.t.get_or_insert(1.0);
        self.nodes.get_or_insert(2048);
        self.tolerance.get_or_insert(5e-3);
        self.scheme.get_or_insert(SchemeArg::Implicit);
        self.boundary.get_or_insert(BoundaryArg::Dirichlet);
        self.diffusion_number.get_or_insert(2.0);
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("t must be > 0, got {t}")));
        }
        match model {
            Model::Present => {
                let alpha = required(self.alpha, Self::NAME, "--alpha <ALPHA>")?;
                FractalIndices::new(alpha, beta)?;
                if d != 1 {
                    return Err(CliError::Config(
                        "the present model is solved on the line; use --d 1".into(),
                    ));
                }
                if self.k0.is_some() || self.t0.is_some() {
                    return Err(CliError::Config("k0 and t0 apply to the Richardson model only".into()));
                }
            }
            Model::Richardson => {
                if self.alpha.is_some_and(|a| a != 1.0) {
                    return Err(CliError::Config(
                        "Richardson's equation has no time index; drop --alpha".into(),
                    ));
                }
                self.alpha = None;
                let k0 = *self.k0.get_or_insert(diffusivity / (beta * beta));
                RichardsonKernel::new(k0, beta, d)?;
                if d > 1 {
                    let t0 = *self.t0.get_or_insert(0.1 * t);
                    if !(t0 > 0.0 && t0 < t) {
                        return Err(CliError::Config(format!("need 0 < t0 < t, got t0 = {t0}")));
                    }
                } else if self.t0.is_some() {
                    return Err(CliError::Config("t0 applies to radial (d > 1) runs only".into()));
                }
            }
        }
        Ok(self)
    }

    fn run(&self, _: &Globals, out: &Output) -> Result<()> {
        let beta = self.beta.unwrap_or(1.0);
        let t = self.t.unwrap_or(1.0);
        let n = self.nodes.unwrap_or(2048);
        let diffusivity = self.diffusivity.unwrap_or(1.0);
        let opts = self.options();
        match self.model.unwrap_or(Model::Present) {
            Model::Present => {
                let idx = FractalIndices::new(self.alpha.unwrap_or(1.0), beta)?;
                let grid = green_grid(idx, diffusivity, t, n)?;
                self.line_outputs(green_function_solution(idx, diffusivity, t, &grid, &opts)?, out)
            }
            Model::Richardson => {
                let k0 = self.k0.unwrap_or(diffusivity / (beta * beta));
                let kernel = RichardsonKernel::new(k0, beta, self.d.unwrap_or(1))?;
                if kernel.dim() == 1 {
                    let grid = green_grid(FractalIndices::new(1.0, beta)?, k0 * beta * beta, t, n)?;
                    return self.line_outputs(richardson_line_solution(&kernel, t, &grid, &opts)?, out);
                }
                let report = richardson_check(&kernel, self.t0.unwrap_or(0.1 * t), t, n, &opts)?;
                let column = |j: usize| report.profile.iter().map(|p| p[j]).collect::<Vec<_>>();
                let (rs, numeric, exact) = (column(0), column(1), column(2));
                out.table("profile", &["r", "numeric", "exact"], &[&rs, &numeric, &exact])?;
                let scaled: Vec<f64> = numeric.iter().map(|v| v * report.amplitude).collect();
                out.plot(
                    "profile",
                    &Plot::new("radial profile", "r", "P(r, t)")
                        .with(Series::new("numeric (amplitude matched)", &rs, &scaled))
                        .with(Series::new("exact", &rs, &exact)),
                )?;
                let summary = json!({
                    "schema_version": SCHEMA_VERSION,
                    "dim": kernel.dim(),
                    "l2_rel_error": report.l2_rel_error,
                    "amplitude": report.amplitude,
                    "steps": report.steps,
                });
                out.json("report", &summary)?;
                print_json(&summary);
                self.check(report.l2_rel_error)
            }
        }
    }
}

use clap::Args;
use fractal_diffusion::analytic::{relaxation_mittag_leffler, relaxation_stretched, StretchedGaussian};
use fractal_diffusion::fabric::signed_pow;
use fractal_diffusion::solver::SCHEMA_VERSION;
use fractal_diffusion::FractalIndices;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{linspace, trapezoid, Experiment};
use crate::config::{required, Globals};
use crate::error::{CliError, Result};
use crate::output::{print_json, Output};
use crate::svg::{Plot, Series};

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PdfArgs {
    /// Time index α in (0, 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Space index β in (0, 1]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Spatial dimension [default: 1]
    #[arg(long = "d", value_name = "DIM")]
    pub d: Option<u32>,
    /// Diffusivity D [default: 1]
    #[arg(long)]
    pub diffusivity: Option<f64>,
    /// Observation time [default: 1]
    #[arg(long)]
    pub t: Option<f64>,
    /// Rows of the density table [default: 32001]
    #[arg(long)]
    pub points: Option<usize>,
    /// Wavenumber of the relaxation curves [default: 1]
    #[arg(long)]
    pub k: Option<f64>,
    /// Last time of the relaxation curves [default: 10]
    #[arg(long)]
    pub t_max: Option<f64>,
}

impl PdfArgs {
    fn kernel(&self) -> Result<StretchedGaussian> {
        let idx = FractalIndices::new(self.alpha.unwrap_or(1.0), self.beta.unwrap_or(1.0))?;
        Ok(StretchedGaussian::new(
            idx,
            self.diffusivity.unwrap_or(1.0),
            self.d.unwrap_or(1),
        )?)
    }
}

impl Experiment for PdfArgs {
    const NAME: &'static str = "pdf";

    fn resolve(mut self) -> Result<Self> {
        self.alpha = Some(required(self.alpha, Self::NAME, "--alpha <ALPHA>")?);
        self.beta = Some(required(self.beta, Self::NAME, "--beta <BETA>")?);
        self.d.get_or_insert(1);
        self.diffusivity.get_or_insert(1.0);
        let t = *self.t.get_or_insert(1.0);
        let points = *self.points.get_or_insert(32001);
        let k = *self.k.get_or_insert(1.0);
        let t_max = *self.t_max.get_or_insert(10.0);
        self.kernel()?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("t must be > 0, got {t}")));
        }
        if points < 11 {
            return Err(CliError::Config(format!("points must be >= 11, got {points}")));
        }
        if !(k >= 0.0 && t_max > 0.0) {
            return Err(CliError::Config("need k >= 0 and t_max > 0".into()));
        }
        Ok(self)
    }

    fn run(&self, _: &Globals, out: &Output) -> Result<()> {
        let g = self.kernel()?;
        let idx = g.indices();
        let (beta, dim) = (idx.beta(), g.dim());
        let t = self.t.unwrap_or(1.0);
        let d = g.diffusivity();
        let points = self.points.unwrap_or(32001);

        // rows uniform in s with x = s^{2/β}: dense where the density is
        // singular or peaked, so the trapezoid rule over the rows is accurate
        let reach_hat = (120.0 * d * t.powf(idx.alpha())).sqrt();
        let s_max = reach_hat.sqrt();
        let to_x = |s: f64| signed_pow(s, 2.0 / beta);
        let (xs, mass, plot) = if dim == 1 {
            let xs: Vec<f64> = linspace(-s_max, s_max, points).into_iter().map(to_x).collect();
            let density = g.plot_densities(&xs, t)?;
            let heat = StretchedGaussian::line(FractalIndices::classical(), d)?;
            let gaussian = xs
                .iter()
                .map(|&x| heat.pdf_line(x, t))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            out.table("pdf", &["x", "density", "gaussian"], &[&xs, &density, &gaussian])?;
            let peak = gaussian.iter().copied().fold(0.0, f64::max);
            let plot = Plot::new("density", "x", "P(x, t)")
                .clip(3.0 * peak)
                .with(Series::new("stretched Gaussian", &xs, &density))
                .with(Series::new("Gaussian", &xs, &gaussian));
            (xs.clone(), trapezoid(&xs, &density), plot)
        } else {
            let rs: Vec<f64> = linspace(0.0, s_max, points).into_iter().map(to_x).collect();
            let shell = rs
                .iter()
                .map(|&r| g.shell_density(r, t, rs[1]))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            out.table("pdf", &["r", "shell_density"], &[&rs, &shell])?;
            let plot = Plot::new("radial density", "r", "S_d r^(d-1) p(r, t)").with(Series::new("shell", &rs, &shell));
            (rs.clone(), trapezoid(&rs, &shell), plot)
        };
        out.plot("pdf", &plot)?;

        let k = self.k.unwrap_or(1.0);
        let line = StretchedGaussian::line(idx, d)?;
        let times = linspace(0.0, self.t_max.unwrap_or(10.0), 201);
        let stretched = relaxation_stretched(&line, k, &times)?.values;
        let ml = relaxation_mittag_leffler(&line, k, &times)?.values;
        let numerical = times
            .iter()
            .map(|&s| if s == 0.0 { Ok(1.0) } else { line.fourier_hatted(k, s) })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        out.table(
            "relaxation",
            &["t", "stretched", "mittag_leffler", "numerical"],
            &[&times, &stretched, &ml, &numerical],
        )?;
        out.plot(
            "relaxation",
            &Plot::new("relaxation of one Fourier mode", "t", "amplitude")
                .with(Series::new("exp(-D k^2b t^a)", &times, &stretched))
                .with(Series::new("Mittag-Leffler", &times, &ml)),
        )?;

        let summary = json!({
            "schema_version": SCHEMA_VERSION,
            "rows": xs.len(),
            "trapezoid_mass": mass,
        });
        out.json("summary", &summary)?;
        print_json(&summary);
        Ok(())
    }
}

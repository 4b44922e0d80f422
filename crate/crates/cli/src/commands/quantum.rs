use clap::{Args, ValueEnum};
use fractal_diffusion::quantum::{
    dispersion_table, plane_wave_residual, PlaneWaveGrid, QuantumFabric, SpaceDerivative,
};
use fractal_diffusion::solver::SCHEMA_VERSION;
use fractal_diffusion::FractalIndices;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Experiment;
use crate::config::Globals;
use crate::error::{CliError, Result};
use crate::output::{print_json, Output};
use crate::svg::{Plot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    FiniteDifference,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct QuantumArgs {
    /// Time index α [default: 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Space index β [default: 1]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Particle mass [default: 1]
    #[arg(long)]
    pub mass: Option<f64>,
    /// Scaled Planck constant of energy [default: 1]
    #[arg(long)]
    pub h_alpha: Option<f64>,
    /// Scaled Planck constant of momentum [default: 1]
    #[arg(long)]
    pub h_beta: Option<f64>,
    /// Largest wavenumber of the dispersion table [default: 10]
    #[arg(long)]
    pub k_max: Option<f64>,
    /// Rows of the dispersion table [default: 101]
    #[arg(long)]
    pub rows: Option<usize>,
    /// Check that a plane wave solves the hatted Schrödinger equation
    #[arg(long)]
    pub verify_plane_wave: bool,
    /// Wavenumber of the plane wave [default: 2]
    #[arg(long)]
    pub k: Option<f64>,
    /// Space derivative of the plane-wave check [default: spectral]
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Grid points per wavelength [default: 32]
    #[arg(long)]
    pub points_per_wavelength: Option<usize>,
    /// Factor on the frequency; anything but 1 is a negative control [default: 1]
    #[arg(long)]
    pub nu_scale: Option<f64>,
    /// Largest accepted relative residual [default: 1e-6]
    #[arg(long)]
    pub tolerance: Option<f64>,
}

impl QuantumArgs {
    fn fabric(&self) -> Result<QuantumFabric> {
        let idx = FractalIndices::new(self.alpha.unwrap_or(1.0), self.beta.unwrap_or(1.0))?;
        Ok(QuantumFabric::new(
            idx,
            self.h_alpha.unwrap_or(1.0),
            self.h_beta.unwrap_or(1.0),
            self.mass.unwrap_or(1.0),
        )?)
    }

    fn grid(&self) -> PlaneWaveGrid {
        PlaneWaveGrid {
            method: match self.method {
                Some(Method::FiniteDifference) => SpaceDerivative::FiniteDifference,
                _ => SpaceDerivative::Spectral,
            },
            points_per_wavelength: self.points_per_wavelength.unwrap_or(32),
            nu_scale: self.nu_scale.unwrap_or(1.0),
            ..PlaneWaveGrid::default()
        }
    }
}

impl Experiment for QuantumArgs {
    const NAME: &'static str = "quantum";

    fn resolve(mut self) -> Result<Self> {
        self.alpha.get_or_insert(1.0);
        self.beta.get_or_insert(1.0);
        self.mass.get_or_insert(1.0);
        self.h_alpha.get_or_insert(1.0);
        self.h_beta.get_or_insert(1.0);
        let k_max = *self.k_max.get_or_insert(10.0);
        let rows = *self.rows.get_or_insert(101);
        self.fabric()?;
        if !(k_max > 0.0) || rows < 2 {
            return Err(CliError::Config("need k_max > 0 and at least 2 rows".into()));
        }
        if self.verify_plane_wave {
            let k = *self.k.get_or_insert(2.0);
            self.method.get_or_insert(Method::Spectral);
            self.points_per_wavelength.get_or_insert(32);
            self.nu_scale.get_or_insert(1.0);
            self.tolerance.get_or_insert(1e-6);
            if !(k > 0.0) {
                return Err(CliError::Config(format!("plane-wave wavenumber must be > 0, got {k}")));
            }
        }
        Ok(self)
    }

    fn run(&self, _: &Globals, out: &Output) -> Result<()> {
        let qf = self.fabric()?;
        let rows = dispersion_table(&qf, self.k_max.unwrap_or(10.0), self.rows.unwrap_or(101))?;
        let col = |f: fn(&fractal_diffusion::quantum::DispersionRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
        let (k, nu, energy, momentum) = (col(|r| r.k), col(|r| r.nu), col(|r| r.energy), col(|r| r.momentum));
        out.table(
            "dispersion",
            &["k", "nu", "energy", "momentum"],
            &[&k, &nu, &energy, &momentum],
        )?;
        out.plot(
            "dispersion",
            &Plot::new("free dispersion", "k", "nu").with(Series::new("nu(k)", &k, &nu)),
        )?;
        if !self.verify_plane_wave {
            print_json(&json!({"schema_version": SCHEMA_VERSION, "rows": rows.len()}));
            return Ok(());
        }
        let r = plane_wave_residual(&qf, self.k.unwrap_or(2.0), &self.grid())?;
        let tol = self.tolerance.unwrap_or(1e-6);
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "residual": r.residual,
            "k_hat": r.k_hat,
            "nu_hat": r.nu_hat,
            "points": r.points,
            "tolerance": tol,
        });
        out.json("residual", &report)?;
        print_json(&report);
        if !(r.residual <= tol) {
            return Err(CliError::Tolerance(format!(
                "plane-wave residual {:e} exceeds {tol:e}",
                r.residual
            )));
        }
        Ok(())
    }
}

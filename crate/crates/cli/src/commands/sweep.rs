use clap::{Args, ValueEnum};
use fractal_diffusion::analytic::{moment_2beta, StretchedGaussian};
use fractal_diffusion::solver::{green_grid, greens_function_check, SolverOptions, SCHEMA_VERSION};
use fractal_diffusion::stochastic::{estimate_msd_exponent, log_schedule, walk_ensemble};
use fractal_diffusion::FractalIndices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Experiment;
use crate::config::Globals;
use crate::error::{CliError, Result};
use crate::output::{print_json, Output};

const FABRICS: [f64; 5] = [0.25, 0.5, 2.0 / 3.0, 0.75, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// |∫P dx - 1| by quadrature
    Normalization,
    /// Relative error of ∫|x|^2β P dx against 2Dt^α
    Moment,
    /// L2 relative error of the Green's-function solve
    Green,
    /// |η̂ - α/β| from walkers
    Eta,
}

impl Quantity {
    fn default_tolerance(self) -> f64 {
        match self {
            Quantity::Normalization => 1e-8,
            Quantity::Moment => 1e-6,
            Quantity::Green => 5e-3,
            Quantity::Eta => 0.05,
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepArgs {
    /// Checked quantity [default: normalization]
    #[arg(long, value_enum)]
    pub quantity: Option<Quantity>,
    /// Comma-separated time indices [default: 0.25,0.5,2/3,0.75,1]
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Comma-separated space indices [default: 0.25,0.5,2/3,0.75,1]
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,
    /// Diffusivity D [default: 1]
    #[arg(long)]
    pub diffusivity: Option<f64>,
    /// Observation time [default: 1]
    #[arg(long)]
    pub t: Option<f64>,
    /// Grid nodes for green [default: 4096]
    #[arg(short = 'n', long)]
    pub nodes: Option<usize>,
    /// Walkers for eta [default: 100000]
    #[arg(long)]
    pub walkers: Option<usize>,
    /// Largest accepted value [default: depends on the quantity]
    #[arg(long)]
    pub tolerance: Option<f64>,
}

impl Experiment for SweepArgs {
    const NAME: &'static str = "sweep";

    fn resolve(mut self) -> Result<Self> {
        let q = *self.quantity.get_or_insert(Quantity::Normalization);
        let alphas = self.alphas.get_or_insert_with(|| FABRICS.to_vec()).clone();
        let betas = self.betas.get_or_insert_with(|| FABRICS.to_vec()).clone();
        for &a in &alphas {
            for &b in &betas {
                FractalIndices::new(a, b)?;
            }
        }
        if alphas.is_empty() || betas.is_empty() {
            return Err(CliError::Config("need at least one α and one β".into()));
        }
        let d = *self.diffusivity.get_or_insert(1.0);
        let t = *self.t.get_or_insert(1.0);
        if !(d > 0.0 && t > 0.0) {
            return Err(CliError::Config("diffusivity and t must be > 0".into()));
        }
        match q {
            Quantity::Green => {
                self.nodes.get_or_insert(4096);
            }
            Quantity::Eta => {
                self.walkers.get_or_insert(100_000);
            }
            _ => {}
        }
        self.tolerance.get_or_insert(q.default_tolerance());
        Ok(self)
    }

    fn run(&self, globals: &Globals, out: &Output) -> Result<()> {
        let q = self.quantity.unwrap_or(Quantity::Normalization);
        let d = self.diffusivity.unwrap_or(1.0);
        let t = self.t.unwrap_or(1.0);
        let cells: Vec<(f64, f64)> = self
            .alphas
            .iter()
            .flatten()
            .flat_map(|&a| self.betas.iter().flatten().map(move |&b| (a, b)))
            .collect();
        // each cell is independent and seeded on its own, so the fan-out
        // does not affect the numbers
        let values = cells
            .par_iter()
            .map(|&(a, b)| -> Result<f64> {
                let idx = FractalIndices::new(a, b)?;
                Ok(match q {
                    Quantity::Normalization => {
                        (StretchedGaussian::line(idx, d)?.quadrature_moment(0.0, t)? - 1.0).abs()
                    }
                    Quantity::Moment => {
                        let g = StretchedGaussian::line(idx, d)?;
                        (g.quadrature_moment(2.0 * b, t)? / moment_2beta(&g, t)? - 1.0).abs()
                    }
                    Quantity::Green => {
                        let grid = green_grid(idx, d, t, self.nodes.unwrap_or(4096))?;
                        greens_function_check(idx, d, t, &grid, &SolverOptions::default())?.l2_rel_error
                    }
                    Quantity::Eta => {
                        let times = log_schedule(0.1 * t, 10.0 * t, 16)?;
                        let stats = walk_ensemble(idx, d, &times, self.walkers.unwrap_or(100_000), globals.seed)?;
                        (estimate_msd_exponent(&stats)?.eta_hat - idx.eta()).abs()
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let tol = self.tolerance.unwrap_or(q.default_tolerance());
        let alphas: Vec<f64> = cells.iter().map(|c| c.0).collect();
        let betas: Vec<f64> = cells.iter().map(|c| c.1).collect();
        let passed: Vec<f64> = values.iter().map(|&v| if v <= tol { 1.0 } else { 0.0 }).collect();
        out.table(
            "sweep",
            &["alpha", "beta", "value", "passed"],
            &[&alphas, &betas, &values, &passed],
        )?;
        let failures = passed.iter().filter(|&&p| p == 0.0).count();
        let worst = values.iter().copied().fold(0.0, f64::max);
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "quantity": q,
            "cells": cells.len(),
            "failures": failures,
            "worst": worst,
            "tolerance": tol,
        });
        out.json("summary", &report)?;
        print_json(&report);
        if failures > 0 {
            return Err(CliError::Tolerance(format!(
                "{failures} of {} cells exceed {tol:e}",
                cells.len()
            )));
        }
        Ok(())
    }
}

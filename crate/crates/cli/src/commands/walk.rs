use clap::Args;
use fractal_diffusion::analytic::{moment_2beta, StretchedGaussian};
use fractal_diffusion::solver::SCHEMA_VERSION;
use fractal_diffusion::stochastic::{
    diverging_moment_demo, estimate_msd_exponent, half_decade_sizes, log_schedule, mean_and_stderr, sample_levy,
    walk_ensemble,
};
use fractal_diffusion::FractalIndices;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{linspace, Experiment};
use crate::config::Globals;
use crate::error::{CliError, Result};
use crate::output::{print_json, Output};
use crate::svg::{Plot, Series};

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct WalkArgs {
    /// Time index α [default: 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Space index β [default: 1]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Diffusivity D [default: 1]
    #[arg(long)]
    pub diffusivity: Option<f64>,
    /// Walkers, or samples with --levy [default: 100000]
    #[arg(short = 'n', long)]
    pub walkers: Option<usize>,
    /// First observation time [default: 0.1]
    #[arg(long)]
    pub t0: Option<f64>,
    /// Last observation time [default: 10]
    #[arg(long)]
    pub t1: Option<f64>,
    /// Log-spaced observation times [default: 16]
    #[arg(long)]
    pub times: Option<usize>,
    /// Fit the exponent of ⟨x²⟩ ∝ t^η and compare with α/β
    #[arg(long)]
    pub fit_eta: bool,
    /// Allowed |η̂ - α/β| for --fit-eta [default: 0.05]
    #[arg(long)]
    pub eta_tolerance: Option<f64>,
    /// Write the final walker positions
    #[arg(long)]
    pub snapshot: bool,
    /// Sample a symmetric stable law of this stability index 2β instead of walking
    #[arg(long, value_name = "STABILITY")]
    pub levy: Option<f64>,
    /// Order of the absolute moment studied with --levy [default: 2]
    #[arg(long)]
    pub moment: Option<f64>,
    /// Tabulate the moment against sample size over many seeds
    #[arg(long)]
    pub demo_divergence: bool,
    /// Smallest sample size is 10^this [default: 3]
    #[arg(long)]
    pub min_decade: Option<u32>,
    /// Largest sample size is 10^this [default: 6]
    #[arg(long)]
    pub max_decade: Option<u32>,
    /// Seeds of the divergence demo [default: 20]
    #[arg(long)]
    pub seeds: Option<usize>,
}

impl Experiment for WalkArgs {
    const NAME: &'static str = "walk";

    fn resolve(mut self) -> Result<Self> {
        if let Some(stability) = self.levy {
            if !(stability > 0.0 && stability < 2.0) {
                return Err(CliError::Config(format!(
                    "stability must lie in (0, 2), got {stability}"
                )));
            }
            if self.fit_eta || self.snapshot {
                return Err(CliError::Config(
                    "--fit-eta and --snapshot apply to walkers, not --levy".into(),
                ));
            }
            self.moment.get_or_insert(2.0);
            if self.demo_divergence {
                let lo = *self.min_decade.get_or_insert(3);
                let hi = *self.max_decade.get_or_insert(6);
                self.seeds.get_or_insert(20);
                if hi < lo + 2 {
                    return Err(CliError::Config("need max_decade >= min_decade + 2".into()));
                }
            } else {
                self.walkers.get_or_insert(100_000);
            }
            return Ok(self);
        }
        if self.demo_divergence {
            return Err(CliError::Config("--demo-divergence needs --levy".into()));
        }
        FractalIndices::new(*self.alpha.get_or_insert(1.0), *self.beta.get_or_insert(1.0))?;
        let d = *self.diffusivity.get_or_insert(1.0);
        if !(d > 0.0) {
            return Err(CliError::Config(format!("diffusivity must be > 0, got {d}")));
        }
        let n = *self.walkers.get_or_insert(100_000);
        if n < 2 {
            return Err(CliError::Config("need at least 2 walkers".into()));
        }
        log_schedule(
            *self.t0.get_or_insert(0.1),
            *self.t1.get_or_insert(10.0),
            *self.times.get_or_insert(16),
        )?;
        if self.fit_eta {
            self.eta_tolerance.get_or_insert(0.05);
        }
        Ok(self)
    }

    fn run(&self, globals: &Globals, out: &Output) -> Result<()> {
        match self.levy {
            Some(stability) if self.demo_divergence => self.divergence(stability, globals.seed, out),
            Some(stability) => self.levy_samples(stability, globals.seed, out),
            None => self.walk(globals.seed, out),
        }
    }
}

impl WalkArgs {
    fn walk(&self, seed: u64, out: &Output) -> Result<()> {
        let idx = FractalIndices::new(self.alpha.unwrap_or(1.0), self.beta.unwrap_or(1.0))?;
        let d = self.diffusivity.unwrap_or(1.0);
        let times = log_schedule(
            self.t0.unwrap_or(0.1),
            self.t1.unwrap_or(10.0),
            self.times.unwrap_or(16),
        )?;
        let stats = walk_ensemble(idx, d, &times, self.walkers.unwrap_or(100_000), seed)?;
        let g = StretchedGaussian::line(idx, d)?;
        let exact = times
            .iter()
            .map(|&t| moment_2beta(&g, t))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        out.table(
            "moments",
            &[
                "t",
                "msd",
                "msd_stderr",
                "moment_2beta",
                "moment_2beta_stderr",
                "moment_2beta_exact",
            ],
            &[
                &times,
                &stats.msd,
                &stats.msd_stderr,
                &stats.moment_2beta,
                &stats.moment_2beta_stderr,
                &exact,
            ],
        )?;
        if self.snapshot {
            out.table("snapshot", &["x"], &[&stats.last.positions])?;
        }
        out.plot(
            "moments",
            &Plot::new("walker moments", "t", "moment")
                .log_log()
                .with(Series::new("<x^2>", &times, &stats.msd))
                .with(Series::new("<|x|^2b>", &times, &stats.moment_2beta))
                .with(Series::new("2 D t^a", &times, &exact)),
        )?;
        if !self.fit_eta {
            print_json(
                &json!({"schema_version": SCHEMA_VERSION, "times": times.len(), "walkers": stats.last.positions.len()}),
            );
            return Ok(());
        }
        let fit = estimate_msd_exponent(&stats)?;
        let expected = idx.eta();
        let tol = self.eta_tolerance.unwrap_or(0.05);
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "eta_hat": fit.eta_hat,
            "stderr": fit.stderr,
            "window": [fit.window.0, fit.window.1],
            "points": fit.points,
            "eta_expected": expected,
            "tolerance": tol,
        });
        out.json("fit", &report)?;
        print_json(&report);
        if !((fit.eta_hat - expected).abs() <= tol) {
            return Err(CliError::Tolerance(format!(
                "fitted exponent {} is more than {tol} from {expected}",
                fit.eta_hat
            )));
        }
        Ok(())
    }

    fn levy_samples(&self, stability: f64, seed: u64, out: &Output) -> Result<()> {
        let mut xs = sample_levy(stability, self.walkers.unwrap_or(100_000), seed)?;
        let ks = linspace(0.0, 3.0, 31);
        let empirical: Vec<f64> = ks
            .iter()
            .map(|&k| mean_and_stderr(&xs.iter().map(|x| (k * x).cos()).collect::<Vec<_>>()).0)
            .collect();
        let exact: Vec<f64> = ks.iter().map(|k| (-k.powf(stability)).exp()).collect();
        out.table(
            "characteristic",
            &["k", "empirical", "exact"],
            &[&ks, &empirical, &exact],
        )?;
        out.plot(
            "characteristic",
            &Plot::new("characteristic function", "k", "E cos(kx)")
                .with(Series::new("empirical", &ks, &empirical))
                .with(Series::new("exp(-k^a)", &ks, &exact)),
        )?;
        let order = self.moment.unwrap_or(2.0);
        let (moment, stderr) = mean_and_stderr(&xs.iter().map(|x| x.abs().powf(order)).collect::<Vec<_>>());
        xs.sort_by(f64::total_cmp);
        let q = |p: f64| xs[((xs.len() - 1) as f64 * p).round() as usize];
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "stability": stability,
            "samples": xs.len(),
            "median": q(0.5),
            "iqr": q(0.75) - q(0.25),
            "order": order,
            "abs_moment": moment,
            "abs_moment_stderr": stderr,
        });
        out.json("levy", &report)?;
        print_json(&report);
        Ok(())
    }

    fn divergence(&self, stability: f64, seed: u64, out: &Output) -> Result<()> {
        let sizes = half_decade_sizes(self.min_decade.unwrap_or(3), self.max_decade.unwrap_or(6));
        let order = self.moment.unwrap_or(2.0);
        let table = diverging_moment_demo(stability, order, &sizes, self.seeds.unwrap_or(20), seed)?;
        let size_col: Vec<f64> = table.sizes.iter().map(|&s| s as f64).collect();
        let names: Vec<String> = (0..table.moments.len()).map(|s| format!("seed_{s}")).collect();
        let per_seed: Vec<Vec<f64>> = table.moments.clone();
        let mut header = vec!["size", "pooled"];
        header.extend(names.iter().map(String::as_str));
        let mut columns: Vec<&[f64]> = vec![&size_col, &table.pooled];
        columns.extend(per_seed.iter().map(Vec::as_slice));
        out.table("growth", &header, &columns)?;
        out.plot(
            "growth",
            &Plot::new("absolute moment against sample size", "samples", "moment")
                .log_log()
                .with(Series::new("pooled", &size_col, &table.pooled)),
        )?;
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "stability": table.stability,
            "order": table.order,
            "sizes": table.sizes,
            "pooled": table.pooled,
            "trend": table.trend,
            "trend_lower": table.trend_lower,
            "last_change": table.last_change,
            "verdict": table.verdict,
        });
        out.json("verdict", &report)?;
        print_json(&report);
        Ok(())
    }
}

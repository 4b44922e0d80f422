//! Monte Carlo walkers, stretched-Gaussian and symmetric stable samplers,
//! MSD-exponent fits and the diverging-moment demonstration.
//!
//! Randomness comes from ChaCha8 streams keyed by `(seed, stream)`: one
//! stream per walker, or per block of [`BLOCK`] samples for the i.i.d.
//! samplers. Reductions use a fixed pairwise order, so every result is
//! independent of the number of worker threads.

use std::f64::consts::PI;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::StretchedGaussian;
use crate::error::{config, domain, Error, Result};
use crate::fabric::{signed_pow, FractalIndices};

/// Samples drawn from one RNG stream by the i.i.d. samplers.
pub const BLOCK: usize = 1024;

/// Walker groups used for jackknife standard errors.
const JACKKNIFE_GROUPS: usize = 32;

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draw `n` values with `draw`, block `b` using stream `b`.
fn blocked_samples(n: usize, seed: u64, draw: impl Fn(&mut ChaCha8Rng) -> f64 + Sync) -> Vec<f64> {
    let mut out = vec![0.0; n];
    out.par_chunks_mut(BLOCK).enumerate().for_each(|(b, chunk)| {
        let mut rng = stream(seed, b as u64);
        for v in chunk {
            *v = draw(&mut rng);
        }
    });
    out
}

/// Sum in a fixed binary-tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Sample mean and its standard error.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Positions at time `t` drawn from the stretched Gaussian: `ŷ ~ N(0, 2Dt^α)`
/// mapped to `x = sign(ŷ)|ŷ|^{1/β}`.
pub fn sample_stretched_gaussian(g: &StretchedGaussian, t: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(domain(format!("time must be > 0, got {t}")));
    }
    if n == 0 {
        return Err(domain("sample count must be >= 1"));
    }
    let sd = g.hat_variance(t).sqrt();
    let inv_beta = 1.0 / g.indices().beta();
    Ok(blocked_samples(n, seed, |rng| {
        let y: f64 = rng.sample::<f64, _>(StandardNormal) * sd;
        signed_pow(y, inv_beta)
    }))
}

/// Walkers at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkerEnsemble {
    pub positions: Vec<f64>,
    pub elapsed: f64,
    pub idx: FractalIndices,
    pub seed: u64,
}

/// Moments of a walker ensemble over an observation schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    /// `⟨x²⟩` at each time.
    pub msd: Vec<f64>,
    pub msd_stderr: Vec<f64>,
    /// `⟨|x|^{2β}⟩` at each time.
    pub moment_2beta: Vec<f64>,
    pub moment_2beta_stderr: Vec<f64>,
    /// `⟨x²⟩` per walker group, `group_msd[g][time]`, for jackknife errors.
    pub group_msd: Vec<Vec<f64>>,
    pub group_sizes: Vec<usize>,
    pub last: WalkerEnsemble,
}

/// Brownian walkers in hatted coordinates, observed in physical ones.
///
/// Each walker takes exact Gaussian increments `N(0, 2D Δt̂)` between the
/// observation times, so the positions follow the stretched Gaussian at
/// every time in `schedule`.
pub fn walk_ensemble(
    idx: FractalIndices,
    diffusivity: f64,
    schedule: &[f64],
    n: usize,
    seed: u64,
) -> Result<EnsembleStats> {
    if !(diffusivity.is_finite() && diffusivity > 0.0) {
        return Err(domain(format!("diffusivity must be > 0, got {diffusivity}")));
    }
    if n == 0 {
        return Err(domain("walker count must be >= 1"));
    }
    if schedule.is_empty() || !(schedule[0] > 0.0) || schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("observation times must be positive and increasing"));
    }
    let m = schedule.len();
    let alpha = idx.alpha();
    let inv_beta = 1.0 / idx.beta();
    let step_sd: Vec<f64> = std::iter::once(schedule[0].powf(alpha))
        .chain(schedule.windows(2).map(|w| w[1].powf(alpha) - w[0].powf(alpha)))
        .map(|dt_hat| (2.0 * diffusivity * dt_hat).sqrt())
        .collect();

    // hatted positions, walker-major
    let mut hat = vec![0.0; n * m];
    hat.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
        let mut rng = stream(seed, i as u64);
        let mut y = 0.0;
        for (slot, sd) in row.iter_mut().zip(&step_sd) {
            y += sd * rng.sample::<f64, _>(StandardNormal);
            *slot = y;
        }
    });

    let groups = JACKKNIFE_GROUPS.min(n);
    let bounds: Vec<usize> = (0..=groups).map(|g| g * n / groups).collect();
    let mut msd = Vec::with_capacity(m);
    let mut msd_stderr = Vec::with_capacity(m);
    let mut moment_2beta = Vec::with_capacity(m);
    let mut moment_2beta_stderr = Vec::with_capacity(m);
    let mut group_msd = vec![Vec::with_capacity(m); groups];
    for j in 0..m {
        let sq: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| signed_pow(hat[i * m + j], inv_beta).powi(2))
            .collect();
        let hat_sq: Vec<f64> = (0..n).map(|i| hat[i * m + j].powi(2)).collect();
        let (a, sa) = mean_and_stderr(&sq);
        let (b, sb) = mean_and_stderr(&hat_sq);
        msd.push(a);
        msd_stderr.push(sa);
        moment_2beta.push(b);
        moment_2beta_stderr.push(sb);
        for g in 0..groups {
            let part = &sq[bounds[g]..bounds[g + 1]];
            group_msd[g].push(pairwise_sum(part) / part.len() as f64);
        }
    }
    let last = WalkerEnsemble {
        positions: (0..n).map(|i| signed_pow(hat[i * m + m - 1], inv_beta)).collect(),
        elapsed: schedule[m - 1],
        idx,
        seed,
    };
    Ok(EnsembleStats {
        times: schedule.to_vec(),
        msd,
        msd_stderr,
        moment_2beta,
        moment_2beta_stderr,
        group_msd,
        group_sizes: bounds.windows(2).map(|w| w[1] - w[0]).collect(),
        last,
    })
}

/// `n` observation times spaced evenly in `log t` over `[t0, t1]`.
pub fn log_schedule(t0: f64, t1: f64, n: usize) -> Result<Vec<f64>> {
    if !(t0 > 0.0 && t1 > t0) || n < 2 {
        return Err(domain("need 0 < t0 < t1 and at least two times"));
    }
    let (l0, l1) = (t0.ln(), t1.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => t0,
            _ if i + 1 == n => t1,
            _ => (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

/// Log-log fit of `⟨x²⟩ ∝ t^η`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsdFit {
    pub eta_hat: f64,
    /// Delete-one-group jackknife error of the slope; the observation
    /// times share walkers, so plain regression errors would be too small.
    pub stderr: f64,
    pub window: (f64, f64),
    pub points: usize,
}

fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn log_msd(msd: &[f64]) -> Result<Vec<f64>> {
    msd.iter()
        .map(|&v| {
            if v > 0.0 && v.is_finite() {
                Ok(v.ln())
            } else {
                Err(Error::Internal(format!("nonpositive mean square displacement {v}")))
            }
        })
        .collect()
}

pub fn estimate_msd_exponent(stats: &EnsembleStats) -> Result<MsdFit> {
    let t = &stats.times;
    if t.len() < 8 {
        return Err(config(format!(
            "an exponent fit needs at least 8 times, got {}",
            t.len()
        )));
    }
    if (t[t.len() - 1] / t[0]).log10() < 1.5 {
        return Err(config("observation times must span at least 1.5 decades"));
    }
    let lt: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let eta_hat = ols_slope(&lt, &log_msd(&stats.msd)?);

    let groups = stats.group_msd.len();
    let total: usize = stats.group_sizes.iter().sum();
    let mut stderr = 0.0;
    if groups >= 2 {
        let slopes = (0..groups)
            .map(|skip| {
                let rest = (total - stats.group_sizes[skip]) as f64;
                let msd: Vec<f64> = (0..t.len())
                    .map(|j| {
                        let sum: f64 = (0..groups)
                            .filter(|&g| g != skip)
                            .map(|g| stats.group_msd[g][j] * stats.group_sizes[g] as f64)
                            .sum();
                        sum / rest
                    })
                    .collect();
                Ok(ols_slope(&lt, &log_msd(&msd)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let g = groups as f64;
        let mean = slopes.iter().sum::<f64>() / g;
        stderr = ((g - 1.0) / g * slopes.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()).sqrt();
    }
    Ok(MsdFit {
        eta_hat,
        stderr,
        window: (t[0], t[t.len() - 1]),
        points: t.len(),
    })
}

fn check_stability(stability: f64) -> Result<()> {
    if stability > 0.0 && stability < 2.0 {
        Ok(())
    } else {
        Err(domain(format!("stability index must lie in (0, 2), got {stability}")))
    }
}

/// Symmetric stable samples with characteristic function `exp(-|k|^a)`,
/// by the Chambers–Mallows–Stuck construction.
pub fn sample_levy(stability: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_stability(stability)?;
    let a = stability;
    Ok(blocked_samples(n, seed, |rng| {
        let v = PI * (rng.sample::<f64, _>(Open01) - 0.5);
        let w: f64 = rng.sample(Exp1);
        if a == 1.0 {
            return v.tan();
        }
        (a * v).sin() / v.cos().powf(1.0 / a) * (((1.0 - a) * v).cos() / w).powf((1.0 - a) / a)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentVerdict {
    /// Significant upward trend across sample sizes.
    Diverging,
    /// Pooled moment changes by at most 5% between the two largest sizes.
    Converging,
    Inconclusive,
}

/// Empirical absolute moments of stable samples against sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub stability: f64,
    pub order: f64,
    pub sizes: Vec<usize>,
    /// `moments[seed][size]`: running moment over the first `size` samples.
    pub moments: Vec<Vec<f64>>,
    /// Mean over seeds per size.
    pub pooled: Vec<f64>,
    /// Mean Mann–Kendall statistic of the log-moments over seeds.
    pub trend: f64,
    /// Lower 1% bootstrap bound of `trend`.
    pub trend_lower: f64,
    /// Relative change of `pooled` between the two largest sizes.
    pub last_change: f64,
    pub verdict: MomentVerdict,
}

fn mann_kendall(values: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            s += (values[j] - values[i]).signum();
        }
    }
    s
}

/// Running `order`-th absolute moments at each size, one sequence per seed.
pub fn diverging_moment_demo(
    stability: f64,
    order: f64,
    sizes: &[usize],
    seeds: usize,
    seed: u64,
) -> Result<GrowthTable> {
    check_stability(stability)?;
    if !(order > 0.0) {
        return Err(domain(format!("moment order must be > 0, got {order}")));
    }
    if sizes.len() < 5 || sizes[0] == 0 || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(config("need at least 5 increasing positive sample sizes"));
    }
    if seeds < 20 {
        return Err(config(format!("need at least 20 seeds, got {seeds}")));
    }
    let largest = sizes[sizes.len() - 1];
    let moments: Vec<Vec<f64>> = (0..seeds)
        .map(|s| {
            let xs = sample_levy(stability, largest, seed.wrapping_add(s as u64))?;
            let powers: Vec<f64> = xs.par_iter().map(|x| x.abs().powf(order)).collect();
            Ok(sizes.iter().map(|&n| pairwise_sum(&powers[..n]) / n as f64).collect())
        })
        .collect::<Result<_>>()?;
    let pooled: Vec<f64> = (0..sizes.len())
        .map(|j| moments.iter().map(|m| m[j]).sum::<f64>() / seeds as f64)
        .collect();
    let scores: Vec<f64> = moments
        .iter()
        .map(|m| mann_kendall(&m.iter().map(|v| v.ln()).collect::<Vec<_>>()))
        .collect();
    let trend = scores.iter().sum::<f64>() / seeds as f64;

    // bootstrap over seeds for the lower 1% bound of the mean score
    let mut rng = stream(seed, u64::MAX);
    let mut boot: Vec<f64> = (0..2000)
        .map(|_| (0..seeds).map(|_| scores[rng.random_range(0..seeds)]).sum::<f64>() / seeds as f64)
        .collect();
    boot.sort_by(f64::total_cmp);
    let trend_lower = boot[boot.len() / 100];

    let k = pooled.len();
    let last_change = (pooled[k - 1] - pooled[k - 2]).abs() / pooled[k - 2];
    let verdict = if last_change <= 0.05 {
        MomentVerdict::Converging
    } else if trend_lower > 0.0 {
        MomentVerdict::Diverging
    } else {
        MomentVerdict::Inconclusive
    };
    Ok(GrowthTable {
        stability,
        order,
        sizes: sizes.to_vec(),
        moments,
        pooled,
        trend,
        trend_lower,
        last_change,
        verdict,
    })
}

/// Half-decade sample sizes from `10^lo` to `10^hi`.
pub fn half_decade_sizes(lo: u32, hi: u32) -> Vec<usize> {
    (2 * lo..=2 * hi)
        .map(|k| 10f64.powf(k as f64 / 2.0).round() as usize)
        .collect()
}

//! Scaled Planck relations and a numerical plane-wave check of the free
//! Schrödinger equation in hatted coordinates.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::fabric::{hausdorff_derivative, FractalIndices, SampledField};

/// Fabric plus the two scaled Planck constants and the particle mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumFabric {
    idx: FractalIndices,
    h_alpha: f64,
    h_beta: f64,
    mass: f64,
}

impl QuantumFabric {
    pub fn new(idx: FractalIndices, h_alpha: f64, h_beta: f64, mass: f64) -> Result<Self> {
        for (name, v) in [("h_alpha", h_alpha), ("h_beta", h_beta), ("mass", mass)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(Self {
            idx,
            h_alpha,
            h_beta,
            mass,
        })
    }

    pub fn indices(&self) -> FractalIndices {
        self.idx
    }

    pub fn h_alpha(&self) -> f64 {
        self.h_alpha
    }

    pub fn h_beta(&self) -> f64 {
        self.h_beta
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `E = h_α ν^α`.
    pub fn energy_of_frequency(&self, nu: f64) -> Result<f64> {
        if !(nu >= 0.0) {
            return Err(domain(format!("frequency must be >= 0, got {nu}")));
        }
        Ok(self.h_alpha * nu.powf(self.idx.alpha()))
    }

    /// `p = h_β k^β`.
    pub fn momentum_of_wavenumber(&self, k: f64) -> Result<f64> {
        if !(k >= 0.0) {
            return Err(domain(format!("wavenumber must be >= 0, got {k}")));
        }
        Ok(self.h_beta * k.powf(self.idx.beta()))
    }

    /// Frequency with `h_α ν^α = (h_β k^β)² / 2m`.
    pub fn free_dispersion(&self, k: f64) -> Result<f64> {
        let p = self.momentum_of_wavenumber(k)?;
        Ok((p * p / (2.0 * self.mass * self.h_alpha)).powf(1.0 / self.idx.alpha()))
    }

    /// Kinetic energy `p² / 2m` at wavenumber `k`.
    pub fn kinetic_energy(&self, k: f64) -> Result<f64> {
        let p = self.momentum_of_wavenumber(k)?;
        Ok(p * p / (2.0 * self.mass))
    }
}

/// One row of a dispersion table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub k: f64,
    pub nu: f64,
    pub energy: f64,
    pub momentum: f64,
}

/// `(k, ν, E, p)` on `n` evenly spaced wavenumbers in `[0, k_max]`.
pub fn dispersion_table(qf: &QuantumFabric, k_max: f64, n: usize) -> Result<Vec<DispersionRow>> {
    if !(k_max > 0.0) || n < 2 {
        return Err(domain("need k_max > 0 and at least two rows"));
    }
    (0..n)
        .map(|i| {
            let k = k_max * i as f64 / (n - 1) as f64;
            let nu = qf.free_dispersion(k)?;
            Ok(DispersionRow {
                k,
                nu,
                energy: qf.energy_of_frequency(nu)?,
                momentum: qf.momentum_of_wavenumber(k)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceDerivative {
    /// FFT on a periodic window holding whole wavelengths.
    Spectral,
    /// Second-order central differences.
    FiniteDifference,
}

/// Discretisation of the plane-wave check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveGrid {
    pub method: SpaceDerivative,
    pub points_per_wavelength: usize,
    pub wavelengths: usize,
    /// Hatted time step times `ν̂`.
    pub phase_step: f64,
    /// Multiplies the frequency from the dispersion relation; 1 for the
    /// genuine check, anything else gives a negative control.
    pub nu_scale: f64,
}

impl Default for PlaneWaveGrid {
    fn default() -> Self {
        Self {
            method: SpaceDerivative::Spectral,
            points_per_wavelength: 32,
            wavelengths: 2,
            phase_step: 1e-5,
            nu_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveResidual {
    /// `max |iħ_α ∂Ψ/∂t̂ + (ħ_β²/2m) ∂²Ψ/∂x̂²|` over the grid, divided by
    /// `E_k max|Ψ|`.
    pub residual: f64,
    pub k_hat: f64,
    pub nu_hat: f64,
    pub points: usize,
}

/// Evaluates `Ψ = exp(i k̂ x̂ - i ν̂ t̂)` with `k̂ = k^β`, `ν̂ = ν^α` and checks
/// `i h_α ∂Ψ/∂t̂ = -(h_β²/2m) ∂²Ψ/∂x̂²` numerically. The time derivative is
/// the Hausdorff derivative on physical times `t = t̂^{1/α}`.
pub fn plane_wave_residual(qf: &QuantumFabric, k: f64, grid: &PlaneWaveGrid) -> Result<PlaneWaveResidual> {
    if grid.points_per_wavelength < 16 {
        return Err(config(format!(
            "{} points per wavelength under-resolve the wave; at least 16 are needed",
            grid.points_per_wavelength
        )));
    }
    if grid.wavelengths == 0 || !(grid.phase_step > 0.0) || !(grid.nu_scale > 0.0) {
        return Err(config("wavelengths, phase step and frequency scale must be positive"));
    }
    let idx = qf.indices();
    let k_hat = qf.momentum_of_wavenumber(k)? / qf.h_beta();
    let nu = qf.free_dispersion(k)? * grid.nu_scale;
    let nu_hat = nu.powf(idx.alpha());
    let kinetic = qf.kinetic_energy(k)?;
    let n = grid.points_per_wavelength * grid.wavelengths;
    if k_hat == 0.0 {
        // constant wave function, both sides vanish
        return Ok(PlaneWaveResidual {
            residual: (qf.h_alpha() * nu_hat).abs(),
            k_hat,
            nu_hat,
            points: n,
        });
    }
    let length = grid.wavelengths as f64 * 2.0 * PI / k_hat;
    let dx = length / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 * dx).collect();

    // five hatted times around a centre of unit phase
    let omega = nu_hat.max(f64::MIN_POSITIVE);
    let centre = 1.0 / omega;
    let dt_hat = grid.phase_step / omega;
    let t_hat: Vec<f64> = (0..5).map(|j| centre + (j as f64 - 2.0) * dt_hat).collect();
    let t_phys: Vec<f64> = t_hat.iter().map(|&s| s.powf(1.0 / idx.alpha())).collect();
    let psi = |x: f64, s: f64| Complex64::from_polar(1.0, k_hat * x - nu_hat * s);

    let lhs: Vec<Complex64> = xs
        .iter()
        .map(|&x| {
            let series = SampledField::new(t_phys.clone(), t_hat.iter().map(|&s| psi(x, s)).collect())?;
            let dpsi = hausdorff_derivative(&series, idx.alpha(), 2)?;
            Ok(Complex64::new(0.0, qf.h_alpha()) * dpsi)
        })
        .collect::<Result<_>>()?;

    let now: Vec<Complex64> = xs.iter().map(|&x| psi(x, t_hat[2])).collect();
    let second = match grid.method {
        SpaceDerivative::Spectral => spectral_second_derivative(&now, length),
        SpaceDerivative::FiniteDifference => (0..n)
            .map(|i| (now[(i + 1) % n] - now[i] * 2.0 + now[(i + n - 1) % n]) / (dx * dx))
            .collect(),
    };
    let coef = qf.h_beta() * qf.h_beta() / (2.0 * qf.mass());
    let worst = lhs
        .iter()
        .zip(&second)
        .map(|(l, d2)| (l + d2 * coef).norm())
        .fold(0.0, f64::max);
    let peak = now.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(PlaneWaveResidual {
        residual: worst / (kinetic * peak),
        k_hat,
        nu_hat,
        points: n,
    })
}

fn spectral_second_derivative(values: &[Complex64], length: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut planner = FftPlanner::new();
    let mut buf = values.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, v) in buf.iter_mut().enumerate() {
        let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        let kappa = 2.0 * PI * m / length;
        *v *= -kappa * kappa / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fabric(a: f64, b: f64, m: f64) -> QuantumFabric {
        QuantumFabric::new(FractalIndices::new(a, b).unwrap(), 1.0, 1.0, m).unwrap()
    }

    #[test]
    fn relation_examples() {
        let q = fabric(0.5, 2.0 / 3.0, 1.0);
        assert!((q.energy_of_frequency(4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((q.momentum_of_wavenumber(8.0).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(q.energy_of_frequency(0.0).unwrap(), 0.0);
        assert_eq!(q.free_dispersion(0.0).unwrap(), 0.0);
        assert!(q.energy_of_frequency(-1.0).is_err());
        assert!(q.momentum_of_wavenumber(-1.0).is_err());
        let c = fabric(1.0, 1.0, 0.5);
        assert!((c.free_dispersion(3.0).unwrap() - 9.0).abs() < 1e-13);
        let m = 0.8;
        let s = fabric(0.5, 1.0, m);
        assert!((s.free_dispersion(1.0).unwrap() - (1.0 / (2.0 * m)).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn invalid_fabric() {
        let idx = FractalIndices::classical();
        assert!(QuantumFabric::new(idx, 0.0, 1.0, 1.0).is_err());
        assert!(QuantumFabric::new(idx, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let q = fabric(0.5, 2.0 / 3.0, 1.0);
        let grid = PlaneWaveGrid {
            points_per_wavelength: 12,
            ..PlaneWaveGrid::default()
        };
        assert!(matches!(
            plane_wave_residual(&q, 2.0, &grid),
            Err(crate::Error::Config(_))
        ));
    }
}

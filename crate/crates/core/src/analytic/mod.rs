//! Closed-form densities, moments and relaxation curves.
//!
//! The stretched Gaussian is the heat kernel of the hatted coordinates
//! pulled back through `x̂ = sign(x)|x|^β`, `t̂ = t^α`. Its normalisation is
//! obtained from that change of variables, so every density here carries
//! unit mass.

mod comparison;
mod mittag_leffler;

use std::f64::consts::PI;

use libm::{erf, erfc};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur, ln_gamma};

pub use comparison::{porta_fit, printed_richardson_pdf, FoxAsymptotic, PortaFit, RichardsonKernel};
pub use mittag_leffler::mittag_leffler;

use crate::error::{domain, Result};
use crate::fabric::{signed_pow, FractalIndices};
use crate::quadrature;

/// Heat kernel `(4πDt̂)^{-1/2} exp(-x̂²/4Dt̂)` in hatted coordinates.
pub fn gaussian_hat(diffusivity: f64, x_hat: f64, t_hat: f64) -> f64 {
    let four_dt = 4.0 * diffusivity * t_hat;
    (-x_hat * x_hat / four_dt).exp() / (PI * four_dt).sqrt()
}

/// Stretched-Gaussian Green's function on the fabric `idx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StretchedGaussian {
    idx: FractalIndices,
    diffusivity: f64,
    dim: u32,
    norm_const: f64,
}

impl StretchedGaussian {
    pub fn new(idx: FractalIndices, diffusivity: f64, dim: u32) -> Result<Self> {
        if !(diffusivity.is_finite() && diffusivity > 0.0) {
            return Err(domain(format!("diffusivity must be > 0, got {diffusivity}")));
        }
        if dim == 0 {
            return Err(domain("dimension must be >= 1"));
        }
        // Jacobian of the radial pull-back times the unit-mass hatted kernel,
        // with the time dependence t^{-αd/2} factored out.
        let norm_const = idx.beta() * (4.0 * PI * diffusivity).powf(-0.5 * dim as f64);
        Ok(Self {
            idx,
            diffusivity,
            dim,
            norm_const,
        })
    }

    /// One-dimensional line problem.
    pub fn line(idx: FractalIndices, diffusivity: f64) -> Result<Self> {
        Self::new(idx, diffusivity, 1)
    }

    pub fn indices(&self) -> FractalIndices {
        self.idx
    }

    pub fn diffusivity(&self) -> f64 {
        self.diffusivity
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Time-independent part of the prefactor.
    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// Prefactor of the stretched Gaussian in the form it is usually quoted,
    /// `β / (2(4πD)^{d/2})`.
    pub fn printed_norm_const(&self) -> f64 {
        self.idx.beta() / (2.0 * (4.0 * PI * self.diffusivity).powf(0.5 * self.dim as f64))
    }

    /// Quoted prefactor over the unit-mass prefactor.
    pub fn printed_prefactor_ratio(&self) -> f64 {
        self.printed_norm_const() / self.norm_const
    }

    /// `σ^{2β} = ⟨|Δx|^{2β}⟩ = 2Dt^α`, the variance of `x̂`.
    pub fn hat_variance(&self, t: f64) -> f64 {
        2.0 * self.diffusivity * t.powf(self.idx.alpha())
    }

    fn check_time(t: f64) -> Result<()> {
        if t.is_finite() && t > 0.0 {
            Ok(())
        } else {
            Err(domain(format!("time must be > 0, got {t}")))
        }
    }

    fn check_line(&self) -> Result<()> {
        if self.dim == 1 {
            Ok(())
        } else {
            Err(domain(format!("line density requested from a d = {} kernel", self.dim)))
        }
    }

    /// Density on the line at signed position `x`.
    ///
    /// For `β < 1` the density is integrably infinite at `x = 0` and
    /// `+∞` is returned there; [`Self::cell_density`] gives finite cell
    /// averages for plotting.
    pub fn pdf_line(&self, x: f64, t: f64) -> Result<f64> {
        self.check_line()?;
        Self::check_time(t)?;
        Ok(self.density(x.abs(), t))
    }

    /// Radial density in `d` dimensions, normalised so that
    /// `∫ p(r) S_d r^{d-1} dr = 1`. Equals [`Self::pdf_line`] when `d = 1`.
    pub fn pdf_radial(&self, r: f64, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        if !(r >= 0.0) {
            return Err(domain(format!("radius must be >= 0, got {r}")));
        }
        Ok(self.density(r, t))
    }

    /// Probability per unit radius, `S_d r^{d-1} p(r)`. Where this is
    /// infinite at `r = 0` the average over `[0, r_cell]` is returned.
    pub fn shell_density(&self, r: f64, t: f64, r_cell: f64) -> Result<f64> {
        Self::check_time(t)?;
        if !(r >= 0.0 && r_cell > 0.0) {
            return Err(domain(format!("need r >= 0 and a positive cell, got {r} and {r_cell}")));
        }
        let exponent = self.idx.beta() * self.dim as f64 - 1.0;
        if r > 0.0 {
            // the r̂ density is a d-dimensional Gaussian shell
            let s = 0.5 * self.dim as f64;
            let four_dt = 2.0 * self.hat_variance(t);
            let r_hat = r.powf(self.idx.beta());
            let log_shell = (2.0 / four_dt.powf(s)).ln() - ln_gamma(s) + (2.0 * s - 1.0) * r_hat.ln()
                - r_hat * r_hat / four_dt
                + self.idx.beta().ln()
                + (self.idx.beta() - 1.0) * r.ln();
            Ok(log_shell.exp())
        } else if exponent > 0.0 {
            Ok(0.0)
        } else {
            Ok(self.radial_mass(0.0, r_cell, t)? / r_cell)
        }
    }

    /// Probability that the distance from the origin lies in `[a, b]`.
    pub fn radial_mass(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        if !(b > a && a >= 0.0) {
            return Err(domain(format!("need 0 <= a < b, got [{a}, {b}]")));
        }
        let s = 0.5 * self.dim as f64;
        let four_dt = 2.0 * self.hat_variance(t);
        let tail = |r: f64| {
            let u = r.powf(2.0 * self.idx.beta()) / four_dt;
            if u == 0.0 {
                1.0
            } else {
                gamma_ur(s, u)
            }
        };
        Ok(tail(a) - tail(b))
    }

    fn density(&self, r: f64, t: f64) -> f64 {
        let beta = self.idx.beta();
        let d = self.dim as f64;
        let t_hat = t.powf(self.idx.alpha());
        let r_hat = signed_pow(r, beta);
        let jacobian = if beta == 1.0 {
            1.0
        } else if r == 0.0 {
            return f64::INFINITY;
        } else {
            r.powf((beta - 1.0) * d)
        };
        self.norm_const * t_hat.powf(-0.5 * d) * jacobian * (-r_hat * r_hat / (4.0 * self.diffusivity * t_hat)).exp()
    }

    /// Cumulative distribution on the line.
    pub fn cdf_line(&self, x: f64, t: f64) -> Result<f64> {
        self.check_line()?;
        Self::check_time(t)?;
        let s = (2.0 * self.hat_variance(t)).sqrt();
        Ok(0.5 * erfc(-signed_pow(x, self.idx.beta()) / s))
    }

    /// Probability mass in `[a, b]`, accurate in the tails.
    pub fn cell_mass(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        self.check_line()?;
        Self::check_time(t)?;
        if !(b >= a) {
            return Err(domain(format!("cell bounds out of order: [{a}, {b}]")));
        }
        let s = (2.0 * self.hat_variance(t)).sqrt();
        let beta = self.idx.beta();
        let ua = signed_pow(a, beta) / s;
        let ub = signed_pow(b, beta) / s;
        Ok(if ua >= 0.0 {
            0.5 * (erfc(ua) - erfc(ub))
        } else if ub <= 0.0 {
            0.5 * (erfc(-ub) - erfc(-ua))
        } else {
            0.5 * (erf(ub) - erf(ua))
        })
    }

    /// Mean density over `[a, b]`.
    pub fn cell_density(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        if !(b > a) {
            return Err(domain(format!("empty cell [{a}, {b}]")));
        }
        Ok(self.cell_mass(a, b, t)? / (b - a))
    }

    /// Densities for plotting and CSV output at the nodes `xs`.
    ///
    /// Singular points (`x = 0` with `β < 1`) are replaced by the average
    /// density over the cell reaching to the nearest nonzero node.
    pub fn plot_densities(&self, xs: &[f64], t: f64) -> Result<Vec<f64>> {
        let gap = xs
            .iter()
            .map(|x| x.abs())
            .filter(|&x| x > 0.0)
            .fold(f64::INFINITY, f64::min);
        xs.iter()
            .map(|&x| {
                let p = self.pdf_line(x, t)?;
                if p.is_finite() {
                    Ok(p)
                } else if gap.is_finite() {
                    self.cell_density(0.0, gap, t)
                } else {
                    Ok(f64::MAX)
                }
            })
            .collect()
    }

    /// `⟨|Δx|^p⟩`, from the Gaussian absolute moment of `x̂` of order `p/β`.
    pub fn abs_moment(&self, p: f64, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        self.check_line()?;
        if !(p >= 0.0) {
            return Err(domain(format!("moment order must be >= 0, got {p}")));
        }
        let q = p / self.idx.beta();
        let four_dt = 2.0 * self.hat_variance(t);
        Ok(four_dt.powf(0.5 * q) * gamma(0.5 * (q + 1.0)) / PI.sqrt())
    }

    /// `∫ |x|^p P(x, t) dx` by adaptive quadrature of [`Self::pdf_line`],
    /// independent of the closed forms.
    pub fn quadrature_moment(&self, p: f64, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        self.check_line()?;
        if !(p >= 0.0) {
            return Err(domain(format!("moment order must be >= 0, got {p}")));
        }
        let width = (2.0 * self.hat_variance(t)).sqrt().powf(1.0 / self.idx.beta());
        let est = quadrature::integrate_to_infinity_with_breaks(
            |x| {
                if x == 0.0 {
                    0.0
                } else {
                    2.0 * x.powf(p) * self.pdf_line(x, t).unwrap_or(0.0)
                }
            },
            0.0,
            &[width],
            1e-13,
            1e-12,
        )?;
        Ok(est.value)
    }

    /// Numerical Fourier transform of the hatted kernel at `k̂ = k^β`,
    /// `t̂ = t^α`, by quadrature in `x̂`.
    pub fn fourier_hatted(&self, k: f64, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        if !(k >= 0.0) {
            return Err(domain(format!("wavenumber must be >= 0, got {k}")));
        }
        let k_hat = signed_pow(k, self.idx.beta());
        let t_hat = t.powf(self.idx.alpha());
        let d = self.diffusivity;
        let width = (4.0 * d * t_hat).sqrt();
        let est = quadrature::integrate(
            |u| 2.0 * gaussian_hat(d, u, t_hat) * (k_hat * u).cos(),
            0.0,
            9.0 * width,
            1e-14,
            0.0,
        )?;
        Ok(est.value)
    }

    /// Numerical Fourier transform `∫ P(x,t) cos(kx) dx` in physical `x`.
    pub fn fourier_physical(&self, k: f64, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        self.check_line()?;
        if !(k >= 0.0) {
            return Err(domain(format!("wavenumber must be >= 0, got {k}")));
        }
        let beta = self.idx.beta();
        let t_hat = t.powf(self.idx.alpha());
        let d = self.diffusivity;
        let width = (4.0 * d * t_hat).sqrt();
        // integrate in x̂ to avoid the |x|^{β-1} endpoint singularity
        let est = quadrature::integrate(
            |u| 2.0 * gaussian_hat(d, u, t_hat) * (k * u.powf(1.0 / beta)).cos(),
            0.0,
            9.0 * width,
            1e-13,
            0.0,
        )?;
        Ok(est.value)
    }
}

/// `⟨|Δx|^{2β}⟩ = 2D·Δt^α`.
pub fn moment_2beta(g: &StretchedGaussian, dt: f64) -> Result<f64> {
    if !(dt >= 0.0) {
        return Err(domain(format!("elapsed time must be >= 0, got {dt}")));
    }
    Ok(2.0 * g.diffusivity * dt.powf(g.idx.alpha()))
}

/// Relaxation amplitude of one Fourier mode over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationCurve {
    pub k: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

fn check_curve_args(k: f64, times: &[f64]) -> Result<()> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(domain(format!("wavenumber must be >= 0, got {k}")));
    }
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(domain("sample times must be >= 0"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("sample times must be increasing"));
    }
    Ok(())
}

/// Stretched-exponential relaxation `exp(-D k^{2β} t^α)`.
pub fn relaxation_stretched(g: &StretchedGaussian, k: f64, times: &[f64]) -> Result<RelaxationCurve> {
    check_curve_args(k, times)?;
    let rate = g.diffusivity * k.powf(2.0 * g.idx.beta());
    let alpha = g.idx.alpha();
    let values = times.iter().map(|&t| (-rate * t.powf(alpha)).exp()).collect();
    Ok(RelaxationCurve {
        k,
        times: times.to_vec(),
        values,
    })
}

/// Mittag-Leffler relaxation `E_α(-D k^{2β} t^α)` of the fractional model.
pub fn relaxation_mittag_leffler(g: &StretchedGaussian, k: f64, times: &[f64]) -> Result<RelaxationCurve> {
    check_curve_args(k, times)?;
    let rate = g.diffusivity * k.powf(2.0 * g.idx.beta());
    let alpha = g.idx.alpha();
    let values = times
        .iter()
        .map(|&t| mittag_leffler(alpha, rate * t.powf(alpha)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RelaxationCurve {
        k,
        times: times.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(alpha: f64, beta: f64, d: f64) -> StretchedGaussian {
        StretchedGaussian::line(FractalIndices::new(alpha, beta).unwrap(), d).unwrap()
    }

    #[test]
    fn classical_kernel_at_origin() {
        let g = sg(1.0, 1.0, 1.0);
        let p = g.pdf_line(0.0, 1.0).unwrap();
        assert!((p - (4.0 * PI).powf(-0.5)).abs() < 1e-15);
        assert!((p - 0.28209479177387814).abs() < 1e-15);
    }

    #[test]
    fn pull_back_of_hatted_gaussian() {
        let g = sg(0.8, 0.5, 2.0);
        let t: f64 = 3.0;
        let x: f64 = 1.0;
        let oracle = gaussian_hat(2.0, x.powf(0.5), t.powf(0.8)) * 0.5 * x.powf(-0.5);
        let p = g.pdf_line(x, t).unwrap();
        assert!((p - oracle).abs() <= 1e-14 * oracle);
        assert_eq!(p, g.pdf_line(-x, t).unwrap());
    }

    #[test]
    fn printed_prefactor_is_half() {
        assert_eq!(sg(0.7, 0.4, 1.3).printed_prefactor_ratio(), 0.5);
    }

    #[test]
    fn singular_origin() {
        let g = sg(1.0, 0.5, 1.0);
        assert_eq!(g.pdf_line(0.0, 1.0).unwrap(), f64::INFINITY);
        let rows = g.plot_densities(&[-0.01, 0.0, 0.01], 1.0).unwrap();
        assert!(rows[1].is_finite() && rows[1] > rows[0]);
    }

    #[test]
    fn invalid_arguments() {
        let g = sg(1.0, 0.5, 1.0);
        assert!(g.pdf_line(1.0, 0.0).is_err());
        assert!(g.pdf_line(1.0, -1.0).is_err());
        assert!(StretchedGaussian::line(FractalIndices::classical(), 0.0).is_err());
        assert!(StretchedGaussian::new(FractalIndices::classical(), 1.0, 0).is_err());
        let g3 = StretchedGaussian::new(FractalIndices::classical(), 1.0, 3).unwrap();
        assert!(g3.pdf_line(1.0, 1.0).is_err());
        assert!(g3.pdf_radial(-1.0, 1.0).is_err());
    }

    #[test]
    fn moment_examples() {
        let g = sg(1.0, 1.0, 1.0);
        assert_eq!(moment_2beta(&g, 1.0).unwrap(), 2.0);
        assert_eq!(moment_2beta(&g, 0.0).unwrap(), 0.0);
        let g = sg(0.6, 0.9, 0.5);
        let m = moment_2beta(&g, 10.0).unwrap();
        assert!((m - 10f64.powf(0.6)).abs() < 1e-14);
        assert!((m - 3.98107).abs() < 1e-5);
        assert!(moment_2beta(&g, -1.0).is_err());
        // |x|^{2β} absolute moment agrees with the identity
        assert!((g.abs_moment(1.8, 10.0).unwrap() - m).abs() < 1e-12);
    }

    #[test]
    fn cdf_and_cells() {
        let g = sg(0.7, 2.0 / 3.0, 1.5);
        let t = 2.0;
        assert!((g.cdf_line(0.0, t).unwrap() - 0.5).abs() < 1e-16);
        let m = g.cell_mass(-0.3, 0.7, t).unwrap();
        let m2 = g.cdf_line(0.7, t).unwrap() - g.cdf_line(-0.3, t).unwrap();
        assert!((m - m2).abs() < 1e-15);
        // symmetric tails
        let a = g.cell_mass(30.0, 31.0, t).unwrap();
        let b = g.cell_mass(-31.0, -30.0, t).unwrap();
        assert!(a > 0.0 && (a - b).abs() <= 1e-15 * a);
    }

    #[test]
    fn relaxation_examples() {
        let g = sg(1.0, 1.0, 1.0);
        let c = relaxation_stretched(&g, 0.0, &[0.0, 1.0, 10.0]).unwrap();
        assert_eq!(c.values, vec![1.0, 1.0, 1.0]);
        let c = relaxation_stretched(&g, 1.0, &[1.0]).unwrap();
        assert!((c.values[0] - (-1f64).exp()).abs() < 1e-16);

        let g = sg(0.5, 0.75, 1.0);
        let c = relaxation_stretched(&g, 2.0, &[4.0]).unwrap();
        let expected = (-(2f64.powf(1.5)) * 2.0).exp();
        assert!((c.values[0] - expected).abs() < 1e-15);
        let numeric = g.fourier_hatted(2.0, 4.0).unwrap();
        assert!((numeric - expected).abs() < 1e-10);

        assert!(relaxation_stretched(&g, -1.0, &[1.0]).is_err());
        assert!(relaxation_stretched(&g, 1.0, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn relaxation_is_nonincreasing() {
        let g = sg(0.4, 0.6, 0.7);
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.3).collect();
        let c = relaxation_stretched(&g, 1.3, &times).unwrap();
        assert_eq!(c.values[0], 1.0);
        assert!(c.values.windows(2).all(|w| w[1] <= w[0]));
        assert!(c.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn radial_line_agreement() {
        let g = sg(0.9, 0.6, 1.2);
        for x in [0.1, 0.5, 2.0] {
            assert_eq!(g.pdf_line(x, 1.5).unwrap(), g.pdf_radial(x, 1.5).unwrap());
        }
    }
}

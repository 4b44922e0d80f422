//! Comparison curves: Fox-function asymptotics, Richardson's kernel and the
//! empirical turbulence fit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_lr, gamma_ur};

use super::StretchedGaussian;
use crate::error::{domain, Result};
use crate::fabric::FractalIndices;

/// Stretched-exponential tail of the fractional-time Fox-function density,
/// `|x|^{μ-1} / (B t^{αμ/2}) · exp(-b|x|^μ / t^{αμ/2})`, `μ = 2/(2-α)`.
///
/// `B` and `b` are user inputs; no normalisation is implied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoxAsymptotic {
    alpha: f64,
    big_b: f64,
    small_b: f64,
}

impl FoxAsymptotic {
    pub fn new(alpha: f64, big_b: f64, small_b: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(big_b > 0.0 && small_b > 0.0) {
            return Err(domain("coefficients B and b must be > 0"));
        }
        Ok(Self { alpha, big_b, small_b })
    }

    pub fn mu(&self) -> f64 {
        2.0 / (2.0 - self.alpha)
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(domain(format!("time must be > 0, got {t}")));
        }
        let mu = self.mu();
        let clock = t.powf(0.5 * self.alpha * mu);
        let ax = x.abs();
        Ok(ax.powf(mu - 1.0) / (self.big_b * clock) * (-self.small_b * ax.powf(mu) / clock).exp())
    }
}

/// Green's function of Richardson's radial equation
/// `∂P/∂t = r^{1-d} ∂_r(k0 r^{d+1-2β} ∂_r P)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RichardsonKernel {
    k0: f64,
    beta: f64,
    dim: u32,
}

impl RichardsonKernel {
    pub fn new(k0: f64, beta: f64, dim: u32) -> Result<Self> {
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(domain(format!("k0 must be > 0, got {k0}")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(domain(format!("beta must lie in (0, 1], got {beta}")));
        }
        if dim == 0 {
            return Err(domain("dimension must be >= 1"));
        }
        Ok(Self { k0, beta, dim })
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    fn check(r: f64, t: f64) -> Result<()> {
        if !(t > 0.0) {
            return Err(domain(format!("time must be > 0, got {t}")));
        }
        if !(r >= 0.0) {
            return Err(domain(format!("radius must be >= 0, got {r}")));
        }
        Ok(())
    }

    fn shape(&self, r: f64, t: f64) -> f64 {
        (-r.powf(2.0 * self.beta) / (4.0 * self.k0 * self.beta * self.beta * t)).exp()
    }

    /// Prefactor in the commonly quoted form
    /// `βΓ(d/2) / (π^{d/2} Γ(1/β) (2k0βt)^{d/2β})`.
    pub fn printed_prefactor(&self, t: f64) -> f64 {
        let d = self.dim as f64;
        let b = self.beta;
        b * gamma(0.5 * d) / (PI.powf(0.5 * d) * gamma(1.0 / b) * (2.0 * self.k0 * b * t).powf(0.5 * d / b))
    }

    /// Prefactor giving `∫ P S_d r^{d-1} dr = 1`:
    /// `βΓ(d/2) / (π^{d/2} Γ(d/2β) (4k0β²t)^{d/2β})`.
    pub fn prefactor(&self, t: f64) -> f64 {
        let d = self.dim as f64;
        let b = self.beta;
        b * gamma(0.5 * d) / (PI.powf(0.5 * d) * gamma(0.5 * d / b) * (4.0 * self.k0 * b * b * t).powf(0.5 * d / b))
    }

    /// Quoted over unit-mass prefactor; independent of `t`.
    pub fn prefactor_ratio(&self) -> f64 {
        self.printed_prefactor(1.0) / self.prefactor(1.0)
    }

    pub fn printed_pdf(&self, r: f64, t: f64) -> Result<f64> {
        Self::check(r, t)?;
        Ok(self.printed_prefactor(t) * self.shape(r, t))
    }

    /// Unit-mass density.
    pub fn pdf(&self, r: f64, t: f64) -> Result<f64> {
        Self::check(r, t)?;
        Ok(self.prefactor(t) * self.shape(r, t))
    }

    fn check_line(&self) -> Result<()> {
        if self.dim == 1 {
            Ok(())
        } else {
            Err(domain(format!("line distributions need d = 1, got d = {}", self.dim)))
        }
    }

    fn line_argument(&self, x: f64, t: f64) -> Result<f64> {
        Self::check(x.abs(), t)?;
        Ok(x.abs().powf(2.0 * self.beta) / (4.0 * self.k0 * self.beta * self.beta * t))
    }

    /// Distribution function of the `d = 1` kernel on the whole line.
    pub fn cdf_line(&self, x: f64, t: f64) -> Result<f64> {
        self.check_line()?;
        let u = self.line_argument(x, t)?;
        let half = if u == 0.0 {
            0.0
        } else {
            0.5 * gamma_lr(0.5 / self.beta, u)
        };
        Ok(if x < 0.0 { 0.5 - half } else { 0.5 + half })
    }

    /// Mass of the `d = 1` kernel in `[a, b]`.
    pub fn cell_mass_line(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        self.check_line()?;
        if self.beta == 1.0 {
            // the heat kernel; erf is more accurate than the incomplete gamma
            return StretchedGaussian::line(FractalIndices::classical(), self.k0)?.cell_mass(a, b, t);
        }
        if !(b > a) {
            return Err(domain(format!("empty cell [{a}, {b}]")));
        }
        let s = 0.5 / self.beta;
        // upper tails on one side of the origin avoid cancellation
        let tail = |x: f64| -> Result<f64> {
            let u = self.line_argument(x, t)?;
            Ok(if u == 0.0 { 0.5 } else { 0.5 * gamma_ur(s, u) })
        };
        if a >= 0.0 {
            Ok(tail(a)? - tail(b)?)
        } else if b <= 0.0 {
            Ok(tail(b)? - tail(a)?)
        } else {
            Ok(1.0 - tail(a)? - tail(b)?)
        }
    }
}

/// Three-dimensional radial density in its quoted form
/// `2β r^{β+1} (4πDt)^{-3/2} exp(-r^{2β}/4Dt)`; comparison only.
pub fn printed_richardson_pdf(beta: f64, diffusivity: f64, r: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && diffusivity > 0.0 && r >= 0.0) {
        return Err(domain("need t > 0, D > 0 and r >= 0"));
    }
    Ok(2.0 * beta * r.powf(beta + 1.0) / (4.0 * PI * diffusivity * t).powf(1.5)
        * (-r.powf(2.0 * beta) / (4.0 * diffusivity * t)).exp())
}

/// Parameters of the empirical fit `C exp(-|x|² / ([1 + (a|x|/σ)^v] σ²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortaFit {
    pub c: f64,
    pub a: f64,
    pub v: f64,
    pub sigma: f64,
}

pub fn porta_fit(p: &PortaFit, x: f64) -> Result<f64> {
    if !(p.sigma > 0.0) {
        return Err(domain(format!("sigma must be > 0, got {}", p.sigma)));
    }
    let ax = x.abs();
    let stretch = 1.0 + (p.a * ax / p.sigma).powf(p.v);
    Ok(p.c * (-ax * ax / (stretch * p.sigma * p.sigma)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_masses() {
        let heat = RichardsonKernel::new(0.7, 1.0, 1).unwrap();
        for (a, b) in [(-3.0, -1.0), (-0.2, 0.5), (0.1, 0.3), (2.0, 9.0)] {
            let exact = 0.5 * (libm::erf(b / (2.8f64 * 1.5).sqrt()) - libm::erf(a / (2.8f64 * 1.5).sqrt()));
            assert!((heat.cell_mass_line(a, b, 1.5).unwrap() - exact).abs() < 1e-14);
        }
        let k = RichardsonKernel::new(1.3, 0.6, 1).unwrap();
        let edges: Vec<f64> = (0..=40).map(|i| -20.0 + i as f64).collect();
        let total: f64 = edges
            .windows(2)
            .map(|w| k.cell_mass_line(w[0], w[1], 0.8).unwrap())
            .sum();
        assert!((total - (k.cdf_line(20.0, 0.8).unwrap() - k.cdf_line(-20.0, 0.8).unwrap())).abs() < 1e-13);
        assert!(RichardsonKernel::new(1.0, 0.6, 3).unwrap().cdf_line(1.0, 1.0).is_err());
    }

    #[test]
    fn fox_mu() {
        assert_eq!(FoxAsymptotic::new(1.0, 1.0, 1.0).unwrap().mu(), 2.0);
        let f = FoxAsymptotic::new(0.5, 1.0, 1.0).unwrap();
        assert!((f.mu() - 4.0 / 3.0).abs() < 1e-15);
        for a in [0.01, 0.3, 0.99] {
            let mu = FoxAsymptotic::new(a, 1.0, 1.0).unwrap().mu();
            assert!(mu > 0.0 && mu < 2.0);
        }
        assert_eq!(f.eval(0.0, 1.0).unwrap(), 0.0);
        assert!(FoxAsymptotic::new(0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn fox_gaussian_tail_at_alpha_one() {
        let f = FoxAsymptotic::new(1.0, 2.0, 0.25).unwrap();
        let t = 1.0;
        // log P / |x| ratio: exponent of |x| in the tail is μ = 2
        let lp = |x: f64| (f.eval(x, t).unwrap() * 2.0 * t / x).ln();
        let slope = (lp(20.0) - lp(10.0)) / (20f64.ln() - 10f64.ln());
        let expected = (-0.25 * 400.0 + 0.25 * 100.0) / (2f64.ln());
        assert!((slope - expected).abs() < 1e-9);
    }

    #[test]
    fn richardson_exp_factor_at_origin() {
        let r = RichardsonKernel::new(1.3, 2.0 / 3.0, 3).unwrap();
        assert_eq!(r.pdf(0.0, 2.0).unwrap(), r.prefactor(2.0));
        assert_eq!(r.printed_pdf(0.0, 2.0).unwrap(), r.printed_prefactor(2.0));
        assert!(r.pdf(1.0, 0.0).is_err());
    }

    #[test]
    fn richardson_two_dimensional_forms_agree_up_to_scale() {
        // at d = 2 the gamma factors coincide, leaving (2β)^{1/β}
        let r = RichardsonKernel::new(0.7, 0.6, 2).unwrap();
        assert!((r.prefactor_ratio() - 1.2f64.powf(1.0 / 0.6)).abs() < 1e-12);
    }

    #[test]
    fn porta_examples() {
        let p = PortaFit {
            c: 2.5,
            a: 1.0,
            v: 1.0,
            sigma: 1.0,
        };
        assert_eq!(porta_fit(&p, 0.0).unwrap(), 2.5);
        let p = PortaFit {
            c: 1.0,
            a: 0.0,
            v: 1.7,
            sigma: 1.3,
        };
        let x: f64 = 0.9;
        assert!((porta_fit(&p, x).unwrap() - (-x * x / 1.69).exp()).abs() < 1e-15);
        let p = PortaFit {
            c: 1.0,
            a: 1.0,
            v: 1.0,
            sigma: 1.0,
        };
        assert!((porta_fit(&p, 1.0).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        let p = PortaFit {
            c: 1.0,
            a: 1.0,
            v: 1.0,
            sigma: 0.0,
        };
        assert!(porta_fit(&p, 1.0).is_err());
    }
}

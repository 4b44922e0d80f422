//! Fractal metric transforms and the Hausdorff derivative.
//!
//! A fabric `S^{α,β}` is described by [`FractalIndices`]. Displacements and
//! intervals are carried into hatted coordinates by
//! `x̂ = sign(x)·|x|^β`, `t̂ = t^α`; the signed power keeps the map an odd
//! bijection of the real line so symmetric problems stay symmetric.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Relative gap below which two fractal measures are treated as coincident.
const ILL_CONDITIONED_FACTOR: f64 = 1e3 * f64::EPSILON;

/// The scaling exponents `(α, β)` of time and space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractalIndices {
    alpha: f64,
    beta: f64,
}

impl FractalIndices {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_exponent("alpha", alpha)?;
        check_exponent("beta", beta)?;
        Ok(Self { alpha, beta })
    }

    /// The identity fabric `α = β = 1`.
    pub fn classical() -> Self {
        Self { alpha: 1.0, beta: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// MSD scaling exponent `η = α/β` of `⟨Δx²⟩ ∝ Δt^η`.
    pub fn eta(&self) -> f64 {
        self.alpha / self.beta
    }

    pub fn is_classical(&self) -> bool {
        self.alpha == 1.0 && self.beta == 1.0
    }
}

fn check_exponent(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in (0, 1], got {value}")))
    }
}

/// `sign(x)·|x|^p`, exact when `p == 1`.
#[inline]
pub fn signed_pow(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if x < 0.0 {
        -(-x).powf(p)
    } else {
        x.powf(p)
    }
}

/// Hatted time `t̂ = t^α`.
pub fn time_to_hat(dt: f64, alpha: f64) -> Result<f64> {
    if !(dt >= 0.0) {
        return Err(domain(format!("time interval must be >= 0, got {dt}")));
    }
    Ok(signed_pow(dt, alpha))
}

/// Physical time `t = t̂^{1/α}`.
pub fn time_from_hat(dt_hat: f64, alpha: f64) -> Result<f64> {
    if !(dt_hat >= 0.0) {
        return Err(domain(format!("hatted time interval must be >= 0, got {dt_hat}")));
    }
    Ok(signed_pow(dt_hat, 1.0 / alpha))
}

/// Carry a physical `(Δx, Δt)` into hatted coordinates.
pub fn to_hat(dx: f64, dt: f64, idx: FractalIndices) -> Result<(f64, f64)> {
    let dt_hat = time_to_hat(dt, idx.alpha)?;
    Ok((signed_pow(dx, idx.beta), dt_hat))
}

/// Inverse of [`to_hat`].
pub fn from_hat(dx_hat: f64, dt_hat: f64, idx: FractalIndices) -> Result<(f64, f64)> {
    let dt = time_from_hat(dt_hat, idx.alpha)?;
    Ok((signed_pow(dx_hat, 1.0 / idx.beta), dt))
}

/// A function sampled on a strictly increasing 1-D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField<T = f64> {
    nodes: Vec<f64>,
    values: Vec<T>,
}

impl<T: Copy> SampledField<T> {
    pub fn new(nodes: Vec<f64>, values: Vec<T>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(domain("a sampled field needs at least 2 nodes"));
        }
        if nodes.len() != values.len() {
            return Err(domain(format!("{} nodes but {} values", nodes.len(), values.len())));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(domain("nodes must be finite"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("nodes must be strictly increasing"));
        }
        Ok(Self { nodes, values })
    }

    /// Sample `f` at each node.
    pub fn from_fn(nodes: Vec<f64>, f: impl Fn(f64) -> T) -> Result<Self> {
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self::new(nodes, values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn map_values<U: Copy>(&self, f: impl Fn(T) -> U) -> SampledField<U> {
        SampledField {
            nodes: self.nodes.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<T>) {
        (self.nodes, self.values)
    }
}

/// Values that can be combined linearly by a difference stencil.
pub trait FieldValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> FieldValue for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

fn check_gap(nodes: &[f64], lo: usize, hi: usize) -> Result<f64> {
    let gap = nodes[hi] - nodes[lo];
    let scale = nodes[hi].abs().max(nodes[lo].abs());
    if !(gap > ILL_CONDITIONED_FACTOR * scale) || gap == 0.0 {
        return Err(Error::IllConditioned { lo, hi, gap });
    }
    Ok(gap)
}

/// Ordinary derivative of sampled values at node `at`.
///
/// Three-point second-order stencils on the (possibly non-uniform) grid:
/// central in the interior, one-sided at the two ends. With only two nodes
/// the plain forward quotient is returned.
pub fn central_difference<T: FieldValue>(nodes: &[f64], values: &[T], at: usize) -> Result<T> {
    let n = nodes.len();
    if n < 2 || values.len() != n {
        return Err(domain("need at least 2 nodes with one value each"));
    }
    if at >= n {
        return Err(domain(format!("node index {at} out of range 0..{n}")));
    }
    if n == 2 {
        let h = check_gap(nodes, 0, 1)?;
        return Ok((values[1] - values[0]) * (1.0 / h));
    }
    let f = values;
    if at == 0 {
        let h1 = check_gap(nodes, 0, 1)?;
        let h2 = check_gap(nodes, 1, 2)?;
        let c0 = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
        let c1 = (h1 + h2) / (h1 * h2);
        let c2 = -h1 / (h2 * (h1 + h2));
        Ok(f[0] * c0 + f[1] * c1 + f[2] * c2)
    } else if at == n - 1 {
        let h1 = check_gap(nodes, n - 3, n - 2)?;
        let h2 = check_gap(nodes, n - 2, n - 1)?;
        let c0 = h2 / (h1 * (h1 + h2));
        let c1 = -(h1 + h2) / (h1 * h2);
        let c2 = (2.0 * h2 + h1) / (h2 * (h1 + h2));
        Ok(f[n - 3] * c0 + f[n - 2] * c1 + f[n - 1] * c2)
    } else {
        let h1 = check_gap(nodes, at - 1, at)?;
        let h2 = check_gap(nodes, at, at + 1)?;
        if h1 == h2 {
            return Ok((f[at + 1] - f[at - 1]) * (1.0 / (2.0 * h1)));
        }
        let cm = -h2 / (h1 * (h1 + h2));
        let c0 = (h2 - h1) / (h1 * h2);
        let cp = h1 / (h2 * (h1 + h2));
        Ok(f[at - 1] * cm + f[at] * c0 + f[at + 1] * cp)
    }
}

/// Hausdorff derivative `∂g/∂t^α` at node `at`.
///
/// The nodes are mapped to `t̂ = t^α` and the ordinary derivative is taken
/// there, since `∂g/∂t^α = ∂g/∂t̂`. At `α = 1` this is exactly
/// [`central_difference`] on the original nodes.
pub fn hausdorff_derivative<T: FieldValue>(f: &SampledField<T>, alpha: f64, at: usize) -> Result<T> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if f.nodes[0] < 0.0 {
        return Err(domain("the fractal measure t^alpha needs nonnegative nodes"));
    }
    if alpha == 1.0 {
        return central_difference(&f.nodes, &f.values, at);
    }
    let hatted: Vec<f64> = f.nodes.iter().map(|&t| t.powf(alpha)).collect();
    central_difference(&hatted, &f.values, at)
}

/// Fractal velocity `dx̂/dt̂ = d(x^β)/d(t^α)` of a sampled trajectory.
pub fn fractal_velocity(x_of_t: &SampledField<f64>, idx: FractalIndices, at: usize) -> Result<f64> {
    let hatted = x_of_t.map_values(|x| signed_pow(x, idx.beta));
    hausdorff_derivative(&hatted, idx.alpha, at)
}

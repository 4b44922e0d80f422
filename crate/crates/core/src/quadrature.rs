//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{config, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Default cap on the number of subintervals.
pub const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    let value = k * h;
    let error = ((k - g) * h).abs();
    Piece { a, b, value, error }
}

/// Integrate `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    integrate_with_breaks(f, &[a, b], abs_tol, rel_tol)
}

/// Integrate over consecutive breakpoints (singularities, peaks, kinks).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(config("quadrature breakpoints must be strictly increasing"));
    }
    let mut heap: BinaryHeap<Piece> = breaks.windows(2).map(|w| kronrod(&f, w[0], w[1])).collect();
    loop {
        let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() {
            return Err(config("integrand produced a non-finite value"));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Estimate {
                value,
                abs_error: error,
                intervals: heap.len(),
            });
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(config(format!(
                "quadrature did not reach tolerance: estimate {value:e} ± {error:e}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at machine resolution; accept its estimate
            heap.push(Piece { error: 0.0, ..worst });
            continue;
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

/// Integrate over `[a, ∞)` through the map `x = a + u/(1-u)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    integrate_to_infinity_with_breaks(f, a, &[], abs_tol, rel_tol)
}

/// As [`integrate_to_infinity`] with interior breakpoints `> a` in `x`.
pub fn integrate_to_infinity_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    interior: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    let g = |u: f64| {
        let w = 1.0 - u;
        let x = a + u / w;
        let y = f(x) / (w * w);
        if y.is_finite() {
            y
        } else {
            0.0
        }
    };
    let mut breaks = vec![0.0];
    breaks.extend(interior.iter().map(|&x| {
        let d = x - a;
        d / (1.0 + d)
    }));
    breaks.push(1.0);
    integrate_with_breaks(g, &breaks, abs_tol, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let e = integrate(|x| x.powi(9) - 3.0 * x * x, -1.0, 2.0, 1e-14, 0.0).unwrap();
        assert!((e.value - (102.3 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-3/4} dx = 4
        let e = integrate(|x| x.powf(-0.75), 0.0, 1.0, 1e-11, 0.0).unwrap();
        assert!((e.value - 4.0).abs() < 1e-9, "{}", e.value);
    }

    #[test]
    fn gaussian_on_half_line() {
        let e = integrate_to_infinity(|x| (-x * x).exp(), 0.0, 1e-13, 0.0).unwrap();
        assert!((e.value - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bad_breaks() {
        assert!(integrate(|x| x, 1.0, 1.0, 1e-8, 0.0).is_err());
    }
}

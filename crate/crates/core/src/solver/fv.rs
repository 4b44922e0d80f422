//! Vertex-centred finite volumes with two-point face fluxes.
//!
//! Each node owns the cell between its two faces; the flux through the face
//! between nodes `j-1` and `j` is `F = a_j u_{j-1} - b_j u_j` with
//! nonnegative weights. The operator therefore has nonnegative
//! off-diagonals and zero column sums, so backward Euler is positivity
//! preserving and conserves `Σ vol·u`.

use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};

/// Nodes and the faces bounding their cells (`faces.len() == nodes.len() + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<f64>,
    pub faces: Vec<f64>,
}

impl Mesh {
    /// Faces at node midpoints, outer faces on the end nodes.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(config("a mesh needs at least 3 strictly increasing nodes"));
        }
        let n = nodes.len();
        let mut faces = Vec::with_capacity(n + 1);
        faces.push(nodes[0]);
        faces.extend(nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        faces.push(nodes[n - 1]);
        Ok(Self { nodes, faces })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Cell widths `faces[i+1] - faces[i]`.
    pub fn widths(&self) -> Vec<f64> {
        self.faces.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Outermost nodes held at zero.
    #[default]
    DirichletZero,
    /// Zero flux through the outer faces.
    NoFlux,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Backward Euler.
    #[default]
    Implicit,
    /// Forward Euler, for cross-checks; refuses unstable steps.
    Explicit,
}

/// Semi-discrete operator `vol_i du_i/dt = lower_i u_{i-1} + diag_i u_i + upper_i u_{i+1}`.
#[derive(Debug, Clone)]
pub struct Operator {
    pub volume: Vec<f64>,
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    /// Whether the first and last node are held at zero.
    pub pinned_ends: [bool; 2],
}

/// Interior face data, one entry per face between nodes `j-1` and `j`.
pub struct FaceCoefficients {
    /// Weight of the left node in the rightward flux.
    pub from_left: Vec<f64>,
    /// Weight of the right node in the leftward flux.
    pub from_right: Vec<f64>,
}

impl FaceCoefficients {
    /// Pure diffusion, `F = g (u_{j-1} - u_j)`.
    pub fn symmetric(conductance: Vec<f64>) -> Self {
        Self {
            from_left: conductance.clone(),
            from_right: conductance,
        }
    }
}

impl Operator {
    pub fn assemble(volume: Vec<f64>, faces: &FaceCoefficients, boundary: Boundary) -> Result<Self> {
        let n = volume.len();
        if faces.from_left.len() != n - 1 || faces.from_right.len() != n - 1 {
            return Err(Error::Internal("face coefficient count mismatch".into()));
        }
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for j in 1..n {
            let from_left = faces.from_left[j - 1];
            let from_right = faces.from_right[j - 1];
            // flux F_j = from_left·u_{j-1} - from_right·u_j leaves cell j-1, enters cell j
            lower[j] += from_left;
            diag[j] -= from_right;
            diag[j - 1] -= from_left;
            upper[j - 1] += from_right;
        }
        Ok(Self {
            volume,
            lower,
            diag,
            upper,
            pinned_ends: [boundary == Boundary::DirichletZero; 2],
        })
    }

    pub fn len(&self) -> usize {
        self.volume.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volume.is_empty()
    }

    /// Zero-flux condition at the first node regardless of the boundary
    /// choice, as needed at the centre of radial problems.
    pub fn reflecting_start(mut self) -> Self {
        self.pinned_ends[0] = false;
        self
    }

    fn pinned(&self, i: usize) -> bool {
        (i == 0 && self.pinned_ends[0]) || (i + 1 == self.len() && self.pinned_ends[1])
    }

    /// Largest stable forward-Euler step.
    pub fn explicit_limit(&self) -> f64 {
        (0..self.len())
            .filter(|&i| !self.pinned(i) && self.diag[i] < 0.0)
            .map(|i| self.volume[i] / -self.diag[i])
            .fold(f64::INFINITY, f64::min)
    }

    /// Advance `u` by `steps` steps of size `dt`.
    pub fn advance(&self, u: &mut [f64], dt: f64, steps: usize, scheme: Scheme) -> Result<()> {
        let n = self.len();
        if u.len() != n {
            return Err(Error::Internal("state length mismatch".into()));
        }
        if self.pinned_ends[0] {
            u[0] = 0.0;
        }
        if self.pinned_ends[1] {
            u[n - 1] = 0.0;
        }
        match scheme {
            Scheme::Explicit => {
                let limit = self.explicit_limit();
                if dt > limit {
                    return Err(config(format!(
                        "explicit step {dt:e} exceeds the stability limit {limit:e}"
                    )));
                }
                let mut next = vec![0.0; n];
                for _ in 0..steps {
                    for i in 0..n {
                        if self.pinned(i) {
                            next[i] = 0.0;
                            continue;
                        }
                        let mut flux = self.diag[i] * u[i];
                        if i > 0 {
                            flux += self.lower[i] * u[i - 1];
                        }
                        if i + 1 < n {
                            flux += self.upper[i] * u[i + 1];
                        }
                        next[i] = u[i] + dt * flux / self.volume[i];
                    }
                    u.copy_from_slice(&next);
                }
            }
            Scheme::Implicit => {
                // (vol - dt·L) u^{k+1} = vol·u^k
                let mut a = vec![0.0; n];
                let mut b = vec![0.0; n];
                let mut c = vec![0.0; n];
                for i in 0..n {
                    if self.pinned(i) {
                        b[i] = 1.0;
                    } else {
                        a[i] = -dt * self.lower[i];
                        b[i] = self.volume[i] - dt * self.diag[i];
                        c[i] = -dt * self.upper[i];
                    }
                }
                let solver = Tridiagonal::factor(&a, &b, &c)?;
                let mut rhs = vec![0.0; n];
                for _ in 0..steps {
                    for i in 0..n {
                        rhs[i] = if self.pinned(i) { 0.0 } else { self.volume[i] * u[i] };
                    }
                    solver.solve(&rhs, u);
                }
            }
        }
        Ok(())
    }
}

/// Thomas-algorithm factorisation of a tridiagonal matrix.
pub struct Tridiagonal {
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper_scaled: Vec<f64>,
}

impl Tridiagonal {
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut inv_pivot = vec![0.0; n];
        let mut upper_scaled = vec![0.0; n];
        let mut pivot = diag[0];
        for i in 0..n {
            if i > 0 {
                pivot = diag[i] - lower[i] * upper_scaled[i - 1];
            }
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::Internal(format!("zero pivot in tridiagonal row {i}")));
            }
            inv_pivot[i] = 1.0 / pivot;
            upper_scaled[i] = upper[i] * inv_pivot[i];
        }
        Ok(Self {
            lower: lower.to_vec(),
            inv_pivot,
            upper_scaled,
        })
    }

    pub fn solve(&self, rhs: &[f64], out: &mut [f64]) {
        let n = rhs.len();
        out[0] = rhs[0] * self.inv_pivot[0];
        for i in 1..n {
            out[i] = (rhs[i] - self.lower[i] * out[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            out[i] -= self.upper_scaled[i] * out[i + 1];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_tridiagonal() {
        let a = [0.0, -1.0, -1.0, -1.0];
        let b = [4.0, 4.0, 4.0, 4.0];
        let c = [-1.0, -1.0, -1.0, 0.0];
        let x = [1.0, 2.0, 3.0, 4.0];
        let rhs: Vec<f64> = (0..4)
            .map(|i| {
                b[i] * x[i] + if i > 0 { a[i] * x[i - 1] } else { 0.0 } + if i < 3 { c[i] * x[i + 1] } else { 0.0 }
            })
            .collect();
        let t = Tridiagonal::factor(&a, &b, &c).unwrap();
        let mut out = [0.0; 4];
        t.solve(&rhs, &mut out);
        for i in 0..4 {
            assert!((out[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn column_sums_vanish() {
        let volume = vec![0.5, 1.0, 1.0, 0.5];
        let faces = FaceCoefficients {
            from_left: vec![1.0, 2.0, 0.5],
            from_right: vec![0.3, 4.0, 7.0],
        };
        let op = Operator::assemble(volume, &faces, Boundary::NoFlux).unwrap();
        for j in 0..4 {
            let mut s = op.diag[j];
            if j > 0 {
                s += op.upper[j - 1];
            }
            if j < 3 {
                s += op.lower[j + 1];
            }
            assert!(s.abs() < 1e-14, "column {j}: {s}");
        }
    }
}

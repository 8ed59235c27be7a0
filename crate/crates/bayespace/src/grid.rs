//! Uniform discretization of a bounded interval with trapezoidal quadrature.
//!
//! Everything in this crate — densities, reference measures, clr functions,
//! principal directions — is a vector of values on one shared [`Grid`]. The
//! grid owns the quadrature rule, so "∫ f dλ" is always the same weighted sum
//! and weighted-integral identities hold exactly at the discrete level.
//! Mixed-grid arithmetic is rejected rather than resampled.

use crate::{Error, Result};

/// Equally spaced nodes on `[a, b]` with trapezoidal weights.
///
/// Nodes are `t_k = a + k·h` for `k = 0..n-1` with `h = (b−a)/(n−1)`; the
/// weights are `h/2` at both endpoints and `h` in the interior, so
/// `Σ w_k = b − a` and integration is exact for affine integrands.
#[derive(Debug, Clone)]
pub struct Grid {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl PartialEq for Grid {
    /// Two grids are interchangeable iff they discretize the same interval
    /// with the same node count (nodes/weights are derived data).
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.nodes.len() == other.nodes.len()
    }
}

impl Grid {
    /// Builds the grid, rejecting empty/degenerate intervals and `n < 3`
    /// (the trapezoid rule needs an interior).
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidGrid(format!("bounds must be finite, got [{a}, {b}]")));
        }
        if b <= a {
            return Err(Error::InvalidGrid(format!("need b > a, got [{a}, {b}]")));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 nodes, got {n}")));
        }
        let h = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|k| a + k as f64 * h).collect();
        // Pin the last node to b exactly; k·h accumulates rounding.
        nodes[n - 1] = b;
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        Ok(Grid { a, b, nodes, weights })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 3 by construction
    }

    /// Node spacing `h = (b−a)/(n−1)`.
    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.nodes.len() - 1) as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Trapezoidal `∫ v dλ = Σ_k w_k v_k`.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.nodes.len() {
            return Err(Error::LengthMismatch {
                expected: self.nodes.len(),
                got: values.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum())
    }

    /// Weighted quadrature `Σ_k w_k m_k v_k` — the `L²(M)` pairing against a
    /// measure with λ-density `m`. Callers guarantee equal lengths.
    pub(crate) fn integrate_weighted(&self, m: &[f64], values: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(m)
            .zip(values)
            .map(|((w, m), v)| w * m * v)
            .sum()
    }
}

//! Clamped cubic B-spline basis (Cox–de Boor) used by the smoothing
//! pipeline: basis rows, exact second-derivative rows, and the roughness
//! matrix `R_ab = ∫ B_a'' B_b'' dλ`. Internal to the crate — `preprocess`
//! owns the public surface.

use crate::{Error, Result};

/// Cubic basis on a strictly increasing knot sequence, end knots repeated
/// to multiplicity 4. `k` distinct knots give `k + 2` basis functions.
pub(crate) struct CubicBasis {
    knots: Vec<f64>,
    /// Extended knot vector: 3 copies of each end knot prepended/appended.
    t: Vec<f64>,
}

impl CubicBasis {
    pub(crate) fn new(knots: &[f64]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidHistogram(format!(
                "spline needs at least 2 knots, got {}",
                knots.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite())
            || knots.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidHistogram(
                "knots must be finite and strictly increasing".into(),
            ));
        }
        let mut t = Vec::with_capacity(knots.len() + 6);
        t.extend([knots[0]; 3]);
        t.extend_from_slice(knots);
        t.extend([knots[knots.len() - 1]; 3]);
        Ok(CubicBasis { knots: knots.to_vec(), t })
    }

    /// Number of basis functions.
    pub(crate) fn len(&self) -> usize {
        self.knots.len() + 2
    }

    pub(crate) fn span(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Degree-0 through degree-`d` basis value rows at `x` (Cox–de Boor
    /// triangle, 0/0 taken as 0 at repeated knots). `x` must lie in the
    /// span; the right endpoint belongs to the last non-empty segment.
    fn triangle(&self, x: f64, max_degree: usize) -> Vec<Vec<f64>> {
        let t = &self.t;
        let mut rows = Vec::with_capacity(max_degree + 1);
        let mut n0 = vec![0.0; t.len() - 1];
        let b = t[t.len() - 1];
        for i in 0..t.len() - 1 {
            let inside = t[i] <= x && x < t[i + 1];
            let closes_b = x == b && t[i] < b && t[i + 1] == b;
            if inside || closes_b {
                n0[i] = 1.0;
            }
        }
        rows.push(n0);
        for d in 1..=max_degree {
            let prev = &rows[d - 1];
            let mut nd = vec![0.0; t.len() - d - 1];
            for (i, out) in nd.iter_mut().enumerate() {
                let den1 = t[i + d] - t[i];
                if den1 > 0.0 {
                    *out += (x - t[i]) / den1 * prev[i];
                }
                let den2 = t[i + d + 1] - t[i + 1];
                if den2 > 0.0 {
                    *out += (t[i + d + 1] - x) / den2 * prev[i + 1];
                }
            }
            rows.push(nd);
        }
        rows
    }

    /// Values of all basis functions at `x`.
    pub(crate) fn eval_row(&self, x: f64) -> Vec<f64> {
        self.triangle(x, 3).pop().expect("triangle returns 4 rows")
    }

    /// Second derivatives of all basis functions at `x`, by applying the
    /// B-spline derivative identity
    /// `N'_{i,d} = d·(N_{i,d−1}/(t_{i+d}−t_i) − N_{i+1,d−1}/(t_{i+d+1}−t_{i+1}))`
    /// twice (degenerate denominators contribute nothing).
    pub(crate) fn eval_d2_row(&self, x: f64) -> Vec<f64> {
        let t = &self.t;
        let rows = self.triangle(x, 1);
        let n1 = &rows[1];
        // First derivatives of the degree-2 functions…
        let mut d1_of_2 = vec![0.0; t.len() - 3];
        for (i, out) in d1_of_2.iter_mut().enumerate() {
            let den1 = t[i + 2] - t[i];
            if den1 > 0.0 {
                *out += 2.0 * n1[i] / den1;
            }
            let den2 = t[i + 3] - t[i + 1];
            if den2 > 0.0 {
                *out -= 2.0 * n1[i + 1] / den2;
            }
        }
        // …feed the same identity once more for the cubics.
        let mut d2 = vec![0.0; t.len() - 4];
        for (i, out) in d2.iter_mut().enumerate() {
            let den1 = t[i + 3] - t[i];
            if den1 > 0.0 {
                *out += 3.0 * d1_of_2[i] / den1;
            }
            let den2 = t[i + 4] - t[i + 1];
            if den2 > 0.0 {
                *out -= 3.0 * d1_of_2[i + 1] / den2;
            }
        }
        d2
    }

    /// Roughness matrix `R_ab = ∫ B_a''(t) B_b''(t) dt` over the span.
    /// Two-point Gauss per knot interval is exact: the second derivatives
    /// are linear inside each interval, so the integrand is quadratic.
    pub(crate) fn roughness(&self) -> Vec<Vec<f64>> {
        let nb = self.len();
        let mut r = vec![vec![0.0; nb]; nb];
        let gauss = 1.0 / 3f64.sqrt();
        for w in self.knots.windows(2) {
            let center = (w[0] + w[1]) / 2.0;
            let half = (w[1] - w[0]) / 2.0;
            for sign in [-1.0, 1.0] {
                let d2 = self.eval_d2_row(center + sign * gauss * half);
                for (a, da) in d2.iter().enumerate() {
                    if *da == 0.0 {
                        continue;
                    }
                    for (b, db) in d2.iter().enumerate() {
                        r[a][b] += half * da * db;
                    }
                }
            }
        }
        r
    }
}

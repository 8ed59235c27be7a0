//! Histogram ingestion: raw class counts → proportions → discrete clr at
//! class midpoints → penalized zero-integral cubic-spline clr curve on the
//! analysis grid → λ-density.
//!
//! The smoothing step minimizes
//!
//! ```text
//! Σ_j (s(x_j) − dclr_j)² + penalty·∫ s''(t)² dt,   subject to ∫ s dλ = 0,
//! ```
//!
//! over cubic splines on a configured knot sequence. The constraint is the
//! *discrete* quadrature integral on the output grid, imposed exactly via
//! one Lagrange multiplier, so the result is a valid clr curve by
//! construction rather than by rounding luck.

use crate::bspline::CubicBasis;
use crate::clr::{ClrFunction, ClrSpace};
use crate::grid::Grid;
use crate::measure::{Density, ReferenceMeasure};
use crate::{Error, Result};

/// Binned observations of one distribution: `m` classes over strictly
/// increasing edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    label: String,
    class_edges: Vec<f64>,
    counts: Vec<f64>,
}

impl Histogram {
    pub fn new(
        label: impl Into<String>,
        class_edges: Vec<f64>,
        counts: Vec<f64>,
    ) -> Result<Self> {
        if class_edges.len() < 2 || counts.len() + 1 != class_edges.len() {
            return Err(Error::InvalidHistogram(format!(
                "{} edges and {} counts do not form classes (need m+1 edges for m counts)",
                class_edges.len(),
                counts.len()
            )));
        }
        if class_edges.iter().any(|e| !e.is_finite())
            || class_edges.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidHistogram(
                "class edges must be finite and strictly increasing".into(),
            ));
        }
        if counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidHistogram(
                "counts must be finite and non-negative".into(),
            ));
        }
        if counts.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidHistogram(
                "total count must be positive".into(),
            ));
        }
        Ok(Histogram { label: label.into(), class_edges, counts })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn class_edges(&self) -> &[f64] {
        &self.class_edges
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    /// Number of classes.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.class_edges.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect()
    }
}

/// Equidistant class edges by the Sturges rule: `m = ⌈log₂ n_obs⌉ + 1`
/// classes on `[lo, hi]`.
pub fn sturges_classes(n_obs: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if n_obs == 0 {
        return Err(Error::InvalidHistogram(
            "Sturges rule needs at least one observation".into(),
        ));
    }
    if !lo.is_finite() || !hi.is_finite() || hi <= lo {
        return Err(Error::InvalidHistogram(format!(
            "class range must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let m = if n_obs == 1 {
        1
    } else {
        (usize::BITS - (n_obs - 1).leading_zeros()) as usize + 1
    };
    Ok((0..=m)
        .map(|i| lo + (hi - lo) * i as f64 / m as f64)
        .collect())
}

/// Discrete clr of the class proportions: `(midpoint_j, ln q_j − mean ln q)`
/// pairs. Zero counts abort unless `impute` adds the pseudo-count ½ to
/// every class (every class, to preserve the count ordering).
pub fn histogram_to_dclr(h: &Histogram, impute: bool) -> Result<Vec<(f64, f64)>> {
    let counts: Vec<f64> = if impute {
        h.counts().iter().map(|c| c + 0.5).collect()
    } else {
        if let Some(class) = h.counts().iter().position(|c| *c == 0.0) {
            return Err(Error::ZeroClassCount { class });
        }
        h.counts().to_vec()
    };
    let total: f64 = counts.iter().sum();
    let logs: Vec<f64> = counts.iter().map(|c| (c / total).ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    Ok(h.midpoints()
        .into_iter()
        .zip(logs)
        .map(|(x, l)| (x, l - mean))
        .collect())
}

/// Fits the penalized zero-integral cubic spline to `(x, dclr)` points and
/// samples it on `g`. `knots` configures the spline space; a typical income
/// setup passes the domain endpoints plus a few interior break points.
pub fn smooth_dclr(
    points: &[(f64, f64)],
    g: &Grid,
    knots: &[f64],
    penalty: f64,
) -> Result<ClrFunction> {
    if points.len() < 3 {
        return Err(Error::InvalidHistogram(format!(
            "smoothing needs at least 3 points, got {}",
            points.len()
        )));
    }
    if !penalty.is_finite() || penalty < 0.0 {
        return Err(Error::InvalidHistogram(format!(
            "penalty must be finite and non-negative, got {penalty}"
        )));
    }
    let basis = CubicBasis::new(knots)?;
    let (lo, hi) = basis.span();
    if g.a() < lo || g.b() > hi {
        return Err(Error::InvalidHistogram(format!(
            "grid [{}, {}] exceeds the knot span [{lo}, {hi}]",
            g.a(),
            g.b()
        )));
    }
    if points
        .iter()
        .any(|(x, y)| !x.is_finite() || !y.is_finite() || *x < lo || *x > hi)
    {
        return Err(Error::InvalidHistogram(format!(
            "data points must be finite and lie inside the knot span [{lo}, {hi}]"
        )));
    }
    let nb = basis.len();
    if penalty == 0.0 && points.len() + 1 < nb {
        return Err(Error::SingularSystem(format!(
            "{} points cannot determine {nb} spline coefficients without a roughness penalty",
            points.len()
        )));
    }

    // Basis at the data points and on the output grid.
    let data_rows: Vec<Vec<f64>> = points.iter().map(|(x, _)| basis.eval_row(*x)).collect();
    let grid_rows: Vec<Vec<f64>> = g.nodes().iter().map(|&x| basis.eval_row(x)).collect();
    // Quadrature integral of each basis function — the constraint vector.
    let mut z = vec![0.0; nb];
    for (w, row) in g.weights().iter().zip(&grid_rows) {
        for (zb, v) in z.iter_mut().zip(row) {
            *zb += w * v;
        }
    }

    // Saddle-point system: [BᵀB + penalty·R, z; zᵀ, 0]·[c; μ] = [Bᵀy; 0].
    let roughness = basis.roughness();
    let mut a = vec![vec![0.0; nb + 1]; nb + 1];
    let mut rhs = vec![0.0; nb + 1];
    for (row, (_, y)) in data_rows.iter().zip(points) {
        for i in 0..nb {
            rhs[i] += row[i] * y;
            for j in 0..nb {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            a[i][j] += penalty * roughness[i][j];
        }
        a[i][nb] = z[i];
        a[nb][i] = z[i];
    }
    let solution = crate::linalg::solve_linear(a, rhs)?;
    let coeffs = &solution[..nb];
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::SingularSystem(
            "smoothing system is numerically singular (non-finite coefficients)".into(),
        ));
    }

    let values: Vec<f64> = grid_rows
        .iter()
        .map(|row| row.iter().zip(coeffs).map(|(b, c)| b * c).sum())
        .collect();
    ClrFunction::new(g, ClrSpace::ZeroLambda, values)
}

/// Exponentiates a smoothed clr curve into the canonical λ-density on its
/// grid (the last step of the ingestion pipeline).
pub fn clr_curve_to_density(s: &ClrFunction) -> Result<Density> {
    match s.space() {
        ClrSpace::ZeroLambda => {}
        other => {
            return Err(Error::SpaceMismatch {
                expected: "L2_0(lambda)",
                got: other.name(),
            })
        }
    }
    let reference = ReferenceMeasure::lebesgue(s.grid());
    let values: Vec<f64> = s.values().iter().map(|v| v.exp()).collect();
    Density::new(&reference, values)
}

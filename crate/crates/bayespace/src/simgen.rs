//! Synthetic density families for the simulation study: truncated
//! log-normals on a positive interval, the 9×9 parameter design, and the
//! closed-form clr curve used as an oracle by the test suites.

use crate::grid::Grid;
use crate::measure::{Density, ReferenceMeasure};
use crate::{Error, Result};

/// Parameters of a log-normal kernel truncated to `domain`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalParams {
    pub mu: f64,
    pub sigma: f64,
    /// Truncation interval `(a, b)`, `0 < a < b`.
    pub domain: (f64, f64),
}

impl LogNormalParams {
    pub fn new(mu: f64, sigma: f64, domain: (f64, f64)) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidDomain(format!(
                "log-normal needs finite mu and sigma > 0, got mu={mu}, sigma={sigma}"
            )));
        }
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite()) || a <= 0.0 || b <= a {
            return Err(Error::InvalidDomain(format!(
                "log-normal domain must satisfy 0 < a < b, got ({a}, {b})"
            )));
        }
        Ok(Self { mu, sigma, domain })
    }
}

fn check_grid_in_domain(params: &LogNormalParams, g: &Grid) -> Result<()> {
    let (a, b) = params.domain;
    if g.a() < a || g.b() > b {
        return Err(Error::InvalidDomain(format!(
            "grid [{}, {}] extends beyond the truncation domain [{a}, {b}]",
            g.a(),
            g.b()
        )));
    }
    Ok(())
}

/// The truncated log-normal as a λ-density on `g`:
/// values ∝ `(1/t)·exp(−(ln t − μ)²/(2σ²))`, canonical representative
/// (λ-integral equals `λ(Ω)`). The log-kernel is shifted by its maximum
/// before exponentiating, so extreme parameters fail only when the kernel
/// genuinely underflows on the grid.
pub fn lognormal_density(params: &LogNormalParams, g: &Grid) -> Result<Density> {
    check_grid_in_domain(params, g)?;
    let log_kernel: Vec<f64> = g
        .nodes()
        .iter()
        .map(|&t| {
            let z = t.ln() - params.mu;
            -t.ln() - z * z / (2.0 * params.sigma * params.sigma)
        })
        .collect();
    let shift = log_kernel.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let values: Vec<f64> = log_kernel.iter().map(|lk| (lk - shift).exp()).collect();
    Density::new(&ReferenceMeasure::lebesgue(g), values)
}

/// Closed-form `clr_λ` curve of the truncated log-normal, sampled on `g`.
///
/// With `L(t) = ln t`, the clr is `ln f` minus its λ-average; the average of
/// `−L − (L−μ)²/(2σ²)` follows from `∫ln t dt = t ln t − t` and
/// `∫ln²t dt = t ln²t − 2t ln t + 2t` on `[a, b]`. Returned as raw values:
/// its zero integral holds analytically, not in grid quadrature.
pub fn lognormal_clr_closed_form(params: &LogNormalParams, g: &Grid) -> Result<Vec<f64>> {
    check_grid_in_domain(params, g)?;
    let (a, b) = params.domain;
    let len = b - a;
    let int_log = (b * b.ln() - b) - (a * a.ln() - a);
    let int_log2 = (b * b.ln() * b.ln() - 2.0 * b * b.ln() + 2.0 * b)
        - (a * a.ln() * a.ln() - 2.0 * a * a.ln() + 2.0 * a);
    let mean_log = int_log / len;
    let mean_log2 = int_log2 / len;
    let s2 = params.sigma * params.sigma;
    // mean of ln f over [a,b], dropping (ln f)'s t-free terms which cancel
    // against themselves in the subtraction.
    let mean = -mean_log - (mean_log2 - 2.0 * params.mu * mean_log) / (2.0 * s2);
    Ok(g.nodes()
        .iter()
        .map(|&t| {
            let l = t.ln();
            -l - (l * l - 2.0 * params.mu * l) / (2.0 * s2) - mean
        })
        .collect())
}

/// μ and σ indices `(i, j)` (each 1-based in `1..=9`) of design label
/// `κ = j + 9(i−1)`.
pub fn study_indices(kappa: usize) -> Result<(usize, usize)> {
    if !(1..=81).contains(&kappa) {
        return Err(Error::InvalidDomain(format!(
            "design label must lie in 1..=81, got {kappa}"
        )));
    }
    Ok(((kappa - 1) / 9 + 1, (kappa - 1) % 9 + 1))
}

/// Parameters of design cell κ: `μ_i = 0.6 + 0.25(i−1)`,
/// `σ_j = 0.5 + 0.07(j−1)` on the fixed domain `[1, 10]`.
pub fn study_params(kappa: usize) -> Result<LogNormalParams> {
    let (i, j) = study_indices(kappa)?;
    LogNormalParams::new(
        0.6 + 0.25 * (i as f64 - 1.0),
        0.5 + 0.07 * (j as f64 - 1.0),
        (1.0, 10.0),
    )
}

/// The full 9×9 simulation design: 81 truncated log-normal λ-densities on
/// `[1, 10]` in label order, returned as `(κ, density)` pairs.
pub fn study_lognormal_sample(g: &Grid) -> Result<Vec<(usize, Density)>> {
    if g.a() != 1.0 || g.b() != 10.0 {
        return Err(Error::InvalidDomain(format!(
            "the 9×9 design lives on [1, 10]; got [{}, {}]",
            g.a(),
            g.b()
        )));
    }
    (1..=81)
        .map(|kappa| Ok((kappa, lognormal_density(&study_params(kappa)?, g)?)))
        .collect()
}

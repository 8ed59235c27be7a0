//! The Hilbert-space algebra of `B²(P)`: perturbation and powering (the
//! vector operations), inner product, norm, distance, sample mean, centering.
//!
//! Everything here is defined on canonical representatives but invariant on
//! B-classes: perturbation is pointwise multiplication, powering is a
//! pointwise power, and the inner product is evaluated in clr coordinates,
//!
//! ```text
//! ⟨f, g⟩_{B(P)} = ∫ clr_P(f) · clr_P(g) dP,
//! ```
//!
//! which the double-integral definition reduces to (the O(n²) double sum is
//! retained as [`inner_product_double_integral`] — a test oracle, not a code
//! path). Note the scale of the reference matters: halving `P(Ω)` shrinks
//! norms, which is exactly the dominance phenomenon the reference-selection
//! pipeline exploits.

use crate::clr::clr_p;
use crate::measure::{same_reference, Density};
use crate::{Error, Result};

/// Perturbation `f ⊕_P g`: pointwise product, canonical representative.
pub fn perturb(f: &Density, g: &Density) -> Result<Density> {
    same_reference(f.reference(), g.reference())?;
    let values: Vec<f64> = f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect();
    Density::new(f.reference(), values)
}

/// Powering `α ⊙_P f`: pointwise power, canonical representative.
pub fn power(alpha: f64, f: &Density) -> Density {
    let values: Vec<f64> = f.values().iter().map(|v| v.powf(alpha)).collect();
    Density::new(f.reference(), values).expect("positive powers of positive values")
}

/// The ⊕-inverse (reciprocal class): `f ⊕_P inverse(f)` is neutral.
pub fn inverse(f: &Density) -> Density {
    power(-1.0, f)
}

/// Perturbation-subtraction `f ⊖_P g = f ⊕_P (−1 ⊙_P g)`.
pub fn perturb_diff(f: &Density, g: &Density) -> Result<Density> {
    perturb(f, &inverse(g))
}

/// `⟨f, g⟩_{B(P)}` via the clr chart: `Σ_k w_k p_k clr(f)_k clr(g)_k`.
pub fn inner_product(f: &Density, g: &Density) -> Result<f64> {
    same_reference(f.reference(), g.reference())?;
    let cf = clr_p(f);
    let cg = clr_p(g);
    let r = f.reference();
    Ok(r.integrate(
        &cf.values()
            .iter()
            .zip(cg.values())
            .map(|(a, b)| a * b)
            .collect::<Vec<_>>(),
    )
    .expect("clr lives on the density's grid"))
}

/// The defining double integral of the inner product,
///
/// ```text
/// ⟨f, g⟩ = 1/(2P(Ω)) ∬ p(t) p(u) ln(f(t)/f(u)) ln(g(t)/g(u)) dt du,
/// ```
///
/// as an O(n²) quadrature. Algebraically identical to [`inner_product`] on
/// the grid; kept public as the independent correctness gate for the fast
/// path. Use small grids.
pub fn inner_product_double_integral(f: &Density, g: &Density) -> Result<f64> {
    same_reference(f.reference(), g.reference())?;
    let r = f.reference();
    let grid = f.grid();
    let (w, p) = (grid.weights(), r.density());
    let lf: Vec<f64> = f.values().iter().map(|v| v.ln()).collect();
    let lg: Vec<f64> = g.values().iter().map(|v| v.ln()).collect();
    let n = grid.len();
    let mut acc = 0.0;
    for t in 0..n {
        let wt = w[t] * p[t];
        let mut row = 0.0;
        for u in 0..n {
            row += w[u] * p[u] * (lf[t] - lf[u]) * (lg[t] - lg[u]);
        }
        acc += wt * row;
    }
    Ok(acc / (2.0 * r.total()))
}

/// `‖f‖_{B(P)} = √⟨f, f⟩`.
pub fn norm(f: &Density) -> f64 {
    inner_product(f, f).expect("f shares a reference with itself").max(0.0).sqrt()
}

/// `d_{B(P)}(f, g) = ‖f ⊖_P g‖`, evaluated as the `L²(P)` distance of the
/// clr curves (exactly the same number, one normalization less).
pub fn distance(f: &Density, g: &Density) -> Result<f64> {
    same_reference(f.reference(), g.reference())?;
    let cf = clr_p(f);
    let cg = clr_p(g);
    let diff_sq: Vec<f64> = cf
        .values()
        .iter()
        .zip(cg.values())
        .map(|(a, b)| (a - b) * (a - b))
        .collect();
    Ok(f.reference()
        .integrate(&diff_sq)
        .expect("clr lives on the density's grid")
        .max(0.0)
        .sqrt())
}

/// The Bayes-space sample mean `(1/N) ⊙_P ⊕_P f_i`, computed in log space:
/// `exp((1/N) Σ ln f_i)`, canonical representative.
pub fn sample_mean(sample: &[Density]) -> Result<Density> {
    let first = sample
        .first()
        .ok_or_else(|| Error::InvalidSample("sample mean needs a non-empty sample".into()))?;
    for f in sample {
        same_reference(first.reference(), f.reference())?;
    }
    let n = sample.len() as f64;
    let mut mean_log = vec![0.0; first.grid().len()];
    for f in sample {
        for (m, v) in mean_log.iter_mut().zip(f.values()) {
            *m += v.ln() / n;
        }
    }
    Density::new(first.reference(), mean_log.iter().map(|m| m.exp()).collect())
}

/// Centers the sample: `f_i ⊖_P f̄_P`. The centered sample's mean is neutral.
pub fn center(sample: &[Density]) -> Result<Vec<Density>> {
    let mean = sample_mean(sample)?;
    sample.iter().map(|f| perturb_diff(f, &mean)).collect()
}

//! Reference measures and B-equivalence-class representatives.
//!
//! A reference measure `P` is a strictly positive λ-density `p = dP/dλ` on a
//! [`Grid`] together with its total mass `P(Ω)`. It is the origin and the
//! weighting of a Bayes space: all downstream geometry (perturbation, clr,
//! FPCA) is taken *relative to* `P`, and the scale of `p` is part of the
//! definition — `λ` on `[1,10]` (total 9) and `λ/9` (total 1) induce the same
//! directions but distances that differ by the factor 3.
//!
//! A [`Density`] is one representative of a B-equivalence class: positive
//! functions proportional to each other represent the same measure. To make
//! comparisons and file output deterministic, every constructor renormalizes
//! to the *canonical representative*, the one whose `P`-integral equals
//! `P(Ω)`. Under this convention the neutral element of `B²(P)` is the
//! constant function `1`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::grid::Grid;
use crate::{Error, Result};

/// A measure with strictly positive λ-density on a grid.
///
/// Holds the λ-density `p` at the nodes, the cached total `P(Ω) = ∫ p dλ`,
/// and the equally cached unweighting companion `√p` with its total
/// `√P(Ω) = ∫ √p dλ` (the auxiliary measure behind `clr_u`).
#[derive(Debug, Clone)]
pub struct ReferenceMeasure {
    grid: Grid,
    p: Vec<f64>,
    sqrt_p: Vec<f64>,
    total: f64,
    sqrt_total: f64,
}

impl PartialEq for ReferenceMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.p == other.p
    }
}

fn ensure_positive(name: &'static str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(())
    } else {
        Err(Error::NotStrictlyPositive(name))
    }
}

impl ReferenceMeasure {
    /// General constructor from node values of `p`; rejects non-positive or
    /// non-finite densities.
    pub fn new(grid: &Grid, p: Vec<f64>) -> Result<Arc<Self>> {
        if p.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: p.len() });
        }
        ensure_positive("reference density", &p)?;
        let sqrt_p: Vec<f64> = p.iter().map(|x| x.sqrt()).collect();
        let total = grid.integrate(&p).expect("length checked");
        let sqrt_total = grid.integrate(&sqrt_p).expect("length checked");
        Ok(Arc::new(ReferenceMeasure { grid: grid.clone(), p, sqrt_p, total, sqrt_total }))
    }

    /// The Lebesgue measure restricted to the grid's interval: `p ≡ 1`,
    /// total `b − a`.
    pub fn lebesgue(grid: &Grid) -> Arc<Self> {
        Self::new(grid, vec![1.0; grid.len()]).expect("constant 1 is a valid density")
    }

    /// The uniform probability measure: `p ≡ 1/(b−a)`, total 1.
    pub fn uniform_unit(grid: &Grid) -> Arc<Self> {
        let c = 1.0 / (grid.b() - grid.a());
        Self::new(grid, vec![c; grid.len()]).expect("positive constant is a valid density")
    }

    /// Exponential reference `p(t) ∝ exp(−δ·t)`, normalized to total 1.
    ///
    /// `δ = 0` is allowed and coincides with [`ReferenceMeasure::uniform_unit`].
    /// The exponent is shifted by its maximum before exponentiating, so the
    /// only failure mode is a genuine dynamic-range overflow: `|δ|·(b−a)` so
    /// large that `exp` underflows to zero at the far end of the interval.
    pub fn exponential(grid: &Grid, delta: f64) -> Result<Arc<Self>> {
        if !delta.is_finite() {
            return Err(Error::ExponentialDegenerate { delta });
        }
        let exponents: Vec<f64> = grid.nodes().iter().map(|t| -delta * t).collect();
        let emax = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = exponents.iter().map(|e| (e - emax).exp()).collect();
        if raw.contains(&0.0) {
            return Err(Error::ExponentialDegenerate { delta });
        }
        let mass = grid.integrate(&raw).expect("length matches");
        let p: Vec<f64> = raw.iter().map(|v| v / mass).collect();
        Self::new(grid, p)
    }

    /// Sample-mean reference: the geometric mean `exp((1/N) Σ ln f_i)` of
    /// λ-densities, renormalized to total `λ(Ω) = b − a` so it sits on the
    /// same scale footing as the Lebesgue reference.
    pub fn from_mean(sample: &[Density]) -> Result<Arc<Self>> {
        let first = sample
            .first()
            .ok_or_else(|| Error::InvalidSample("mean reference needs a non-empty sample".into()))?;
        let grid = first.grid().clone();
        let is_lebesgue = first.reference().p.iter().all(|&x| x == 1.0);
        if !is_lebesgue {
            return Err(Error::InvalidSample(
                "mean reference is defined for densities w.r.t. the Lebesgue reference".into(),
            ));
        }
        for f in sample {
            if f.grid() != &grid {
                return Err(Error::GridMismatch);
            }
            if f.reference() != first.reference() {
                return Err(Error::ReferenceMismatch);
            }
        }
        let n = sample.len() as f64;
        let mut mean_log = vec![0.0; grid.len()];
        for f in sample {
            for (m, v) in mean_log.iter_mut().zip(f.values()) {
                *m += v.ln() / n;
            }
        }
        let raw: Vec<f64> = mean_log.iter().map(|m| m.exp()).collect();
        let mass = grid.integrate(&raw).expect("length matches");
        let scale = (grid.b() - grid.a()) / mass;
        let p: Vec<f64> = raw.iter().map(|v| v * scale).collect();
        Self::new(&grid, p)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// λ-density values `p(t_k)`.
    pub fn density(&self) -> &[f64] {
        &self.p
    }

    /// `√p(t_k)` — the λ-density of the unweighting measure `√P`.
    pub fn sqrt_density(&self) -> &[f64] {
        &self.sqrt_p
    }

    /// Total mass `P(Ω)`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// `√P(Ω) = ∫ √p dλ`.
    pub fn sqrt_total(&self) -> f64 {
        self.sqrt_total
    }

    /// `∫ v dP = Σ w_k p_k v_k`.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.grid.len() {
            return Err(Error::LengthMismatch { expected: self.grid.len(), got: values.len() });
        }
        Ok(self.grid.integrate_weighted(&self.p, values))
    }
}

/// Checks that two operands are expressed against the same reference.
pub(crate) fn same_reference(x: &Arc<ReferenceMeasure>, y: &Arc<ReferenceMeasure>) -> Result<()> {
    if Arc::ptr_eq(x, y) || **x == **y {
        Ok(())
    } else if x.grid() != y.grid() {
        Err(Error::GridMismatch)
    } else {
        Err(Error::ReferenceMismatch)
    }
}

/// One representative of a B-equivalence class, expressed w.r.t. a reference.
///
/// Always stored in canonical form: `∫ f dP = P(Ω)`, so the neutral element
/// is the constant `1` and proportional inputs construct identical values.
#[derive(Debug, Clone)]
pub struct Density {
    reference: Arc<ReferenceMeasure>,
    values: Vec<f64>,
}

impl Density {
    /// Builds the canonical representative of the class of `values`.
    ///
    /// The input must be strictly positive and finite; it is rescaled so that
    /// its `P`-integral equals `P(Ω)` (proportional inputs are
    /// indistinguishable afterwards — that is the point).
    pub fn new(reference: &Arc<ReferenceMeasure>, values: Vec<f64>) -> Result<Self> {
        if values.len() != reference.grid().len() {
            return Err(Error::LengthMismatch {
                expected: reference.grid().len(),
                got: values.len(),
            });
        }
        ensure_positive("density", &values)?;
        let mut f = Density { reference: Arc::clone(reference), values };
        f.renormalize();
        Ok(f)
    }

    /// The neutral element of `B²(P)`: the constant function 1.
    pub fn neutral(reference: &Arc<ReferenceMeasure>) -> Self {
        Density::new(reference, vec![1.0; reference.grid().len()])
            .expect("constant 1 is a valid density")
    }

    /// Rebuilds a density from values already in canonical form, e.g. read
    /// back from a file this library wrote. [`Density::new`] would rescale by
    /// `P(Ω)/∫f dP ≈ 1` and could flip last bits; here the values are stored
    /// untouched, so a write/read round trip is bit-exact. Values whose
    /// integral is off by more than `1e-9` relative are rejected instead of
    /// silently renormalized.
    pub fn from_normalized(reference: &Arc<ReferenceMeasure>, values: Vec<f64>) -> Result<Self> {
        if values.len() != reference.grid().len() {
            return Err(Error::LengthMismatch {
                expected: reference.grid().len(),
                got: values.len(),
            });
        }
        ensure_positive("density", &values)?;
        let mass = reference.integrate(&values)?;
        let total = reference.total();
        if (mass - total).abs() > 1e-9 * total {
            return Err(Error::NotNormalized { mass, total });
        }
        Ok(Density { reference: Arc::clone(reference), values })
    }

    fn renormalize(&mut self) {
        let mass = self
            .reference
            .integrate(&self.values)
            .expect("length fixed at construction");
        let scale = self.reference.total() / mass;
        for v in &mut self.values {
            *v *= scale;
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn reference(&self) -> &Arc<ReferenceMeasure> {
        &self.reference
    }

    pub fn grid(&self) -> &Grid {
        self.reference.grid()
    }

    /// Re-derives the canonical representative. A no-op (modulo rounding) for
    /// densities built through this API; exposed for values manipulated
    /// externally.
    pub fn normalize_representative(&self) -> Density {
        let mut f = self.clone();
        f.renormalize();
        f
    }

    /// Chain-rule change of reference: the class of `f` re-expressed w.r.t.
    /// `new` via `f·p_old/p_new`, returned as the canonical representative.
    pub fn change_reference(&self, new: &Arc<ReferenceMeasure>) -> Result<Density> {
        if self.grid() != new.grid() {
            return Err(Error::GridMismatch);
        }
        let p_old = self.reference.density();
        let p_new = new.density();
        let values: Vec<f64> = self
            .values
            .iter()
            .zip(p_old)
            .zip(p_new)
            .map(|((v, po), pn)| v * po / pn)
            .collect();
        Density::new(new, values)
    }

    /// True iff the two representatives are proportional: the pointwise ratio
    /// has relative spread at most `tol`.
    pub fn b_equivalent(&self, other: &Density, tol: f64) -> bool {
        if self.grid() != other.grid() {
            return false;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (v, u) in self.values.iter().zip(other.values()) {
            let r = v / u;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        hi - lo <= tol * 0.5 * (hi + lo).abs()
    }
}

/// The CLI-facing reference mini-language: `lebesgue`, `uniform`,
/// `exp:<delta>`, `mean`.
#[derive(Debug, Clone, PartialEq)]
pub enum RefSpec {
    Lebesgue,
    Uniform,
    Exp(f64),
    Mean,
}

impl FromStr for RefSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "lebesgue" => Ok(RefSpec::Lebesgue),
            "uniform" => Ok(RefSpec::Uniform),
            "mean" => Ok(RefSpec::Mean),
            _ => match s.strip_prefix("exp:") {
                Some(d) => d
                    .parse::<f64>()
                    .ok()
                    .filter(|d| d.is_finite())
                    .map(RefSpec::Exp)
                    .ok_or_else(|| Error::BadRefSpec(s.to_string())),
                None => Err(Error::BadRefSpec(s.to_string())),
            },
        }
    }
}

impl fmt::Display for RefSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefSpec::Lebesgue => write!(f, "lebesgue"),
            RefSpec::Uniform => write!(f, "uniform"),
            RefSpec::Exp(d) => write!(f, "exp:{d}"),
            RefSpec::Mean => write!(f, "mean"),
        }
    }
}

impl RefSpec {
    /// Materializes the reference on a grid. `Mean` needs the sample whose
    /// geometric mean defines it; the others ignore `sample`.
    pub fn resolve(
        &self,
        grid: &Grid,
        sample: Option<&[Density]>,
    ) -> Result<Arc<ReferenceMeasure>> {
        match self {
            RefSpec::Lebesgue => Ok(ReferenceMeasure::lebesgue(grid)),
            RefSpec::Uniform => Ok(ReferenceMeasure::uniform_unit(grid)),
            RefSpec::Exp(delta) => ReferenceMeasure::exponential(grid, *delta),
            RefSpec::Mean => {
                let sample = sample.ok_or(Error::MeanNeedsSample)?;
                ReferenceMeasure::from_mean(sample)
            }
        }
    }
}

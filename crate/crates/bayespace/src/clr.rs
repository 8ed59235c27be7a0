//! The transform layer: `clr_P`, `clr_√P`, `clr_u`, and the weighting maps
//! `ω`, `ω₂` with their inverses.
//!
//! These maps realize one commuting diagram between four spaces:
//!
//! ```text
//!        B²(P)  ────── clr_P ──────▶  L²₀(P)
//!          │ ▲                          │ ▲
//!        ω⁻¹ ω                       ω₂⁻¹ ω₂
//!          ▼ │                          ▼ │
//!        B²(λ)  ───── clr_√P ─────▶  L²₀,√P(λ)
//! ```
//!
//! `clr_P` is the isometric chart of the Bayes space: log, minus the
//! `P`-average of the log. Its image consists of functions with zero
//! `P`-integral. `ω(φ) = φ^{1/√p}` and `ω⁻¹(ψ) = ψ^{√p}` move densities
//! between the weighted and unweighted Bayes spaces; `ω₂(η) = η/√p` and
//! `ω₂⁻¹(ξ) = ξ·√p` do the same for the clr sides. The composite
//! `clr_u = ω₂⁻¹ ∘ clr_P` lands in the zero-`√P`-integral subspace of the
//! *unweighted* `L²(λ)` — which is what makes a weighted functional PCA
//! computable with plain λ-quadrature.
//!
//! A pointwise power is *not* scale-invariant: `(c·φ)^{1/√p}` and
//! `φ^{1/√p}` differ by a non-constant factor, so `ω` and `ω⁻¹` must fix a
//! representative before powering. They use the one whose log integrates to
//! zero against the powering measure (`√P` for `ω`, `P` for `ω⁻¹`); with
//! that convention both maps descend to B-equivalence classes, invert each
//! other exactly, and the square of maps above commutes.

use std::sync::Arc;

use crate::grid::Grid;
use crate::measure::{Density, ReferenceMeasure};
use crate::{Error, Result};

/// Which zero-integral subspace a [`ClrFunction`] lives in.
#[derive(Debug, Clone)]
pub enum ClrSpace {
    /// `L²₀(P)`: zero integral against `P` (image of `clr_P`).
    ZeroP(Arc<ReferenceMeasure>),
    /// `L²₀,√P(λ)`: zero integral against `√P`, paired with plain λ-quadrature
    /// (image of `clr_u`).
    ZeroSqrtP(Arc<ReferenceMeasure>),
    /// `L²₀(λ)`: zero integral against λ (discrete-clr smoothing output).
    ZeroLambda,
}

impl ClrSpace {
    pub fn name(&self) -> &'static str {
        match self {
            ClrSpace::ZeroP(_) => "L2_0(P)",
            ClrSpace::ZeroSqrtP(_) => "L2_0,sqrtP(lambda)",
            ClrSpace::ZeroLambda => "L2_0(lambda)",
        }
    }

    /// λ-density of the measure defining this space's zero-integral
    /// constraint (`p`, `√p`, or `1`).
    fn constraint_density(&self, grid: &Grid) -> Vec<f64> {
        match self {
            ClrSpace::ZeroP(r) => r.density().to_vec(),
            ClrSpace::ZeroSqrtP(r) => r.sqrt_density().to_vec(),
            ClrSpace::ZeroLambda => vec![1.0; grid.len()],
        }
    }
}

/// A grid-sampled function in one of the three zero-integral subspaces.
#[derive(Debug, Clone)]
pub struct ClrFunction {
    grid: Grid,
    space: ClrSpace,
    values: Vec<f64>,
}

/// Tolerance for zero-integral defects of *inputs* (values that may have
/// passed through files or external rounding), relative to the sup norm.
const INPUT_DEFECT_TOL: f64 = 1e-8;

impl ClrFunction {
    /// Wraps values after checking the tagged zero-integral invariant to
    /// within `1e-8·‖v‖_∞` (file-rounding tolerance).
    pub fn new(grid: &Grid, space: ClrSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let ClrSpace::ZeroP(r) | ClrSpace::ZeroSqrtP(r) = &space {
            if r.grid() != grid {
                return Err(Error::GridMismatch);
            }
        }
        let f = ClrFunction { grid: grid.clone(), space, values };
        let defect = f.zero_integral_defect().abs();
        let tol = INPUT_DEFECT_TOL * f.sup_norm();
        if defect > tol {
            return Err(Error::ZeroIntegralViolated { space: f.space.name(), defect, tol });
        }
        Ok(f)
    }

    /// Internal constructor for values that are zero-integral by
    /// construction (a mean was just subtracted).
    pub(crate) fn from_parts(grid: &Grid, space: ClrSpace, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ClrFunction { grid: grid.clone(), space, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn space(&self) -> &ClrSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The integral the tag says must vanish: `∫ v dP`, `∫ v d√P`, or
    /// `∫ v dλ`.
    pub fn zero_integral_defect(&self) -> f64 {
        let m = self.space.constraint_density(&self.grid);
        self.grid.integrate_weighted(&m, &self.values)
    }

    fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    fn expect_zero_p(&self) -> Result<&Arc<ReferenceMeasure>> {
        match &self.space {
            ClrSpace::ZeroP(r) => Ok(r),
            other => Err(Error::SpaceMismatch { expected: "L2_0(P)", got: other.name() }),
        }
    }

    fn expect_zero_sqrt_p(&self) -> Result<&Arc<ReferenceMeasure>> {
        match &self.space {
            ClrSpace::ZeroSqrtP(r) => Ok(r),
            other => {
                Err(Error::SpaceMismatch { expected: "L2_0,sqrtP(lambda)", got: other.name() })
            }
        }
    }
}

fn expect_lambda_reference(phi: &Density) -> Result<()> {
    if phi.reference().density().iter().all(|&x| x == 1.0) {
        Ok(())
    } else {
        Err(Error::ReferenceMismatch)
    }
}

/// `clr_P(f) = ln f − (1/P(Ω)) ∫ ln f dP` — the centred log-ratio chart of
/// `B²(P)`. Output has zero `P`-integral; proportional inputs map to the
/// same output (the log-constant is removed with the mean).
pub fn clr_p(f: &Density) -> ClrFunction {
    let r = f.reference();
    let logs: Vec<f64> = f.values().iter().map(|v| v.ln()).collect();
    let mean = r.integrate(&logs).expect("density lives on its grid") / r.total();
    let values: Vec<f64> = logs.iter().map(|l| l - mean).collect();
    ClrFunction::from_parts(f.grid(), ClrSpace::ZeroP(Arc::clone(r)), values)
}

/// Inverse chart: `exp` of a zero-`P`-integral function, as the canonical
/// `P`-density. Rejects inputs violating the zero-integral invariant beyond
/// the file-rounding tolerance (a corrupted curve, not a rounding artifact).
pub fn clr_p_inverse(v: &ClrFunction) -> Result<Density> {
    let r = v.expect_zero_p()?;
    let defect = v.zero_integral_defect().abs();
    let tol = INPUT_DEFECT_TOL * v.sup_norm();
    if defect > tol {
        return Err(Error::ZeroIntegralViolated { space: v.space.name(), defect, tol });
    }
    let values: Vec<f64> = v.values().iter().map(|x| x.exp()).collect();
    Density::new(r, values)
}

/// `B²`-weighting map `ω(φ) = φ^{1/√p}`: carries a λ-density into `B²(P)`.
///
/// The power is taken on the representative whose log has zero `√P`-mean,
/// `exp[clr_√P(φ)]`. Powering is the one place where the representative
/// matters — `(c·φ)^{1/√p}` differs from `φ^{1/√p}` by the *non-constant*
/// factor `c^{1/√p}` — and the zero-log-mean choice is the one under which
/// ω is well defined on B-classes, inverts [`omega_inverse`] exactly, and
/// commutes with the clr charts.
pub fn omega(phi: &Density, reference: &Arc<ReferenceMeasure>) -> Result<Density> {
    let centred = clr_sqrt_p(phi, reference)?;
    let values: Vec<f64> = centred
        .values()
        .iter()
        .zip(reference.sqrt_density())
        .map(|(x, s)| (x / s).exp())
        .collect();
    Density::new(reference, values)
}

/// `B²`-unweighting map `ω⁻¹(ψ) = ψ^{√p}`: expresses a `P`-density back in
/// the unweighted Bayes space `B²(λ)` — the representation used for plots.
///
/// Mirroring [`omega`], the power is taken on the zero-log-`P`-mean
/// representative `exp[clr_P(ψ)]`; equivalently, `ω⁻¹(ψ) = exp[clr_u(ψ)]`
/// up to the canonical normalization.
pub fn omega_inverse(psi: &Density) -> Density {
    let u = clr_u(psi);
    let lambda = ReferenceMeasure::lebesgue(psi.grid());
    let values: Vec<f64> = u.values().iter().map(|x| x.exp()).collect();
    Density::new(&lambda, values).expect("exponentials of clr values are positive and finite")
}

/// `L²`-weighting map `ω₂(η) = η/√p`: zero-`√P`-integral functions to
/// zero-`P`-integral functions.
pub fn omega2(eta: &ClrFunction) -> Result<ClrFunction> {
    let r = eta.expect_zero_sqrt_p()?;
    let values: Vec<f64> = eta
        .values()
        .iter()
        .zip(r.sqrt_density())
        .map(|(v, s)| v / s)
        .collect();
    Ok(ClrFunction::from_parts(eta.grid(), ClrSpace::ZeroP(Arc::clone(r)), values))
}

/// `L²`-unweighting map `ω₂⁻¹(ξ) = ξ·√p`: zero-`P`-integral functions to
/// zero-`√P`-integral functions (the mechanism behind `clr_u`'s image).
pub fn omega2_inverse(xi: &ClrFunction) -> Result<ClrFunction> {
    let r = xi.expect_zero_p()?;
    let values: Vec<f64> = xi
        .values()
        .iter()
        .zip(r.sqrt_density())
        .map(|(v, s)| v * s)
        .collect();
    Ok(ClrFunction::from_parts(xi.grid(), ClrSpace::ZeroSqrtP(Arc::clone(r)), values))
}

/// Unweighting clr: `clr_u(f) = √p · clr_P(f)`, an isometry of `B²(P)` into
/// the zero-`√P`-integral subspace of the plain `L²(λ)`.
///
/// Computed directly as `√p·clr_P` (one log pass and a scaling); the
/// equivalent route `clr_√P ∘ ω⁻¹` is kept as a test oracle.
pub fn clr_u(f: &Density) -> ClrFunction {
    let xi = clr_p(f);
    omega2_inverse(&xi).expect("clr_p output is tagged L2_0(P)")
}

/// `clr_√P(φ) = ln φ − (1/√P(Ω)) ∫ ln φ d√P` — the clr chart induced by the
/// unweighting measure `√P` on the unweighted Bayes space.
pub fn clr_sqrt_p(phi: &Density, reference: &Arc<ReferenceMeasure>) -> Result<ClrFunction> {
    expect_lambda_reference(phi)?;
    if phi.grid() != reference.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = phi.grid();
    let logs: Vec<f64> = phi.values().iter().map(|v| v.ln()).collect();
    let mean =
        grid.integrate_weighted(reference.sqrt_density(), &logs) / reference.sqrt_total();
    let values: Vec<f64> = logs.iter().map(|l| l - mean).collect();
    Ok(ClrFunction::from_parts(grid, ClrSpace::ZeroSqrtP(Arc::clone(reference)), values))
}

/// Inverse of `clr_u`: `ψ ↦ exp[ω₂(ψ)]` as a canonical `P`-density.
///
/// The second formula of the same identity, `ω[exp(ψ)]`, produces a
/// B-equivalent result and is exercised by the test suite.
pub fn clr_u_inverse(psi: &ClrFunction) -> Result<Density> {
    psi.expect_zero_sqrt_p()?;
    let defect = psi.zero_integral_defect().abs();
    let tol = INPUT_DEFECT_TOL * psi.sup_norm();
    if defect > tol {
        return Err(Error::ZeroIntegralViolated { space: psi.space.name(), defect, tol });
    }
    let xi = omega2(psi)?;
    clr_p_inverse(&xi)
}

//! `bayespace`: the geometry of weighted Bayes Hilbert spaces for probability
//! density functions.
//!
//! A density on a bounded interval is treated as a representative of a
//! *B-equivalence class*: two positive functions are the same object whenever
//! they are proportional. The space of such classes with square-integrable
//! log-density relative to a reference measure `P` is a separable Hilbert
//! space `B²(P)`, with perturbation (pointwise product) as addition and
//! powering (pointwise power) as scalar multiplication. Choosing `P` decides
//! which parts of the domain count: a reference concentrated on a subregion
//! makes differences there expensive and differences elsewhere cheap.
//!
//! What the crate provides, bottom-up:
//!
//! - [`grid`]: the shared discretization — uniform nodes on `[a, b]` with
//!   trapezoidal quadrature weights. Every function in the system is a vector
//!   of values on one `Grid`.
//! - [`measure`]: reference measures (Lebesgue, unit uniform, exponential
//!   families, sample mean) as strictly positive λ-densities, the chain-rule
//!   change of reference, and the canonical-representative normalization.
//! - [`bayes_ops`]: the Hilbert algebra of `B²(P)` — perturbation, powering,
//!   inner product, distance, sample mean, centering.
//! - [`clr`]: the transform layer — `clr_P` into `L²₀(P)`, the unweighted
//!   `clr_u` into the zero-`√P`-integral subspace of `L²(λ)`, the
//!   weighting/unweighting bijections `ω`, `ω₂` and all inverses.
//! - [`sfpca`]: weighted simplicial functional PCA via the dual Gram-matrix
//!   eigenproblem, with scores, explained ratios, reconstruction, and
//!   perturbed-mean harmonics.
//! - [`preprocess`]: histogram ingestion — Sturges classes, discrete clr of
//!   class proportions, and a zero-integral penalized cubic smoothing spline.
//! - [`simgen`]: truncated log-normal generators (including the 81-density
//!   simulation design) and the closed-form clr oracle.
//! - [`anova_select`]: reference selection by the ANOVA `SS_B/SS_T` ratio of
//!   first-component scores across labeled groups.
//! - [`linalg`]: the two small dense solvers everything above shares — a
//!   cyclic Jacobi symmetric eigensolver and a partial-pivot LU.
//!
//! # Example
//!
//! ```rust
//! use bayespace::grid::Grid;
//! use bayespace::measure::ReferenceMeasure;
//! use bayespace::{sfpca, simgen};
//!
//! let g = Grid::new(1.0, 10.0, 512).unwrap();
//! let sample = simgen::study_lognormal_sample(&g).unwrap();
//! let p0 = ReferenceMeasure::uniform_unit(&g);
//! let under_p0: Vec<_> = sample
//!     .iter()
//!     .map(|(_, f)| f.change_reference(&p0).unwrap())
//!     .collect();
//! let fit = sfpca::wsfpca(&under_p0, 2).unwrap();
//! // Two parameters (μ, σ) span the sample: two components carry everything.
//! assert!(fit.explained_ratio[0] + fit.explained_ratio[1] > 0.999_999);
//! ```

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod anova_select;
pub mod bayes_ops;
mod bspline;
pub mod clr;
pub mod grid;
mod linalg;
pub mod measure;
pub mod preprocess;
pub mod sfpca;
pub mod simgen;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid construction rejected (bounds not finite, `b <= a`, or `n < 3`).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A value vector does not match the grid's node count.
    #[error("length mismatch: grid has {expected} nodes, got {got} values")]
    LengthMismatch { expected: usize, got: usize },

    /// Operands live on different grids; resampling is out of scope.
    #[error("grid mismatch: operands must share one grid")]
    GridMismatch,

    /// Operands are expressed against different reference measures.
    #[error("reference mismatch: operands must share one reference measure")]
    ReferenceMismatch,

    /// A density or reference must be strictly positive and finite everywhere.
    #[error("{0} must be strictly positive and finite at every node")]
    NotStrictlyPositive(&'static str),

    /// Values claimed to be canonical integrate to the wrong mass.
    #[error("density not in canonical form: integral {mass} differs from reference total {total}")]
    NotNormalized { mass: f64, total: f64 },

    /// Exponential reference underflowed/overflowed at some node.
    #[error("exponential reference with delta={delta} degenerates on this domain (exp under/overflow)")]
    ExponentialDegenerate { delta: f64 },

    /// An inverse transform received a function violating its zero-integral
    /// invariant by more than the input tolerance — corrupted input.
    #[error("{space} zero-integral invariant violated: |integral| = {defect:e} exceeds tolerance {tol:e}")]
    ZeroIntegralViolated {
        space: &'static str,
        defect: f64,
        tol: f64,
    },

    /// A clr-space function was passed to an operation expecting another tag.
    #[error("clr space mismatch: expected {expected}, got {got}")]
    SpaceMismatch {
        expected: &'static str,
        got: &'static str,
    },

    /// Sample-level preconditions (size, shared grid/reference) failed.
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// Component index or count out of the result's range.
    #[error("component index out of range: {got} not in 1..={max}")]
    ComponentOutOfRange { got: usize, max: usize },

    /// Histogram/spline input rejected.
    #[error("invalid histogram input: {0}")]
    InvalidHistogram(String),

    /// A class count of zero with imputation disabled.
    #[error("class {class} has zero count; enable imputation or drop the class")]
    ZeroClassCount { class: usize },

    /// The constrained smoothing system is singular (e.g. too few data
    /// points for the knot sequence with zero penalty).
    #[error("singular smoothing system: {0}")]
    SingularSystem(String),

    /// Grouped-score preconditions failed (sizes, group structure).
    #[error("invalid groups: {0}")]
    InvalidGroups(String),

    /// All scores identical: the SS_B/SS_T ratio is undefined.
    #[error("zero total variance: SS_B/SS_T ratio undefined")]
    ZeroTotalVariance,

    /// A reference-spec string did not parse.
    #[error("unrecognized reference spec {0:?} (expected lebesgue | uniform | exp:<delta> | mean)")]
    BadRefSpec(String),

    /// `mean` reference requested without a sample to average.
    #[error("reference spec `mean` needs a sample of densities to average")]
    MeanNeedsSample,

    /// Simulation-domain preconditions failed (log-normals need t > 0, the
    /// 81-density design is defined on [1, 10]).
    #[error("invalid simulation domain: {0}")]
    InvalidDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

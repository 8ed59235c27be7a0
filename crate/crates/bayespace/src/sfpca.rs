//! Weighted simplicial functional PCA.
//!
//! The sample is centered in `B²(P)`, mapped by `clr_u` into
//! `L²_{0,√P}(λ)`, and an ordinary functional PCA is run there — the
//! isometry makes the two analyses the same thing. Because the sample size
//! `N` is far below the grid resolution `n`, the eigenproblem is solved in
//! its dual form: the `N×N` Gram matrix `G_ij = (1/N)⟨Y_i, Y_j⟩_{L²(λ)}`
//! has the same nonzero spectrum as the covariance operator, and the
//! eigenfunctions are recovered as combinations of the transformed sample.
//! The `n×n` primal matrix survives only in tests as a cross-check.
//!
//! Scores are computed in `L²(λ)` coordinates; they coincide with the
//! `B²(P)` inner products against the principal directions, which is the
//! point of the whole construction.

use std::sync::Arc;

use crate::bayes_ops::{perturb, perturb_diff, power, sample_mean};
use crate::clr::{clr_u, clr_u_inverse, ClrFunction, ClrSpace};
use crate::measure::{same_reference, Density, ReferenceMeasure};
use crate::{Error, Result};

/// Conventional display multiple for harmonics: twice the component's
/// standard deviation.
pub const DEFAULT_HARMONIC_MULTIPLE: f64 = 2.0;

/// Output of [`wsfpca`]: the decomposition of a sample of `N` densities
/// into `K` principal directions.
#[derive(Debug, Clone)]
pub struct FpcaResult {
    /// Bayes-space sample mean `f̄_P`.
    pub mean: Density,
    /// All `N−1` eigenvalues of the centered sample, descending, clamped
    /// at zero (the `N`-th is structurally zero and dropped).
    pub eigenvalues: Vec<f64>,
    /// Share of total variance per retained component, `ρ_j / Σρ`.
    pub explained_ratio: Vec<f64>,
    /// `clr_u(ξ_{P,j})` — the retained directions, orthonormal in `L²(λ)`.
    pub directions_clr: Vec<ClrFunction>,
    /// The same directions pulled back to densities, `ξ_{P,j}`.
    pub directions_density: Vec<Density>,
    /// `N×K` score matrix: `scores[i][j] = ⟨clr_u(f̃_i), clr_u(ξ_j)⟩_{L²(λ)}`.
    pub scores: Vec<Vec<f64>>,
    /// Indices `i` (0-based) where `ρ_i` and `ρ_{i+1}` are closer than
    /// `1e-10·ρ_1`: the span is trustworthy, the individual directions in
    /// such a cluster are not.
    pub degenerate_pairs: Vec<usize>,
}

impl FpcaResult {
    /// The reference measure the analysis ran under.
    pub fn reference(&self) -> &Arc<ReferenceMeasure> {
        self.mean.reference()
    }

    /// Number of retained components.
    pub fn components(&self) -> usize {
        self.directions_clr.len()
    }
}

/// Runs the weighted simplicial functional PCA of `sample` under its own
/// reference, retaining `k` components (`1 ≤ k ≤ N−1`).
pub fn wsfpca(sample: &[Density], k: usize) -> Result<FpcaResult> {
    let n_sample = sample.len();
    if n_sample < 2 {
        return Err(Error::InvalidSample(format!(
            "functional PCA needs at least 2 densities, got {n_sample}"
        )));
    }
    if k == 0 || k > n_sample - 1 {
        return Err(Error::ComponentOutOfRange {
            got: k,
            max: n_sample - 1,
        });
    }

    let mean = sample_mean(sample)?;
    let reference = mean.reference().clone();
    let grid = mean.grid().clone();
    let transformed: Vec<Vec<f64>> = sample
        .iter()
        .map(|f| Ok(clr_u(&perturb_diff(f, &mean)?).values().to_vec()))
        .collect::<Result<_>>()?;

    let inv_n = 1.0 / n_sample as f64;
    let mut gram = vec![vec![0.0; n_sample]; n_sample];
    for i in 0..n_sample {
        for j in i..n_sample {
            let prod: Vec<f64> = transformed[i]
                .iter()
                .zip(&transformed[j])
                .map(|(a, b)| a * b)
                .collect();
            let g = inv_n * grid.integrate(&prod).expect("clr_u lives on the grid");
            gram[i][j] = g;
            gram[j][i] = g;
        }
    }
    let total_variance: f64 = (0..n_sample).map(|i| gram[i][i]).sum();

    let (raw_eigenvalues, eigenvectors) = crate::linalg::jacobi_eigen(gram);
    let eigenvalues: Vec<f64> = raw_eigenvalues[..n_sample - 1]
        .iter()
        .map(|&rho| rho.max(0.0))
        .collect();
    let explained_ratio: Vec<f64> = eigenvalues[..k]
        .iter()
        .map(|&rho| if total_variance > 0.0 { rho / total_variance } else { 0.0 })
        .collect();
    let degenerate_pairs: Vec<usize> = (0..eigenvalues.len() - 1)
        .filter(|&i| (eigenvalues[i] - eigenvalues[i + 1]).abs() < 1e-10 * eigenvalues[0])
        .collect();

    let mut directions_clr = Vec::with_capacity(k);
    let mut directions_density = Vec::with_capacity(k);
    for coeffs in eigenvectors.iter().take(k) {
        let mut v = vec![0.0; grid.len()];
        for (c, y) in coeffs.iter().zip(&transformed) {
            for (vk, yk) in v.iter_mut().zip(y) {
                *vk += c * yk;
            }
        }
        // Normalize in L²(λ); a numerically null direction stays zero.
        let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
        let nrm = grid.integrate(&sq).expect("same grid").max(0.0).sqrt();
        if nrm > 0.0 {
            for x in v.iter_mut() {
                *x /= nrm;
            }
        }
        // Sign convention: first nonzero value (scanning from the left
        // grid edge) is positive, so repeated runs and equivalent inputs
        // produce identical plots.
        if let Some(&first) = v.iter().find(|x| **x != 0.0) {
            if first < 0.0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
        }
        let dir = ClrFunction::from_parts(&grid, ClrSpace::ZeroSqrtP(reference.clone()), v);
        // Pull back to a density by the inverse chain ω₂ then exp, without
        // the public inverse's corruption gate: the direction is our own
        // exact linear combination of clr_u images, so its defect is
        // floating-point noise even when ρ_j underflows.
        let density_values: Vec<f64> = dir
            .values()
            .iter()
            .zip(reference.sqrt_density())
            .map(|(x, sp)| (x / sp).exp())
            .collect();
        directions_density.push(Density::new(&reference, density_values)?);
        directions_clr.push(dir);
    }

    let scores: Vec<Vec<f64>> = transformed
        .iter()
        .map(|y| {
            directions_clr
                .iter()
                .map(|dir| {
                    let prod: Vec<f64> =
                        y.iter().zip(dir.values()).map(|(a, b)| a * b).collect();
                    grid.integrate(&prod).expect("same grid")
                })
                .collect()
        })
        .collect();

    Ok(FpcaResult {
        mean,
        eigenvalues,
        explained_ratio,
        directions_clr,
        directions_density,
        scores,
        degenerate_pairs,
    })
}

/// Projects `f` onto the affine subspace spanned by the first `k` retained
/// directions around the mean: `f̄_P ⊕_P (⊕_{j≤k} f_j ⊙_P ξ_{P,j})`.
/// `k = 0` returns the mean.
pub fn project(result: &FpcaResult, f: &Density, k: usize) -> Result<Density> {
    same_reference(f.reference(), result.reference())?;
    if k > result.components() {
        return Err(Error::ComponentOutOfRange {
            got: k,
            max: result.components(),
        });
    }
    let grid = result.mean.grid();
    let y = clr_u(&perturb_diff(f, &result.mean)?);
    let mut recon = vec![0.0; grid.len()];
    for dir in &result.directions_clr[..k] {
        let prod: Vec<f64> = y
            .values()
            .iter()
            .zip(dir.values())
            .map(|(a, b)| a * b)
            .collect();
        let score = grid.integrate(&prod).expect("same grid");
        for (r, d) in recon.iter_mut().zip(dir.values()) {
            *r += score * d;
        }
    }
    let offset = clr_u_inverse(&ClrFunction::from_parts(
        grid,
        ClrSpace::ZeroSqrtP(result.reference().clone()),
        recon,
    ))?;
    perturb(&result.mean, &offset)
}

/// The `j`-th harmonic pair (`j` is 1-based): the mean perturbed up and down
/// by the direction powered to `multiple` standard deviations,
/// `f̄ ⊕ (m√ρ_j ⊙ ξ_j)` and `f̄ ⊖ (m√ρ_j ⊙ ξ_j)`.
pub fn harmonic(result: &FpcaResult, j: usize, multiple: f64) -> Result<(Density, Density)> {
    if j == 0 || j > result.components() {
        return Err(Error::ComponentOutOfRange {
            got: j,
            max: result.components(),
        });
    }
    let amplitude = multiple * result.eigenvalues[j - 1].sqrt();
    let step = power(amplitude, &result.directions_density[j - 1]);
    Ok((
        perturb(&result.mean, &step)?,
        perturb_diff(&result.mean, &step)?,
    ))
}

/// The score matrix with 1-based sample labels, row `i` ↔ `sample[i−1]`.
pub fn scores_table(result: &FpcaResult) -> Vec<(usize, Vec<f64>)> {
    result
        .scores
        .iter()
        .enumerate()
        .map(|(i, row)| (i + 1, row.clone()))
        .collect()
}

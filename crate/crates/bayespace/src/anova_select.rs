//! Reference-measure selection: run the functional PCA under each candidate
//! reference, decompose the first-component scores by a one-way ANOVA over
//! the given group labels, and rank candidates by the between-group share
//! `SS_B/SS_T` of the score variance.

use crate::measure::{Density, RefSpec};
use crate::sfpca::wsfpca;
use crate::{Error, Result};

/// First-component scores with a group label per observation.
#[derive(Debug, Clone)]
pub struct GroupedScores {
    scores: Vec<f64>,
    groups: Vec<String>,
}

impl GroupedScores {
    /// Requires equal lengths and at least two distinct groups (every group
    /// mentioned has at least one member by construction).
    pub fn new(scores: Vec<f64>, groups: Vec<String>) -> Result<Self> {
        if scores.len() != groups.len() {
            return Err(Error::InvalidGroups(format!(
                "{} scores but {} group labels",
                scores.len(),
                groups.len()
            )));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidGroups("scores must be finite".into()));
        }
        let mut distinct: Vec<&String> = groups.iter().collect();
        distinct.sort();
        distinct.dedup();
        if distinct.len() < 2 {
            return Err(Error::InvalidGroups(format!(
                "need at least 2 distinct groups, got {}",
                distinct.len()
            )));
        }
        Ok(GroupedScores { scores, groups })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }
}

/// One-way ANOVA decomposition of the scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsDecomposition {
    /// Between-group sum of squares `Σ_g n_g (x̄_g − x̄)²`.
    pub ss_b: f64,
    /// Within-group sum of squares `Σ_g Σ_{i∈g} (x_i − x̄_g)²`.
    pub ss_w: f64,
    /// Total sum of squares `Σ_i (x_i − x̄)²`.
    pub ss_t: f64,
    /// Between share `SS_B / SS_T` — the selection criterion.
    pub ratio: f64,
}

/// Computes the three sums of squares independently (so the identity
/// `SS_B + SS_W = SS_T` is a meaningful floating-point check, not a
/// tautology) and the ratio. Fails on zero total variance.
pub fn ss_decomposition(gs: &GroupedScores) -> Result<SsDecomposition> {
    let n = gs.scores.len() as f64;
    let grand = gs.scores.iter().sum::<f64>() / n;
    let ss_t: f64 = gs.scores.iter().map(|x| (x - grand) * (x - grand)).sum();
    if ss_t <= 0.0 {
        return Err(Error::ZeroTotalVariance);
    }

    // Group means first, then the two sums, in label-sorted order for
    // deterministic accumulation.
    let mut table: std::collections::BTreeMap<&str, (f64, f64)> = Default::default();
    for (x, g) in gs.scores.iter().zip(&gs.groups) {
        let entry = table.entry(g).or_insert((0.0, 0.0));
        entry.0 += x;
        entry.1 += 1.0;
    }
    let ss_b: f64 = table
        .values()
        .map(|(sum, count)| {
            let mean = sum / count;
            count * (mean - grand) * (mean - grand)
        })
        .sum();
    let ss_w: f64 = gs
        .scores
        .iter()
        .zip(&gs.groups)
        .map(|(x, g)| {
            let (sum, count) = table[g.as_str()];
            let mean = sum / count;
            (x - mean) * (x - mean)
        })
        .sum();
    Ok(SsDecomposition { ss_b, ss_w, ss_t, ratio: ss_b / ss_t })
}

/// A candidate's outcome in [`select_reference`].
#[derive(Debug, Clone)]
pub struct RankedCandidate {
    pub spec: RefSpec,
    pub decomposition: SsDecomposition,
    pub winner: bool,
}

/// Evaluates every candidate reference on the λ-sample: change reference,
/// run the one-component functional PCA, decompose the first scores over
/// `groups`. Returns candidates sorted by descending ratio (ties keep the
/// supplied order); the first entry is marked as the winner.
pub fn select_reference(
    sample: &[Density],
    groups: &[String],
    candidates: &[RefSpec],
) -> Result<Vec<RankedCandidate>> {
    if candidates.is_empty() {
        return Err(Error::InvalidGroups("no candidate references given".into()));
    }
    if sample.len() != groups.len() {
        return Err(Error::InvalidGroups(format!(
            "{} densities but {} group labels",
            sample.len(),
            groups.len()
        )));
    }
    let first = sample
        .first()
        .ok_or_else(|| Error::InvalidSample("reference selection needs densities".into()))?;
    let grid = first.grid().clone();

    let mut ranked = Vec::with_capacity(candidates.len());
    for spec in candidates {
        let reference = spec.resolve(&grid, Some(sample))?;
        let under: Vec<Density> = sample
            .iter()
            .map(|f| f.change_reference(&reference))
            .collect::<Result<_>>()?;
        let fit = wsfpca(&under, 1)?;
        let pc1: Vec<f64> = fit.scores.iter().map(|row| row[0]).collect();
        let decomposition = ss_decomposition(&GroupedScores::new(pc1, groups.to_vec())?)?;
        ranked.push(RankedCandidate { spec: spec.clone(), decomposition, winner: false });
    }
    // Stable sort: equal ratios stay in candidate order.
    ranked.sort_by(|a, b| {
        b.decomposition
            .ratio
            .partial_cmp(&a.decomposition.ratio)
            .expect("ratios are finite")
    });
    ranked[0].winner = true;
    Ok(ranked)
}

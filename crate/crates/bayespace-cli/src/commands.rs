//! The four subcommand implementations. Every command is a pure function of
//! its inputs and flags, so identical invocations produce byte-identical
//! output files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;

use anyhow::{bail, ensure, Context, Result};
use bayespace::anova_select;
use bayespace::clr::omega_inverse;
use bayespace::grid::Grid;
use bayespace::measure::{Density, RefSpec};
use bayespace::preprocess::{clr_curve_to_density, histogram_to_dclr, smooth_dclr};
use bayespace::sfpca::{harmonic, wsfpca};
use bayespace::simgen::study_lognormal_sample;

use crate::io::{self, fmt17};
use crate::{Family, FpcaArgs, SelectReferenceArgs, SimulateArgs, SmoothArgs};

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let (a, b) = io::parse_domain(&args.domain)?;
    match args.family {
        Family::LognormalStudy => {
            if (a, b) != (1.0, 10.0) {
                bail!("family lognormal-study is defined on the domain 1:10, got {a}:{b}");
            }
            let g = Grid::new(a, b, args.n)?;
            let sample = study_lognormal_sample(&g)?;
            let ids: Vec<String> = sample.iter().map(|(k, _)| format!("k{k}")).collect();
            let densities: Vec<Density> = sample.into_iter().map(|(_, f)| f).collect();
            io::write_density_table(&args.out, &RefSpec::Lebesgue, &ids, &densities)?;
        }
    }
    Ok(())
}

/// Loads a density table and checks it is stored against Lebesgue — analysis
/// commands take unweighted input and apply any reference change themselves.
fn read_lebesgue_table(path: &std::path::Path) -> Result<io::DensityTable> {
    let table = io::read_density_table(path)?;
    if table.reference != RefSpec::Lebesgue {
        bail!(
            "input table is stored against reference `{}`; expected `lebesgue`",
            table.reference
        );
    }
    Ok(table)
}

pub fn fpca(args: &FpcaArgs) -> Result<()> {
    let table = read_lebesgue_table(&args.input)?;
    let reference = args.reference.resolve(&table.grid, Some(&table.densities))?;
    let sample: Vec<Density> = table
        .densities
        .iter()
        .map(|f| f.change_reference(&reference))
        .collect::<bayespace::Result<_>>()?;
    let fit = wsfpca(&sample, args.components)?;
    let k = fit.components();

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let path = |name: &str| args.out_dir.join(name);
    let pc_ids: Vec<String> = (1..=k).map(|j| format!("pc{j}")).collect();

    // Principal directions as clr_u curves …
    let clr_cols: Vec<&[f64]> = fit.directions_clr.iter().map(|d| d.values()).collect();
    io::write_curve_table(&path("directions_clr.csv"), &table.grid, "clr_u", &pc_ids, &clr_cols)?;

    // … and pulled back to ordinary densities, like the mean and harmonics.
    let unweighted: Vec<Density> = fit.directions_density.iter().map(omega_inverse).collect();
    io::write_density_table(
        &path("directions_unweighted.csv"),
        &RefSpec::Lebesgue,
        &pc_ids,
        &unweighted,
    )?;

    let mut harmonic_ids = Vec::with_capacity(2 * k);
    let mut harmonic_curves = Vec::with_capacity(2 * k);
    for j in 1..=k {
        let (plus, minus) = harmonic(&fit, j, args.harmonic_multiple)?;
        harmonic_ids.push(format!("pc{j}_minus"));
        harmonic_curves.push(omega_inverse(&minus));
        harmonic_ids.push(format!("pc{j}_plus"));
        harmonic_curves.push(omega_inverse(&plus));
    }
    io::write_density_table(
        &path("harmonics.csv"),
        &RefSpec::Lebesgue,
        &harmonic_ids,
        &harmonic_curves,
    )?;

    io::write_density_table(
        &path("mean.csv"),
        &RefSpec::Lebesgue,
        &["mean".to_string()],
        &[omega_inverse(&fit.mean)],
    )?;

    let scores_csv = render_scores(&table.ids, &fit.scores);
    fs::write(path("scores.csv"), &scores_csv)
        .with_context(|| format!("writing {}", path("scores.csv").display()))?;

    let ratio_sum: f64 = fit.explained_ratio.iter().sum();
    ensure!(ratio_sum <= 1.0 + 1e-9, "explained ratios sum to {ratio_sum}");

    let mut result = String::new();
    let _ = writeln!(result, "wsfpca result");
    let _ = writeln!(result, "reference: {}", args.reference);
    let _ = writeln!(result, "samples: {}", sample.len());
    let _ = writeln!(result, "components: {k}");
    let _ = writeln!(
        result,
        "eigenvalues: {}",
        fit.eigenvalues.iter().map(|x| fmt17(*x)).collect::<Vec<_>>().join(" ")
    );
    let _ = writeln!(
        result,
        "explained_ratio: {}",
        fit.explained_ratio.iter().map(|x| fmt17(*x)).collect::<Vec<_>>().join(" ")
    );
    // Only clusters touching a retained component are worth flagging; ties
    // deep in the zero tail are expected and say nothing about pc1..pck.
    let flagged: Vec<String> = fit
        .degenerate_pairs
        .iter()
        .filter(|&&i| i < k)
        .map(|i| format!("pc{}~pc{}", i + 1, i + 2))
        .collect();
    let _ = writeln!(
        result,
        "degenerate_pairs: {}",
        if flagged.is_empty() { "none".to_string() } else { flagged.join(" ") }
    );
    let _ = writeln!(
        result,
        "curves: directions_clr.csv directions_unweighted.csv harmonics.csv mean.csv"
    );
    let _ = writeln!(result, "scores: scores.csv");
    let _ = writeln!(result, "scores_table:");
    result.push_str(&scores_csv);
    fs::write(path("result.txt"), result)
        .with_context(|| format!("writing {}", path("result.txt").display()))?;
    Ok(())
}

fn render_scores(ids: &[String], scores: &[Vec<f64>]) -> String {
    let k = scores.first().map_or(0, Vec::len);
    let mut out = String::from("id");
    for j in 1..=k {
        let _ = write!(out, ",pc{j}");
    }
    out.push('\n');
    for (id, row) in ids.iter().zip(scores) {
        let _ = write!(out, "{id}");
        for s in row {
            let _ = write!(out, ",{}", fmt17(*s));
        }
        out.push('\n');
    }
    out
}

pub fn smooth(args: &SmoothArgs) -> Result<()> {
    let (a, b) = io::parse_domain(&args.domain)?;
    let g = Grid::new(a, b, args.n)?;
    let histograms = io::read_histograms(&args.input)?;
    if histograms.is_empty() {
        bail!("no histograms in {}", args.input.display());
    }
    let mut ids = Vec::with_capacity(histograms.len());
    let mut densities = Vec::with_capacity(histograms.len());
    for h in &histograms {
        let points = histogram_to_dclr(h, args.impute)
            .with_context(|| format!("histogram {:?}", h.label()))?;
        let curve = smooth_dclr(&points, &g, &args.knots, args.penalty)
            .with_context(|| format!("smoothing histogram {:?}", h.label()))?;
        densities.push(clr_curve_to_density(&curve)?);
        ids.push(h.label().to_string());
    }
    io::write_density_table(&args.out, &RefSpec::Lebesgue, &ids, &densities)
}

pub fn select_reference(args: &SelectReferenceArgs) -> Result<()> {
    let table = read_lebesgue_table(&args.input)?;
    let mapping: HashMap<String, String> = io::read_groups(&args.groups)?.into_iter().collect();
    let groups: Vec<String> = table
        .ids
        .iter()
        .map(|id| {
            mapping
                .get(id)
                .cloned()
                .with_context(|| format!("no group for density id {id:?}"))
        })
        .collect::<Result<_>>()?;

    let ranked = anova_select::select_reference(&table.densities, &groups, &args.candidates)?;
    let mut out = String::from("reference,ss_b,ss_w,ss_t,ratio,winner\n");
    for candidate in &ranked {
        let d = candidate.decomposition;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            candidate.spec,
            fmt17(d.ss_b),
            fmt17(d.ss_w),
            fmt17(d.ss_t),
            fmt17(d.ratio),
            candidate.winner
        );
    }
    match &args.out {
        Some(path) => {
            fs::write(path, out).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{out}"),
    }
    Ok(())
}

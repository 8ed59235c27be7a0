//! On-disk formats: density/curve tables as CSV with `#` metadata headers,
//! long-form histogram CSV, and the id→group mapping.
//!
//! Numbers are serialized with 17 significant digits, which is enough for
//! any `f64` to survive a write/read round trip bit-exactly; together with
//! [`Density::from_normalized`] on the read side, a table written by this
//! tool reloads into the same in-memory values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use bayespace::grid::Grid;
use bayespace::measure::{Density, RefSpec};
use bayespace::preprocess::Histogram;

/// 17-significant-digit serialization; the round-trip-exact format.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A parsed density table: grid, declared reference, column ids, and the
/// densities materialized against the resolved reference.
pub struct DensityTable {
    pub grid: Grid,
    pub reference: RefSpec,
    pub ids: Vec<String>,
    pub densities: Vec<Density>,
}

fn render_table(
    meta: &[(&str, String)],
    ids: &[String],
    nodes: &[f64],
    columns: &[&[f64]],
) -> String {
    let mut out = String::new();
    for (key, value) in meta {
        let _ = writeln!(out, "# {key}={value}");
    }
    out.push('t');
    for id in ids {
        let _ = write!(out, ",{id}");
    }
    out.push('\n');
    for (i, t) in nodes.iter().enumerate() {
        let _ = write!(out, "{}", fmt17(*t));
        for col in columns {
            let _ = write!(out, ",{}", fmt17(col[i]));
        }
        out.push('\n');
    }
    out
}

fn domain_string(g: &Grid) -> String {
    format!("{}:{}", g.a(), g.b())
}

/// Writes a density table: `# domain`, `# reference`, then `t,<id>,...` rows.
pub fn write_density_table(
    path: &Path,
    spec: &RefSpec,
    ids: &[String],
    sample: &[Density],
) -> Result<()> {
    assert_eq!(ids.len(), sample.len());
    let g = sample
        .first()
        .map(|f| f.grid().clone())
        .context("writing an empty density table")?;
    let columns: Vec<&[f64]> = sample.iter().map(|f| f.values()).collect();
    let meta = [
        ("domain", domain_string(&g)),
        ("reference", spec.to_string()),
    ];
    let text = render_table(&meta, ids, g.nodes(), &columns);
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes a curve table (clr functions may be negative, so no reference
/// line — just the domain and a `space` tag).
pub fn write_curve_table(
    path: &Path,
    g: &Grid,
    space: &str,
    ids: &[String],
    columns: &[&[f64]],
) -> Result<()> {
    let meta = [("domain", domain_string(g)), ("space", space.to_string())];
    let text = render_table(&meta, ids, g.nodes(), columns);
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Reads a density table written by [`write_density_table`] (or any file in
/// the same format). Values that are already canonical are kept bit-exact;
/// off-scale columns are renormalized on the way in.
pub fn read_density_table(path: &Path) -> Result<DensityTable> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut meta_domain = None;
    let mut meta_reference = None;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
    while let Some(&line) = lines.peek() {
        let Some(rest) = line.strip_prefix('#') else { break };
        lines.next();
        let Some((key, value)) = rest.trim().split_once('=') else {
            bail!("malformed metadata line {line:?} (expected `# key=value`)");
        };
        match key.trim() {
            "domain" => meta_domain = Some(value.trim().to_string()),
            "reference" => meta_reference = Some(value.trim().to_string()),
            _ => {} // unknown metadata is tolerated
        }
    }
    let domain = meta_domain.context("missing `# domain=a:b` metadata line")?;
    let (a, b) = parse_domain(&domain)?;
    let reference: RefSpec = meta_reference
        .context("missing `# reference=<spec>` metadata line")?
        .parse()?;

    let header = lines.next().context("missing `t,<id>,...` header row")?;
    let mut fields = header.split(',');
    if fields.next() != Some("t") {
        bail!("header must start with a `t` column, got {header:?}");
    }
    let ids: Vec<String> = fields.map(|s| s.trim().to_string()).collect();
    if ids.is_empty() {
        bail!("density table has no value columns");
    }

    let mut nodes = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); ids.len()];
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != ids.len() + 1 {
            bail!(
                "row {:?} has {} cells, expected {}",
                line,
                cells.len(),
                ids.len() + 1
            );
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("unparseable number {s:?}"))
        };
        nodes.push(parse(cells[0])?);
        for (col, cell) in columns.iter_mut().zip(&cells[1..]) {
            col.push(parse(cell)?);
        }
    }

    let g = Grid::new(a, b, nodes.len())?;
    let tol = 1e-12 * (b - a);
    for (read, expected) in nodes.iter().zip(g.nodes()) {
        if (read - expected).abs() > tol {
            bail!("t column does not match an equispaced grid on {domain}");
        }
    }

    let resolved = match &reference {
        RefSpec::Mean => bail!("cannot load a table stored against a `mean` reference"),
        spec => spec.resolve(&g, None)?,
    };
    let densities = columns
        .into_iter()
        .map(|col| match Density::from_normalized(&resolved, col) {
            Ok(f) => Ok(f),
            Err(bayespace::Error::NotNormalized { .. }) => {
                bail!("column values are not in canonical form (∫f dP ≠ P(Ω))")
            }
            Err(e) => Err(e.into()),
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(DensityTable { grid: g, reference, ids, densities })
}

/// Parses a `a:b` domain string.
pub fn parse_domain(s: &str) -> Result<(f64, f64)> {
    let parse = |p: &str| -> Result<f64> {
        p.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .with_context(|| format!("bad domain endpoint {p:?}"))
    };
    let Some((a, b)) = s.split_once(':') else {
        bail!("domain must be written `a:b`, got {s:?}");
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if b <= a {
        bail!("empty domain {a}:{b}");
    }
    Ok((a, b))
}

/// Reads long-form histograms (`id,lower,upper,count`); one [`Histogram`]
/// per id, in order of first appearance. Each id's classes must tile an
/// interval without gaps.
pub fn read_histograms(path: &Path) -> Result<Vec<Histogram>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("empty histogram file")?;
    if header.trim() != "id,lower,upper,count" {
        bail!("histogram header must be `id,lower,upper,count`, got {header:?}");
    }

    let mut order: Vec<String> = Vec::new();
    let mut classes: Vec<Vec<(f64, f64, f64)>> = Vec::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let [id, lower, upper, count] = cells.as_slice() else {
            bail!("histogram row {line:?} must have 4 cells");
        };
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("unparseable {what} {s:?} in row {line:?}"))
        };
        let row = (
            parse(lower, "lower edge")?,
            parse(upper, "upper edge")?,
            parse(count, "count")?,
        );
        let id = id.trim();
        match order.iter().position(|o| o == id) {
            Some(i) => classes[i].push(row),
            None => {
                order.push(id.to_string());
                classes.push(vec![row]);
            }
        }
    }

    let mut histograms = Vec::with_capacity(order.len());
    for (id, rows) in order.into_iter().zip(classes) {
        let mut edges = vec![rows[0].0];
        let mut counts = Vec::with_capacity(rows.len());
        for &(lower, upper, count) in &rows {
            let prev = *edges.last().unwrap();
            if (lower - prev).abs() > 1e-9 * (upper - lower).abs() {
                bail!("histogram {id:?}: class [{lower}, {upper}] does not continue at {prev}");
            }
            edges.push(upper);
            counts.push(count);
        }
        histograms.push(Histogram::new(id, edges, counts)?);
    }
    Ok(histograms)
}

/// Reads the `id,group` mapping; duplicate ids are rejected.
pub fn read_groups(path: &Path) -> Result<Vec<(String, String)>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("empty groups file")?;
    if header.trim() != "id,group" {
        bail!("groups header must be `id,group`, got {header:?}");
    }
    let mut pairs: Vec<(String, String)> = Vec::new();
    for line in lines {
        let Some((id, group)) = line.split_once(',') else {
            bail!("groups row {line:?} must be `id,group`");
        };
        let id = id.trim().to_string();
        if pairs.iter().any(|(seen, _)| *seen == id) {
            bail!("duplicate id {id:?} in groups file");
        }
        pairs.push((id, group.trim().to_string()));
    }
    Ok(pairs)
}

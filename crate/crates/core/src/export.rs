//! Plain-text result files.
//!
//! Floats are written with 17 significant digits so they parse back to the
//! same bits.

use std::io::{self, Write};

use crate::continuation::ContinuationResult;
use crate::featurize::FeatureVector;
use crate::mapping::{Attractor, BasinsGrid, Label};

/// Round-trippable representation of `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn join(values: &[f64], sep: &str) -> String {
    values
        .iter()
        .map(|&v| fmt_f64(v))
        .collect::<Vec<_>>()
        .join(sep)
}

/// One comma-separated row per (parameter point, label): parameter values,
/// label, fraction, stored point count and centroid coordinates. Rows of
/// [`DIVERGED`](crate::mapping::DIVERGED) have a point count of 0 and empty
/// centroid fields.
pub fn write_fractions_table<W: Write>(mut w: W, result: &ContinuationResult) -> io::Result<()> {
    let dim = result
        .attractors
        .iter()
        .flat_map(|a| a.values().map(Attractor::dimension))
        .max()
        .unwrap_or(0);
    let mut header: Vec<String> = result
        .parameter_indices
        .iter()
        .map(|i| format!("p{i}"))
        .collect();
    header.extend(["label", "fraction", "npoints"].map(String::from));
    header.extend((0..dim).map(|k| format!("c{k}")));
    writeln!(w, "{}", header.join(","))?;
    for (s, point) in result.parameters.iter().enumerate() {
        for (label, fraction) in result.fractions[s].iter() {
            let mut row: Vec<String> = point.iter().map(|&v| fmt_f64(v)).collect();
            row.push(label.to_string());
            row.push(fmt_f64(fraction));
            match result.attractors[s].get(&label) {
                Some(a) => {
                    row.push(a.points().len().to_string());
                    let mut c = a.centroid();
                    c.resize(dim, f64::NAN);
                    row.extend(c.iter().map(|&v| fmt_f64(v)));
                }
                None => {
                    row.push("0".to_string());
                    row.extend(std::iter::repeat_n(String::new(), dim));
                }
            }
            writeln!(w, "{}", row.join(","))?;
        }
    }
    Ok(())
}

/// Header `# label=<l> param=<values> npoints=<n>` followed by one
/// space-separated state per line. Several parameter values are separated by
/// commas.
pub fn write_attractor<W: Write>(
    mut w: W,
    label: Label,
    parameter: &[f64],
    attractor: &Attractor,
) -> io::Result<()> {
    writeln!(
        w,
        "# label={label} param={} npoints={}",
        join(parameter, ","),
        attractor.points().len()
    )?;
    for p in attractor.points() {
        writeln!(w, "{}", join(p, " "))?;
    }
    Ok(())
}

/// File name of the dump of attractor `label` at step `step`.
pub fn attractor_file_name(step: usize, label: Label) -> String {
    format!("attractor_step{step:04}_label{label}.txt")
}

/// One comma-separated row per initial condition: the features, then the
/// group label. Diverged trajectories have `NaN` features.
pub fn write_features<W: Write>(
    mut w: W,
    features: &[Option<FeatureVector>],
    labels: &[Label],
) -> io::Result<()> {
    let k = features.iter().flatten().map(Vec::len).max().unwrap_or(0);
    let mut header: Vec<String> = (0..k).map(|i| format!("f{i}")).collect();
    header.push("label".into());
    writeln!(w, "{}", header.join(","))?;
    for (f, l) in features.iter().zip(labels) {
        let row = match f {
            Some(f) => join(f, ","),
            None => join(&vec![f64::NAN; k], ","),
        };
        if k == 0 {
            writeln!(w, "{l}")?;
        } else {
            writeln!(w, "{row},{l}")?;
        }
    }
    Ok(())
}

/// Header `# shape=<n1>,<n2>,...` followed by the cell labels in linear-index
/// order, one line per run of the last axis.
pub fn write_basins_grid<W: Write>(mut w: W, grid: &BasinsGrid) -> io::Result<()> {
    let shape: Vec<String> = grid.shape.iter().map(usize::to_string).collect();
    writeln!(w, "# shape={}", shape.join(","))?;
    let row = grid.shape.last().copied().unwrap_or(1).max(1);
    for chunk in grid.labels.chunks(row) {
        let line: Vec<String> = chunk.iter().map(Label::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

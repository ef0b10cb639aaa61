use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::{Label, DIVERGED};

use super::dbscan::distance;
use super::FeatureVector;

/// How to turn feature vectors into groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupingConfig {
    /// DBSCAN on rescaled features; `radius = None` searches for it.
    Clustering {
        #[serde(default = "default_min_pts")]
        min_pts: usize,
        #[serde(default)]
        radius: Option<f64>,
    },
    /// One group per occupied bin; `edges[k]` are the bin edges of dimension k.
    Histogram { edges: Vec<Vec<f64>> },
    /// Label of the nearest template, or -1 beyond `max_distance` (no limit
    /// when absent).
    NearestTemplate {
        templates: BTreeMap<Label, FeatureVector>,
        #[serde(default)]
        max_distance: Option<f64>,
    },
}

fn default_min_pts() -> usize {
    10
}

impl GroupingConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            GroupingConfig::Clustering { min_pts, radius } => {
                if *min_pts == 0 {
                    return Err(Error::config("min_pts must be at least 1"));
                }
                if let Some(r) = radius {
                    if !(*r > 0.0) {
                        return Err(Error::config(format!(
                            "clustering radius must be positive, got {r}"
                        )));
                    }
                }
            }
            GroupingConfig::Histogram { edges } => validate_edges(edges)?,
            GroupingConfig::NearestTemplate {
                templates,
                max_distance,
            } => {
                if templates.is_empty() {
                    return Err(Error::config(
                        "nearest-template grouping needs at least one template",
                    ));
                }
                if max_distance.is_some_and(|d| d.is_nan() || d < 0.0) {
                    return Err(Error::config("max_distance must be non-negative"));
                }
            }
        }
        Ok(())
    }
}

fn validate_edges(edges: &[Vec<f64>]) -> Result<()> {
    for (dim, e) in edges.iter().enumerate() {
        if e.len() < 2 {
            return Err(Error::config(format!(
                "dimension {dim}: need at least two bin edges"
            )));
        }
        if e.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::config(format!(
                "dimension {dim}: bin edges must be strictly increasing"
            )));
        }
    }
    Ok(())
}

/// Bin of `x` among half-open bins `[e_i, e_{i+1})`, the last bin closed.
fn bin(edges: &[f64], x: f64) -> Option<usize> {
    let last = *edges.last()?;
    if !(x >= edges[0] && x <= last) {
        return None;
    }
    let i = edges.partition_point(|&e| e <= x);
    Some((i - 1).min(edges.len() - 2))
}

/// Group by multidimensional histogram bin. Labels number the occupied bins
/// 1.. in lexicographic bin order; features outside the edges get -1.
pub fn group_by_histogram(features: &[FeatureVector], edges: &[Vec<f64>]) -> Result<Vec<Label>> {
    validate_edges(edges)?;
    let bins: Vec<Option<Vec<usize>>> = features
        .iter()
        .map(|f| {
            if f.len() != edges.len() {
                return Err(Error::Dimension {
                    expected: edges.len(),
                    found: f.len(),
                });
            }
            Ok(f.iter().zip(edges).map(|(&x, e)| bin(e, x)).collect())
        })
        .collect::<Result<_>>()?;
    let occupied: BTreeSet<&Vec<usize>> = bins.iter().flatten().collect();
    let dense: BTreeMap<&Vec<usize>, Label> = occupied
        .into_iter()
        .enumerate()
        .map(|(k, b)| (b, k as Label + 1))
        .collect();
    Ok(bins
        .iter()
        .map(|b| b.as_ref().map_or(DIVERGED, |b| dense[b]))
        .collect())
}

/// Label of the Euclidean-nearest template (smallest label on ties), or -1
/// when that template is farther than `max_distance`.
pub fn group_by_nearest_template(
    features: &[FeatureVector],
    templates: &BTreeMap<Label, FeatureVector>,
    max_distance: f64,
) -> Result<Vec<Label>> {
    if templates.is_empty() {
        return Err(Error::config(
            "nearest-template grouping needs at least one template",
        ));
    }
    Ok(features
        .iter()
        .map(|f| {
            let mut best = (f64::INFINITY, DIVERGED);
            for (&label, t) in templates {
                let d = distance(f, t);
                if d < best.0 {
                    best = (d, label);
                }
            }
            if best.0 <= max_distance {
                best.1
            } else {
                DIVERGED
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn histogram_examples() {
        let f = vec![vec![0.05], vec![0.95], vec![0.07]];
        assert_eq!(
            group_by_histogram(&f, &[vec![0.0, 0.5, 1.0]]).unwrap(),
            vec![1, 2, 1]
        );
        let one = vec![vec![0.1], vec![0.2], vec![0.3]];
        assert_eq!(
            group_by_histogram(&one, &[vec![0.0, 0.5, 1.0]]).unwrap(),
            vec![1, 1, 1]
        );
        assert_eq!(
            group_by_histogram(&[vec![1.5]], &[vec![0.0, 1.0]]).unwrap(),
            vec![-1]
        );
        assert_eq!(
            group_by_histogram(&[vec![1.0]], &[vec![0.0, 0.5, 1.0]]).unwrap(),
            vec![1]
        );
    }

    #[test]
    fn histogram_rejects_bad_edges() {
        assert!(group_by_histogram(&[vec![0.5]], &[vec![0.0, 1.0, 1.0]]).is_err());
        assert!(group_by_histogram(&[vec![0.5]], &[vec![1.0, 0.0]]).is_err());
        assert!(group_by_histogram(&[vec![0.5]], &[vec![0.0]]).is_err());
        assert!(group_by_histogram(&[vec![0.5, 0.5]], &[vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn template_examples() {
        let templates = BTreeMap::from([(1, vec![0.0, 0.0]), (2, vec![1.0, 1.0])]);
        let out = group_by_nearest_template(
            &[vec![0.1, 0.2], vec![0.5, 0.5], vec![10.0, 10.0]],
            &templates,
            1.0,
        )
        .unwrap();
        assert_eq!(out, vec![1, 1, -1]);
        assert!(group_by_nearest_template(&[vec![0.0]], &BTreeMap::new(), 1.0).is_err());
    }

    proptest! {
        #[test]
        fn perturbation_within_bin_keeps_label(
            xs in prop::collection::vec(0.0f64..3.0, 1..20),
            t in 0.0f64..1.0,
            pick in any::<prop::sample::Index>(),
        ) {
            let edges = vec![vec![0.0, 1.0, 2.0, 3.0]];
            let f: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
            let i = pick.index(f.len());
            let b = bin(&edges[0], xs[i]).unwrap();
            let mut moved = f.clone();
            moved[i][0] = edges[0][b] + t * (edges[0][b + 1] - edges[0][b]) * 0.999;
            prop_assert_eq!(group_by_histogram(&f, &edges).unwrap(), group_by_histogram(&moved, &edges).unwrap());
        }
    }
}

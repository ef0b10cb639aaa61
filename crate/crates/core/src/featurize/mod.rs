//! Featurize-and-group attractor identification.
//!
//! Trajectories are reduced to short feature vectors; feature vectors are
//! then grouped by density clustering, by histogram bins, or by the nearest
//! of a set of template features. Each group stands for one attractor.

mod dbscan;
mod grouping;
mod silhouette;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{trajectory, DynamicalSystem, Trajectory, TrajectorySpec, UniformSampler};
use crate::error::{Error, Result};
use crate::mapping::{Attractor, BasinFractions, Label, DIVERGED};

pub use dbscan::dbscan;
pub use grouping::{group_by_histogram, group_by_nearest_template, GroupingConfig};
pub use silhouette::{clustering_score, optimal_radius, silhouettes};

pub type FeatureVector = Vec<f64>;

/// Maps a trajectory to a fixed-length feature vector.
pub type Featurizer = dyn Fn(&Trajectory) -> FeatureVector + Send + Sync;

fn check_finite(features: &[FeatureVector]) -> Result<()> {
    for (row, f) in features.iter().enumerate() {
        if let Some(index) = f.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteFeature { row, index });
        }
    }
    Ok(())
}

/// Map every feature dimension affinely onto `[0, 1]`. Constant dimensions
/// become 0.
pub fn rescale_features(features: &[FeatureVector]) -> Result<Vec<FeatureVector>> {
    if features.is_empty() {
        return Err(Error::config("cannot rescale an empty feature set"));
    }
    check_finite(features)?;
    let k = features[0].len();
    if let Some(bad) = features.iter().find(|f| f.len() != k) {
        return Err(Error::Dimension {
            expected: k,
            found: bad.len(),
        });
    }
    let mut lo = vec![f64::INFINITY; k];
    let mut hi = vec![f64::NEG_INFINITY; k];
    for f in features {
        for d in 0..k {
            lo[d] = lo[d].min(f[d]);
            hi[d] = hi[d].max(f[d]);
        }
    }
    Ok(features
        .iter()
        .map(|f| {
            (0..k)
                .map(|d| {
                    let span = hi[d] - lo[d];
                    if span > 0.0 {
                        (f[d] - lo[d]) / span
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect())
}

/// Group feature vectors according to `config`. Clustering rescales first;
/// histogram and template grouping work on the raw features.
pub fn group_features(features: &[FeatureVector], config: &GroupingConfig) -> Result<Vec<Label>> {
    config.validate()?;
    if features.is_empty() {
        return Ok(Vec::new());
    }
    check_finite(features)?;
    match config {
        GroupingConfig::Clustering { min_pts, radius } => {
            let scaled = rescale_features(features)?;
            let eps = match radius {
                Some(r) => *r,
                None => match optimal_radius(&scaled, *min_pts) {
                    Ok(r) => r,
                    // Every feature identical: one group.
                    Err(Error::DegenerateFeatures) => return Ok(vec![1; features.len()]),
                    Err(e) => return Err(e),
                },
            };
            Ok(dbscan(&scaled, eps, *min_pts))
        }
        GroupingConfig::Histogram { edges } => group_by_histogram(features, edges),
        GroupingConfig::NearestTemplate {
            templates,
            max_distance,
        } => group_by_nearest_template(features, templates, max_distance.unwrap_or(f64::INFINITY)),
    }
}

/// Integrate and featurize every initial condition; `None` for trajectories
/// that diverged. Order follows `ics` regardless of `workers`.
pub fn featurize_all(
    system: &DynamicalSystem,
    ics: &[Vec<f64>],
    featurizer: &Featurizer,
    spec: &TrajectorySpec,
    workers: usize,
) -> Result<Vec<Option<FeatureVector>>> {
    let run = |ic: &Vec<f64>| -> Result<Option<FeatureVector>> {
        match trajectory(system, ic, spec) {
            Ok(t) => Ok(Some(featurizer(&t))),
            Err(Error::Divergence { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| ics.par_iter().map(run).collect())
}

/// Group the featurized trajectories, giving diverged ones [`DIVERGED`].
pub(crate) fn group_optional(
    features: &[Option<FeatureVector>],
    grouping: &GroupingConfig,
) -> Result<Vec<Label>> {
    let present: Vec<FeatureVector> = features.iter().flatten().cloned().collect();
    let grouped = group_features(&present, grouping)?;
    let mut it = grouped.into_iter();
    Ok(features
        .iter()
        .map(|f| match f {
            Some(_) => it.next().expect("one label per present feature"),
            None => DIVERGED,
        })
        .collect())
}

/// One single-point attractor per group, holding the mean feature vector of
/// its members. Diverged entries are skipped.
pub fn group_centroids(
    features: &[Option<FeatureVector>],
    labels: &[Label],
) -> BTreeMap<Label, Attractor> {
    let mut members: BTreeMap<Label, Vec<&FeatureVector>> = BTreeMap::new();
    for (&l, f) in labels.iter().zip(features) {
        if let (true, Some(f)) = (l != DIVERGED, f) {
            members.entry(l).or_default().push(f);
        }
    }
    members
        .into_iter()
        .map(|(l, fs)| {
            let mut mean = vec![0.0; fs[0].len()];
            for f in &fs {
                mean.iter_mut().zip(f.iter()).for_each(|(m, x)| *m += x);
            }
            mean.iter_mut().for_each(|m| *m /= fs.len() as f64);
            (l, Attractor::new(vec![mean]))
        })
        .collect()
}

/// Result of [`featurize_fractions`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturizedFractions {
    pub fractions: BasinFractions,
    pub labels: Vec<Label>,
    /// Raw features per initial condition, `None` where the trajectory
    /// diverged.
    pub features: Vec<Option<FeatureVector>>,
}

/// Integration settings and worker count for featurize-and-group runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeaturizeRun {
    pub trajectory: TrajectorySpec,
    pub workers: usize,
}

/// Sample `n` initial conditions from stream 0, featurize, group, and count.
pub fn featurize_fractions(
    system: &DynamicalSystem,
    sampler: &UniformSampler,
    n: usize,
    featurizer: &Featurizer,
    grouping: &GroupingConfig,
    run: &FeaturizeRun,
) -> Result<FeaturizedFractions> {
    if n == 0 {
        return Err(Error::config("need at least one initial condition"));
    }
    let ics = sampler.sample(n, 0);
    let features = featurize_all(system, &ics, featurizer, &run.trajectory, run.workers)?;
    let labels = group_optional(&features, grouping)?;
    Ok(FeaturizedFractions {
        fractions: BasinFractions::from_labels(&labels),
        labels,
        features,
    })
}

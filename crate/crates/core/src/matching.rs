//! Distances between attractors and label matching across parameter values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mapping::{Attractor, Label};

pub type DistanceFn = dyn Fn(&Attractor, &Attractor) -> f64 + Send + Sync;

/// Distance between two attractors.
#[derive(Clone, Default)]
pub enum SetDistance {
    /// Euclidean distance of the centroids.
    #[default]
    Centroid,
    Hausdorff,
    /// Any symmetric, non-negative function.
    Custom(Arc<DistanceFn>),
}

impl fmt::Debug for SetDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetDistance::Centroid => f.write_str("Centroid"),
            SetDistance::Hausdorff => f.write_str("Hausdorff"),
            SetDistance::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl SetDistance {
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&Attractor, &Attractor) -> f64 + Send + Sync + 'static,
    {
        SetDistance::Custom(Arc::new(f))
    }

    /// Distance on the number of occupied cells, `|log2 len(a) - log2 len(b)|`.
    /// With a threshold just below 1 only sets whose sizes differ by less than
    /// a factor of two are matched, which tracks periodic orbits by period.
    pub fn cell_count_log_ratio() -> Self {
        Self::custom(|a, b| ((a.cell_count() as f64).log2() - (b.cell_count() as f64).log2()).abs())
    }

    /// `1 - |cells(a) ∩ cells(b)| / min(|cells(a)|, |cells(b)|)`: 0 when one
    /// set's cells contain the other's, 1 without shared cells or when either
    /// carries no cells. Suited to merging copies of one attractor located
    /// independently on the same grid.
    pub fn cell_overlap() -> Self {
        Self::custom(|a, b| {
            let smaller = a.cells().len().min(b.cells().len());
            if smaller == 0 {
                return 1.0;
            }
            let shared = a.cells().intersection(b.cells()).count();
            1.0 - shared as f64 / smaller as f64
        })
    }

    pub fn eval(&self, a: &Attractor, b: &Attractor) -> f64 {
        match self {
            SetDistance::Centroid => centroid_distance(a, b),
            SetDistance::Hausdorff => hausdorff_distance(a.points(), b.points()),
            SetDistance::Custom(f) => f(a, b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatchConfig {
    pub distance: SetDistance,
    /// Pairs farther apart than this are never matched.
    pub threshold: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            distance: SetDistance::Centroid,
            threshold: f64::INFINITY,
        }
    }
}

impl MatchConfig {
    pub fn new(distance: SetDistance, threshold: f64) -> Self {
        Self {
            distance,
            threshold,
        }
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn centroid_distance(a: &Attractor, b: &Attractor) -> f64 {
    euclidean(&a.centroid(), &b.centroid())
}

/// Symmetric Hausdorff distance between two non-empty point sets.
pub fn hausdorff_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

fn directed_hausdorff(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for p in from {
        let mut nearest2 = f64::INFINITY;
        for q in to {
            let d2: f64 = p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum();
            if d2 < nearest2 {
                nearest2 = d2;
                if nearest2 <= worst * worst {
                    // Cannot raise the maximum any more.
                    break;
                }
            }
        }
        worst = worst.max(nearest2.sqrt());
    }
    worst
}

/// A pair accepted by the greedy matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub previous: Label,
    pub current: Label,
    pub distance: f64,
}

/// Greedily accepted `(previous, current)` pairs in acceptance order.
///
/// All pairwise distances are sorted ascending (ties by previous label, then
/// current label); a pair is accepted when it is within the threshold and
/// neither side has been used.
pub fn greedy_pairs(
    current: &BTreeMap<Label, Attractor>,
    previous: &BTreeMap<Label, Attractor>,
    cfg: &MatchConfig,
) -> Result<Vec<MatchedPair>> {
    if cfg.threshold.is_nan() || cfg.threshold < 0.0 {
        return Err(Error::config(format!(
            "matching threshold must be non-negative, got {}",
            cfg.threshold
        )));
    }
    let mut candidates = Vec::with_capacity(current.len() * previous.len());
    for (&p, pa) in previous {
        for (&c, ca) in current {
            let distance = cfg.distance.eval(ca, pa);
            if !(distance.is_finite() && distance >= 0.0) {
                return Err(Error::InvalidDistance(distance));
            }
            candidates.push(MatchedPair {
                previous: p,
                current: c,
                distance,
            });
        }
    }
    candidates.sort_by(|x, y| {
        x.distance
            .total_cmp(&y.distance)
            .then(x.previous.cmp(&y.previous))
            .then(x.current.cmp(&y.current))
    });
    let mut used_prev = BTreeSet::new();
    let mut used_cur = BTreeSet::new();
    let mut accepted = Vec::new();
    for pair in candidates {
        if pair.distance > cfg.threshold {
            break;
        }
        if used_prev.contains(&pair.previous) || used_cur.contains(&pair.current) {
            continue;
        }
        used_prev.insert(pair.previous);
        used_cur.insert(pair.current);
        accepted.push(pair);
    }
    Ok(accepted)
}

/// Relabel `current` attractors after `previous` ones.
///
/// Matched attractors inherit the previous label; the others receive the
/// smallest positive labels not used by `previous` or by earlier assignments,
/// in increasing order of their current label.
pub fn match_ids(
    current: &BTreeMap<Label, Attractor>,
    previous: &BTreeMap<Label, Attractor>,
    cfg: &MatchConfig,
) -> Result<BTreeMap<Label, Label>> {
    match_ids_reserving(current, previous, cfg, &BTreeSet::new())
}

/// [`match_ids`] that additionally never hands out a label in `reserved`.
/// Continuations reserve every label used so far so that a retired chain is
/// never revived by an unrelated attractor.
pub fn match_ids_reserving(
    current: &BTreeMap<Label, Attractor>,
    previous: &BTreeMap<Label, Attractor>,
    cfg: &MatchConfig,
    reserved: &BTreeSet<Label>,
) -> Result<BTreeMap<Label, Label>> {
    let mut relabel: BTreeMap<Label, Label> = greedy_pairs(current, previous, cfg)?
        .into_iter()
        .map(|pair| (pair.current, pair.previous))
        .collect();
    let mut taken: BTreeSet<Label> = previous.keys().chain(reserved).copied().collect();
    taken.extend(relabel.values().copied());
    let mut next = 1;
    for &c in current.keys() {
        if relabel.contains_key(&c) {
            continue;
        }
        while taken.contains(&next) {
            next += 1;
        }
        relabel.insert(c, next);
        taken.insert(next);
    }
    Ok(relabel)
}

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mapping::{Label, DIVERGED};

use super::dbscan::{dbscan, distance};

/// Silhouette of every clustered point, in input order with noise points
/// skipped.
///
/// `s = (b - a) / max(a, b)` with `a` the mean distance to the other members
/// of the point's cluster and `b` the smallest mean distance to another
/// cluster. Members of singleton clusters score 0, as do points with
/// `a = b = 0`.
pub fn silhouettes(points: &[Vec<f64>], labels: &[Label]) -> Result<Vec<f64>> {
    let mut sizes: BTreeMap<Label, usize> = BTreeMap::new();
    for &l in labels.iter().filter(|&&l| l != DIVERGED) {
        *sizes.entry(l).or_default() += 1;
    }
    if sizes.len() < 2 {
        return Err(Error::UndefinedSilhouette {
            clusters: sizes.len(),
        });
    }
    let slot: BTreeMap<Label, usize> = sizes.keys().enumerate().map(|(k, &l)| (l, k)).collect();
    let counts: Vec<usize> = sizes.values().copied().collect();

    let clustered: Vec<usize> = (0..points.len())
        .filter(|&i| labels[i] != DIVERGED)
        .collect();
    let mut sums = vec![0.0; counts.len()];
    let mut out = Vec::with_capacity(clustered.len());
    for &i in &clustered {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for &j in &clustered {
            if i != j {
                sums[slot[&labels[j]]] += distance(&points[i], &points[j]);
            }
        }
        let own = slot[&labels[i]];
        if counts[own] == 1 {
            out.push(0.0);
            continue;
        }
        let a = sums[own] / (counts[own] - 1) as f64;
        let b = (0..counts.len())
            .filter(|&k| k != own)
            .map(|k| sums[k] / counts[k] as f64)
            .fold(f64::INFINITY, f64::min);
        let scale = a.max(b);
        out.push(if scale > 0.0 { (b - a) / scale } else { 0.0 });
    }
    Ok(out)
}

/// Clustering quality used for the radius search: silhouettes summed over
/// clustered points and divided by the total point count, so noise points
/// count as 0. Fewer than two clusters score -1.
pub fn clustering_score(points: &[Vec<f64>], labels: &[Label]) -> f64 {
    match silhouettes(points, labels) {
        Ok(s) => s.iter().sum::<f64>() / points.len() as f64,
        Err(_) => -1.0,
    }
}

const SUBSAMPLE: usize = 1000;
const SCAN_POINTS: usize = 16;
const GOLDEN_ITERATIONS: usize = 20;

/// DBSCAN radius maximizing [`clustering_score`].
///
/// The search runs over `[smallest nonzero pairwise distance, diameter]`
/// (both from an evenly strided subsample of at most 1000 points): a
/// log-spaced scan picks the best bracket, which golden-section search then
/// refines. The objective is not unimodal in general, so the result is a
/// local maximum; the best radius evaluated anywhere is returned.
pub fn optimal_radius(features: &[Vec<f64>], min_pts: usize) -> Result<f64> {
    if features.len() < min_pts + 1 {
        return Err(Error::config(format!(
            "radius search needs at least min_pts + 1 = {} points, got {}",
            min_pts + 1,
            features.len()
        )));
    }
    let stride = features.len().div_ceil(SUBSAMPLE);
    let sub: Vec<&Vec<f64>> = features.iter().step_by(stride).collect();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..sub.len() {
        for j in i + 1..sub.len() {
            let d = distance(sub[i], sub[j]);
            if d > 0.0 {
                lo = lo.min(d);
            }
            hi = hi.max(d);
        }
    }
    if hi == 0.0 {
        return Err(Error::DegenerateFeatures);
    }

    let mut best = (f64::NEG_INFINITY, hi);
    let mut score = |eps: f64| {
        let s = clustering_score(features, &dbscan(features, eps, min_pts));
        if s > best.0 {
            best = (s, eps);
        }
        s
    };

    let ratio = (hi / lo).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| lo * ratio.powi(k as i32))
        .collect();
    let scores: Vec<f64> = grid.iter().map(|&e| score(e)).collect();
    let top = scores
        .iter()
        .enumerate()
        .fold(0, |b, (k, &s)| if s > scores[b] { k } else { b });

    let (mut a, mut b) = (
        grid[top.saturating_sub(1)],
        grid[(top + 1).min(SCAN_POINTS - 1)],
    );
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (score(c), score(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = score(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = score(d);
        }
    }
    Ok(best.1)
}

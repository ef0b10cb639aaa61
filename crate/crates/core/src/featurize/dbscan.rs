use rustc_hash::FxHashMap;

use crate::mapping::{Label, DIVERGED};

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Neighbor lookup: uniform hash grid with cell size `eps` for low
/// dimensions, brute force otherwise.
enum Index<'a> {
    Grid {
        points: &'a [Vec<f64>],
        eps: f64,
        cells: FxHashMap<Vec<i64>, Vec<usize>>,
        keys: Vec<Vec<i64>>,
    },
    Brute {
        points: &'a [Vec<f64>],
        eps: f64,
    },
}

const GRID_MAX_DIM: usize = 4;

impl<'a> Index<'a> {
    fn new(points: &'a [Vec<f64>], eps: f64) -> Self {
        let dim = points.first().map_or(0, Vec::len);
        let spread = points.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        if dim == 0 || dim > GRID_MAX_DIM || spread / eps > 1e12 {
            return Index::Brute { points, eps };
        }
        let keys: Vec<Vec<i64>> = points
            .iter()
            .map(|p| p.iter().map(|x| (x / eps).floor() as i64).collect())
            .collect();
        let mut cells: FxHashMap<Vec<i64>, Vec<usize>> = FxHashMap::default();
        for (i, k) in keys.iter().enumerate() {
            cells.entry(k.clone()).or_default().push(i);
        }
        Index::Grid {
            points,
            eps,
            cells,
            keys,
        }
    }

    /// Indices within `eps` of point `i`, including `i`.
    fn neighbors(&self, i: usize, out: &mut Vec<usize>) {
        out.clear();
        match self {
            Index::Brute { points, eps } => {
                out.extend((0..points.len()).filter(|&j| distance(&points[i], &points[j]) <= *eps));
            }
            Index::Grid {
                points,
                eps,
                cells,
                keys,
            } => {
                let home = &keys[i];
                let dim = home.len();
                let mut offset = vec![-1i64; dim];
                let mut key = vec![0i64; dim];
                loop {
                    for k in 0..dim {
                        key[k] = home[k] + offset[k];
                    }
                    if let Some(members) = cells.get(&key) {
                        out.extend(
                            members
                                .iter()
                                .copied()
                                .filter(|&j| distance(&points[i], &points[j]) <= *eps),
                        );
                    }
                    // Odometer over {-1, 0, 1}^dim.
                    let mut k = 0;
                    while k < dim && offset[k] == 1 {
                        offset[k] = -1;
                        k += 1;
                    }
                    if k == dim {
                        break;
                    }
                    offset[k] += 1;
                }
                out.sort_unstable();
            }
        }
    }
}

/// DBSCAN with Euclidean distance. Two points are neighbors when their
/// distance is at most `eps`; a point is core when its neighborhood
/// (itself included) has at least `min_pts` members.
///
/// Clusters are numbered 1.. in order of their lowest-index core point. A
/// border point reachable from several clusters belongs to the one with the
/// smallest number. Points in no cluster get [`DIVERGED`] (-1).
pub fn dbscan(points: &[Vec<f64>], eps: f64, min_pts: usize) -> Vec<Label> {
    let n = points.len();
    let index = Index::new(points, eps);
    let mut scratch = Vec::new();
    let core: Vec<bool> = (0..n)
        .map(|i| {
            index.neighbors(i, &mut scratch);
            scratch.len() >= min_pts
        })
        .collect();

    let mut labels = vec![DIVERGED; n];
    let mut cluster: Label = 0;
    let mut stack = Vec::new();
    for seed in 0..n {
        if !core[seed] || labels[seed] != DIVERGED {
            continue;
        }
        cluster += 1;
        labels[seed] = cluster;
        stack.push(seed);
        while let Some(i) = stack.pop() {
            index.neighbors(i, &mut scratch);
            for &j in &scratch {
                if labels[j] == DIVERGED {
                    labels[j] = cluster;
                    if core[j] {
                        stack.push(j);
                    }
                }
            }
        }
    }
    labels
}

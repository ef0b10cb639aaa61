//! Mapping initial conditions to attractors.

mod basins;
mod grid;
mod proximity;
mod recurrences;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use basins::{
    basins_fractions, basins_fractions_of, basins_fractions_parallel, full_basins, BasinsGrid,
    MappedFractions,
};
pub use grid::{CellState, Tessellation, VisitRegistry};
pub use proximity::ProximityMapper;
pub use recurrences::{RecurrenceMapper, RecurrenceParams};

/// Attractor label. Positive values enumerate attractors; [`DIVERGED`] marks
/// trajectories that left the box, blew up, or never converged.
pub type Label = i64;

pub const DIVERGED: Label = -1;

/// A finite sample of points on an attracting set.
///
/// `cells` holds the linear tessellation indices the attractor occupies; it is
/// empty for attractors that did not come from a grid (feature-space group
/// representatives, hand-made fixtures).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Attractor {
    points: Vec<Vec<f64>>,
    cells: BTreeSet<u64>,
}

impl Attractor {
    pub fn new(points: Vec<Vec<f64>>) -> Self {
        Self {
            points,
            cells: BTreeSet::new(),
        }
    }

    pub fn with_cells(points: Vec<Vec<f64>>, cells: BTreeSet<u64>) -> Self {
        Self { points, cells }
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn cells(&self) -> &BTreeSet<u64> {
        &self.cells
    }

    /// Number of occupied cells, falling back to the point count when the
    /// attractor carries no cells.
    pub fn cell_count(&self) -> usize {
        if self.cells.is_empty() {
            self.points.len()
        } else {
            self.cells.len()
        }
    }

    pub fn dimension(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let d = self.dimension();
        let mut c = vec![0.0; d];
        for p in &self.points {
            for (ci, x) in c.iter_mut().zip(p) {
                *ci += x;
            }
        }
        let n = self.points.len() as f64;
        c.iter_mut().for_each(|x| *x /= n);
        c
    }

    pub(crate) fn absorb(&mut self, other: Attractor) {
        self.points.extend(other.points);
        self.cells.extend(other.cells);
    }
}

/// Fraction of initial conditions per label, summing to one.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasinFractions(BTreeMap<Label, f64>);

impl BasinFractions {
    /// Relative frequency of each label in `labels`.
    pub fn from_labels(labels: &[Label]) -> Self {
        let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
        for &l in labels {
            *counts.entry(l).or_default() += 1;
        }
        let n = labels.len() as f64;
        Self(counts.into_iter().map(|(l, c)| (l, c as f64 / n)).collect())
    }

    pub fn from_map(map: BTreeMap<Label, f64>) -> Self {
        Self(map)
    }

    pub fn get(&self, label: Label) -> f64 {
        self.0.get(&label).copied().unwrap_or(0.0)
    }

    pub fn insert(&mut self, label: Label, fraction: f64) {
        self.0.insert(label, fraction);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, f64)> + '_ {
        self.0.iter().map(|(&l, &f)| (l, f))
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.0.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn as_map(&self) -> &BTreeMap<Label, f64> {
        &self.0
    }

    pub fn into_map(self) -> BTreeMap<Label, f64> {
        self.0
    }
}

/// Counters accumulated by a mapper over all calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub mapped: u64,
    /// Left the box for too long or became non-finite.
    pub diverged: u64,
    /// Hit the total step cap without converging.
    pub exhausted: u64,
    /// State observations, i.e. steps taken plus one per initial condition.
    pub observations: u64,
}

impl Diagnostics {
    pub fn merge(&mut self, other: &Diagnostics) {
        self.mapped += other.mapped;
        self.diverged += other.diverged;
        self.exhausted += other.exhausted;
        self.observations += other.observations;
    }
}

/// Anything that maps an initial condition to an attractor label.
pub trait AttractorMapper {
    fn map_ic(&mut self, ic: &[f64]) -> Result<Label>;

    fn attractors(&self) -> &BTreeMap<Label, Attractor>;

    fn diagnostics(&self) -> Diagnostics;
}

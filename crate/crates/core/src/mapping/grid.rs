use rustc_hash::FxHashMap;

use crate::dynamics::StateSpaceBox;
use crate::error::{Error, Result};

use super::Label;

/// Partition of a box into equal axis-aligned cells.
///
/// Cells are half-open, `[lo + i*w, lo + (i+1)*w)`, so a coordinate equal to
/// the box maximum lies outside. Cells are addressed by a row-major linear
/// index (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Tessellation {
    bounds: StateSpaceBox,
    cells: Vec<usize>,
    widths: Vec<f64>,
    strides: Vec<u64>,
    total: u64,
}

impl Tessellation {
    pub fn new(bounds: StateSpaceBox, cells: Vec<usize>) -> Result<Self> {
        if cells.len() != bounds.dimension() {
            return Err(Error::Dimension {
                expected: bounds.dimension(),
                found: cells.len(),
            });
        }
        if cells.contains(&0) {
            return Err(Error::config("cell counts must be positive"));
        }
        let mut strides = vec![0u64; cells.len()];
        let mut total: u64 = 1;
        for axis in (0..cells.len()).rev() {
            strides[axis] = total;
            total = total
                .checked_mul(cells[axis] as u64)
                .ok_or_else(|| Error::config("total cell count overflows a 64-bit index"))?;
        }
        let widths = (0..cells.len())
            .map(|k| (bounds.max()[k] - bounds.min()[k]) / cells[k] as f64)
            .collect();
        Ok(Self {
            bounds,
            cells,
            widths,
            strides,
            total,
        })
    }

    /// Same cell count on every axis.
    pub fn uniform(bounds: StateSpaceBox, cells_per_axis: usize) -> Result<Self> {
        let d = bounds.dimension();
        Self::new(bounds, vec![cells_per_axis; d])
    }

    pub fn bounds(&self) -> &StateSpaceBox {
        &self.bounds
    }

    pub fn dimension(&self) -> usize {
        self.cells.len()
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn total_cells(&self) -> u64 {
        self.total
    }

    fn axis_index(&self, axis: usize, x: f64) -> Option<usize> {
        let lo = self.bounds.min()[axis];
        let hi = self.bounds.max()[axis];
        if !(x >= lo && x < hi) {
            return None;
        }
        let i = ((x - lo) * self.cells[axis] as f64 / (hi - lo)).floor() as usize;
        (i < self.cells[axis]).then_some(i)
    }

    /// Integer cell coordinates of `state`, or `None` outside the box.
    pub fn cell_index(&self, state: &[f64]) -> Option<Vec<usize>> {
        debug_assert_eq!(state.len(), self.dimension());
        state
            .iter()
            .enumerate()
            .map(|(axis, &x)| self.axis_index(axis, x))
            .collect()
    }

    /// Linear index of the cell containing `state`, or `None` outside the box.
    pub fn linear_index(&self, state: &[f64]) -> Option<u64> {
        debug_assert_eq!(state.len(), self.dimension());
        let mut linear = 0u64;
        for (axis, &x) in state.iter().enumerate() {
            linear += self.axis_index(axis, x)? as u64 * self.strides[axis];
        }
        Some(linear)
    }

    pub fn ravel(&self, index: &[usize]) -> u64 {
        index
            .iter()
            .zip(&self.strides)
            .map(|(&i, &s)| i as u64 * s)
            .sum()
    }

    pub fn unravel(&self, mut linear: u64) -> Vec<usize> {
        self.strides
            .iter()
            .map(|&s| {
                let i = linear / s;
                linear %= s;
                i as usize
            })
            .collect()
    }

    pub fn cell_center(&self, linear: u64) -> Vec<f64> {
        self.unravel(linear)
            .into_iter()
            .enumerate()
            .map(|(axis, i)| self.bounds.min()[axis] + (i as f64 + 0.5) * self.widths[axis])
            .collect()
    }
}

/// Status of one cell as seen by the current search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellState {
    Unvisited,
    VisitedThisSearch,
    Attractor(Label),
}

#[derive(Debug, Clone, Copy)]
enum Status {
    Visited(u64),
    Attractor(Label),
}

/// Sparse record of touched cells.
///
/// Visit marks carry the id of the search that made them; starting a new
/// search bumps the id, which invalidates all old marks without touching the
/// table. Attractor labels are permanent.
#[derive(Debug, Clone, Default)]
pub struct VisitRegistry {
    table: FxHashMap<u64, Status>,
    search: u64,
}

impl VisitRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn begin_search(&mut self) {
        self.search += 1;
    }

    pub fn state(&self, cell: u64) -> CellState {
        match self.table.get(&cell) {
            None => CellState::Unvisited,
            Some(Status::Visited(id)) if *id == self.search => CellState::VisitedThisSearch,
            Some(Status::Visited(_)) => CellState::Unvisited,
            Some(Status::Attractor(label)) => CellState::Attractor(*label),
        }
    }

    /// Mark `cell` visited by the current search. Attractor cells are left
    /// untouched.
    pub fn mark_visited(&mut self, cell: u64) {
        let search = self.search;
        self.table
            .entry(cell)
            .and_modify(|s| {
                if let Status::Visited(id) = s {
                    *id = search;
                }
            })
            .or_insert(Status::Visited(search));
    }

    /// Assign an attractor label. Returns the label already present if the
    /// cell belongs to a different attractor, leaving it unchanged.
    pub fn assign(&mut self, cell: u64, label: Label) -> std::result::Result<(), Label> {
        match self.table.get_mut(&cell) {
            Some(Status::Attractor(existing)) if *existing != label => Err(*existing),
            Some(s) => {
                *s = Status::Attractor(label);
                Ok(())
            }
            None => {
                self.table.insert(cell, Status::Attractor(label));
                Ok(())
            }
        }
    }

    /// Number of stored cells (visited at some point or labeled).
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn labeled_cells(&self) -> usize {
        self.table
            .values()
            .filter(|s| matches!(s, Status::Attractor(_)))
            .count()
    }
}

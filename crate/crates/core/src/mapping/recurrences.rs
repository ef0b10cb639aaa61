use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dynamics::{DynamicalSystem, Integrator, SystemKind};
use crate::error::{Error, Result};

use super::grid::{CellState, Tessellation, VisitRegistry};
use super::{Attractor, AttractorMapper, Diagnostics, Label, DIVERGED};

/// Metaparameters of the recurrence state machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecurrenceParams {
    /// Time between state observations (ignored for maps).
    pub dt: f64,
    /// Integrator steps per observation; RK4 step size is `dt / substeps`.
    pub substeps: usize,
    /// Consecutive revisits of cells seen during the current search needed to
    /// claim a new attractor.
    pub recurrences_to_find: u64,
    /// Revisits collected while locating a newly found attractor.
    pub recurrences_to_locate: u64,
    /// Consecutive observations outside the box that count as divergence.
    pub steps_outside: u64,
    /// Hard cap on observations per initial condition.
    pub max_steps: u64,
    /// Consecutive observations in cells of one known attractor that decide
    /// convergence to it.
    pub hits_to_converge: u64,
}

impl Default for RecurrenceParams {
    fn default() -> Self {
        Self {
            dt: 0.1,
            substeps: 1,
            recurrences_to_find: 100,
            recurrences_to_locate: 1000,
            steps_outside: 100,
            max_steps: 100_000_000,
            hits_to_converge: 100,
        }
    }
}

impl RecurrenceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        let counts = [
            ("substeps", self.substeps as u64),
            ("recurrences_to_find", self.recurrences_to_find),
            ("recurrences_to_locate", self.recurrences_to_locate),
            ("steps_outside", self.steps_outside),
            ("max_steps", self.max_steps),
            ("hits_to_converge", self.hits_to_converge),
        ];
        for (name, value) in counts {
            if value == 0 {
                return Err(Error::config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// How a single search ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged(Label),
    Found(Label),
    Diverged,
    Exhausted,
}

impl Outcome {
    pub fn label(self) -> Label {
        match self {
            Outcome::Converged(l) | Outcome::Found(l) => l,
            Outcome::Diverged | Outcome::Exhausted => DIVERGED,
        }
    }
}

/// Recurrence-based attractor finder on a sparse tessellation.
///
/// Each call to [`map_ic`](AttractorMapper::map_ic) runs the state machine:
///
/// * a cell labeled with attractor `l` for `hits_to_converge` consecutive
///   observations decides convergence to `l`;
/// * revisiting a cell marked during this search counts as a recurrence and
///   entering an unmarked cell resets the count; `recurrences_to_find`
///   consecutive recurrences switch to locating a new attractor;
/// * `steps_outside` consecutive observations outside the box, or a
///   non-finite state, give [`DIVERGED`];
/// * reaching `max_steps` also gives [`DIVERGED`] but is counted separately
///   in the diagnostics.
///
/// While locating, every in-box cell is claimed for the new label and its
/// first point stored, until `recurrences_to_locate` observations have landed
/// in cells seen before. Cells that already belong to another attractor are
/// left to it, so every cell carries at most one label.
#[derive(Debug, Clone)]
pub struct RecurrenceMapper {
    system: DynamicalSystem,
    grid: Tessellation,
    registry: VisitRegistry,
    attractors: BTreeMap<Label, Attractor>,
    params: RecurrenceParams,
    integrator: Integrator,
    diagnostics: Diagnostics,
    state: Vec<f64>,
    time: f64,
}

impl RecurrenceMapper {
    pub fn new(
        system: DynamicalSystem,
        grid: Tessellation,
        params: RecurrenceParams,
    ) -> Result<Self> {
        if grid.dimension() != system.dimension() {
            return Err(Error::Dimension {
                expected: system.dimension(),
                found: grid.dimension(),
            });
        }
        params.validate()?;
        let d = system.dimension();
        Ok(Self {
            system,
            grid,
            registry: VisitRegistry::new(),
            attractors: BTreeMap::new(),
            params,
            integrator: Integrator::new(d),
            diagnostics: Diagnostics::default(),
            state: vec![0.0; d],
            time: 0.0,
        })
    }

    /// A mapper with the same system, grid and parameters but an empty
    /// registry and no attractors.
    pub fn fresh(&self) -> Self {
        Self::new(self.system.clone(), self.grid.clone(), self.params)
            .expect("validated on construction")
    }

    pub fn system(&self) -> &DynamicalSystem {
        &self.system
    }

    pub fn system_mut(&mut self) -> &mut DynamicalSystem {
        &mut self.system
    }

    pub fn grid(&self) -> &Tessellation {
        &self.grid
    }

    pub fn registry(&self) -> &VisitRegistry {
        &self.registry
    }

    pub fn params(&self) -> &RecurrenceParams {
        &self.params
    }

    pub fn into_attractors(self) -> BTreeMap<Label, Attractor> {
        self.attractors
    }

    /// Run the state machine from `ic` and report how it ended.
    pub fn map_ic_outcome(&mut self, ic: &[f64]) -> Result<Outcome> {
        if ic.len() != self.system.dimension() {
            return Err(Error::Dimension {
                expected: self.system.dimension(),
                found: ic.len(),
            });
        }
        self.registry.begin_search();
        self.state.copy_from_slice(ic);
        self.time = 0.0;
        self.diagnostics.mapped += 1;

        let outcome = self.search();
        match outcome {
            Outcome::Diverged => self.diagnostics.diverged += 1,
            Outcome::Exhausted => {
                self.diagnostics.exhausted += 1;
                log::warn!(
                    "initial condition {:?} did not converge within {} steps",
                    ic,
                    self.params.max_steps
                );
            }
            _ => {}
        }
        Ok(outcome)
    }

    /// Advance by one observation interval. `false` on divergence.
    fn advance(&mut self) -> bool {
        let (dt, substeps) = match self.system.kind() {
            SystemKind::Continuous => (
                self.params.dt / self.params.substeps as f64,
                self.params.substeps,
            ),
            SystemKind::Discrete => (1.0, 1),
        };
        for _ in 0..substeps {
            if self
                .integrator
                .advance(&self.system, &mut self.state, &mut self.time, dt)
                .is_err()
            {
                return false;
            }
        }
        true
    }

    fn search(&mut self) -> Outcome {
        let p = self.params;
        let mut recurrences = 0u64;
        let mut hits = 0u64;
        let mut hit_label = DIVERGED;
        let mut outside = 0u64;
        let mut steps = 0u64;
        loop {
            self.diagnostics.observations += 1;
            match self.grid.linear_index(&self.state) {
                None => {
                    hits = 0;
                    outside += 1;
                    if outside >= p.steps_outside {
                        return Outcome::Diverged;
                    }
                }
                Some(cell) => {
                    outside = 0;
                    match self.registry.state(cell) {
                        CellState::Attractor(label) => {
                            if label == hit_label {
                                hits += 1;
                            } else {
                                hit_label = label;
                                hits = 1;
                            }
                            if hits >= p.hits_to_converge {
                                return Outcome::Converged(label);
                            }
                        }
                        CellState::VisitedThisSearch => {
                            hits = 0;
                            recurrences += 1;
                            if recurrences >= p.recurrences_to_find {
                                return self.locate(steps);
                            }
                        }
                        CellState::Unvisited => {
                            hits = 0;
                            recurrences = 0;
                            self.registry.mark_visited(cell);
                        }
                    }
                }
            }
            if steps >= p.max_steps {
                return Outcome::Exhausted;
            }
            if !self.advance() {
                return Outcome::Diverged;
            }
            steps += 1;
        }
    }

    fn locate(&mut self, mut steps: u64) -> Outcome {
        let p = self.params;
        let label = self.attractors.keys().next_back().copied().unwrap_or(0) + 1;
        let mut points = Vec::new();
        let mut cells = BTreeSet::new();
        let mut revisits = 0u64;
        loop {
            if let Some(cell) = self.grid.linear_index(&self.state) {
                match self.registry.state(cell) {
                    CellState::Attractor(l) if l == label => revisits += 1,
                    // Cells of other attractors are neither claimed nor counted.
                    CellState::Attractor(_) => {}
                    seen @ (CellState::VisitedThisSearch | CellState::Unvisited) => {
                        if seen == CellState::VisitedThisSearch {
                            revisits += 1;
                        }
                        self.registry
                            .assign(cell, label)
                            .expect("cell checked to carry no other label");
                        cells.insert(cell);
                        points.push(self.state.clone());
                    }
                }
            }
            if revisits >= p.recurrences_to_locate || steps >= p.max_steps {
                break;
            }
            if !self.advance() {
                for &cell in &cells {
                    self.registry.mark_visited(cell);
                }
                return Outcome::Diverged;
            }
            steps += 1;
            self.diagnostics.observations += 1;
        }
        self.attractors
            .insert(label, Attractor::with_cells(points, cells));
        Outcome::Found(label)
    }
}

impl AttractorMapper for RecurrenceMapper {
    fn map_ic(&mut self, ic: &[f64]) -> Result<Label> {
        self.map_ic_outcome(ic).map(Outcome::label)
    }

    fn attractors(&self) -> &BTreeMap<Label, Attractor> {
        &self.attractors
    }

    fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::StateSpaceBox;

    fn linear(rate: f64) -> DynamicalSystem {
        DynamicalSystem::continuous(1, vec![rate], |u, p, _, du| du[0] = p[0] * u[0])
    }

    fn mapper(system: DynamicalSystem) -> RecurrenceMapper {
        let grid = Tessellation::uniform(StateSpaceBox::cube(1, -1.0, 1.0).unwrap(), 101).unwrap();
        RecurrenceMapper::new(system, grid, RecurrenceParams::default()).unwrap()
    }

    #[test]
    fn stable_origin_is_found_then_reused() {
        let mut m = mapper(linear(-1.0));
        assert_eq!(m.map_ic_outcome(&[0.5]).unwrap(), Outcome::Found(1));
        let a = &m.attractors()[&1];
        assert!(a.points().iter().all(|p| p[0].abs() < 0.02));
        assert!(a.cell_count() <= 2);

        assert_eq!(m.map_ic_outcome(&[-0.7]).unwrap().label(), 1);
        assert_eq!(m.attractors().len(), 1);
    }

    #[test]
    fn repeller_diverges() {
        let mut m = mapper(linear(1.0));
        assert_eq!(m.map_ic(&[0.5]).unwrap(), DIVERGED);
        assert_eq!(m.diagnostics().diverged, 1);
        assert!(m.attractors().is_empty());
    }

    #[test]
    fn starting_in_labeled_cell_converges_eagerly() {
        let mut m = mapper(linear(-1.0));
        m.map_ic(&[0.5]).unwrap();
        let before = m.diagnostics().observations;
        let center = m.attractors()[&1].points()[0].clone();
        assert_eq!(m.map_ic_outcome(&center).unwrap(), Outcome::Converged(1));
        let used = m.diagnostics().observations - before;
        assert!(used <= m.params().hits_to_converge, "used {used}");
    }

    #[test]
    fn step_cap_is_reported_separately() {
        // A slow drift never recurs in a coarse-enough way within 10 steps.
        let drift = DynamicalSystem::continuous(1, vec![], |_, _, _, du| du[0] = 0.01);
        let grid = Tessellation::uniform(StateSpaceBox::cube(1, -1.0, 1.0).unwrap(), 1000).unwrap();
        let params = RecurrenceParams {
            max_steps: 10,
            ..Default::default()
        };
        let mut m = RecurrenceMapper::new(drift, grid, params).unwrap();
        assert_eq!(m.map_ic_outcome(&[0.0]).unwrap(), Outcome::Exhausted);
        assert_eq!(m.diagnostics().exhausted, 1);
        assert_eq!(m.diagnostics().diverged, 0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let grid = Tessellation::uniform(StateSpaceBox::cube(2, -1.0, 1.0).unwrap(), 10).unwrap();
        assert!(matches!(
            RecurrenceMapper::new(linear(-1.0), grid, RecurrenceParams::default()),
            Err(Error::Dimension { .. })
        ));
        let mut m = mapper(linear(-1.0));
        assert!(m.map_ic(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn zero_counts_rejected() {
        let p = RecurrenceParams {
            hits_to_converge: 0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = RecurrenceParams {
            dt: -1.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}

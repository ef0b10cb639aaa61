use std::collections::BTreeMap;

use crate::dynamics::{DynamicalSystem, Integrator, SystemKind};
use crate::error::{Error, Result};

use super::{Attractor, AttractorMapper, Diagnostics, Label, DIVERGED};

/// Maps an initial condition to the first known attractor its trajectory
/// comes within `delta` of.
#[derive(Debug, Clone)]
pub struct ProximityMapper {
    system: DynamicalSystem,
    attractors: BTreeMap<Label, Attractor>,
    delta: f64,
    dt: f64,
    max_steps: u64,
    integrator: Integrator,
    diagnostics: Diagnostics,
}

impl ProximityMapper {
    pub fn new(
        system: DynamicalSystem,
        attractors: BTreeMap<Label, Attractor>,
        delta: f64,
        dt: f64,
        max_steps: u64,
    ) -> Result<Self> {
        if attractors.is_empty() {
            return Err(Error::config(
                "proximity mapping needs at least one attractor",
            ));
        }
        if !(delta > 0.0) {
            return Err(Error::config(format!(
                "proximity radius must be positive, got {delta}"
            )));
        }
        if !(dt > 0.0) {
            return Err(Error::config(format!("dt must be positive, got {dt}")));
        }
        for (label, a) in &attractors {
            if *label <= 0 || a.points().is_empty() {
                return Err(Error::config(format!(
                    "attractor {label} needs a positive label and at least one point"
                )));
            }
            if a.points().iter().any(|p| p.len() != system.dimension()) {
                return Err(Error::Dimension {
                    expected: system.dimension(),
                    found: a.dimension(),
                });
            }
        }
        let d = system.dimension();
        Ok(Self {
            system,
            attractors,
            delta,
            dt,
            max_steps,
            integrator: Integrator::new(d),
            diagnostics: Diagnostics::default(),
        })
    }

    /// Nearest attractor within `delta`, smallest label on ties.
    fn nearest_within(&self, state: &[f64]) -> Option<Label> {
        let mut best: Option<(f64, Label)> = None;
        for (&label, a) in &self.attractors {
            let d2 = a
                .points()
                .iter()
                .map(|p| {
                    p.iter()
                        .zip(state)
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            if best.map_or(true, |(b, _)| d2 < b) {
                best = Some((d2, label));
            }
        }
        best.filter(|(d2, _)| d2.sqrt() <= self.delta)
            .map(|(_, l)| l)
    }
}

impl AttractorMapper for ProximityMapper {
    fn map_ic(&mut self, ic: &[f64]) -> Result<Label> {
        if ic.len() != self.system.dimension() {
            return Err(Error::Dimension {
                expected: self.system.dimension(),
                found: ic.len(),
            });
        }
        self.diagnostics.mapped += 1;
        let dt = match self.system.kind() {
            SystemKind::Continuous => self.dt,
            SystemKind::Discrete => 1.0,
        };
        let mut state = ic.to_vec();
        let mut time = 0.0;
        for step in 0..=self.max_steps {
            self.diagnostics.observations += 1;
            if let Some(label) = self.nearest_within(&state) {
                return Ok(label);
            }
            if step == self.max_steps {
                break;
            }
            if self
                .integrator
                .advance(&self.system, &mut state, &mut time, dt)
                .is_err()
            {
                self.diagnostics.diverged += 1;
                return Ok(DIVERGED);
            }
        }
        self.diagnostics.exhausted += 1;
        Ok(DIVERGED)
    }

    fn attractors(&self) -> &BTreeMap<Label, Attractor> {
        &self.attractors
    }

    fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }
}

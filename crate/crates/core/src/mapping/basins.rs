use std::collections::BTreeMap;

use crate::dynamics::UniformSampler;
use crate::error::{Error, Result};
use crate::matching::{match_ids_reserving, MatchConfig};

use super::{
    Attractor, AttractorMapper, BasinFractions, Diagnostics, Label, RecurrenceMapper, DIVERGED,
};

/// Result of mapping a batch of initial conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedFractions {
    pub fractions: BasinFractions,
    /// One label per initial condition, in input order.
    pub labels: Vec<Label>,
    pub attractors: BTreeMap<Label, Attractor>,
    pub diagnostics: Diagnostics,
}

/// Map `n` initial conditions drawn from stream 0 of `sampler`.
pub fn basins_fractions<M: AttractorMapper>(
    mapper: &mut M,
    sampler: &UniformSampler,
    n: usize,
) -> Result<MappedFractions> {
    if n == 0 {
        return Err(Error::config("need at least one initial condition"));
    }
    basins_fractions_of(mapper, &sampler.sample(n, 0))
}

/// Map the given initial conditions in order with one mapper.
pub fn basins_fractions_of<M: AttractorMapper>(
    mapper: &mut M,
    ics: &[Vec<f64>],
) -> Result<MappedFractions> {
    if ics.is_empty() {
        return Err(Error::config("need at least one initial condition"));
    }
    let before = mapper.diagnostics();
    let labels = ics
        .iter()
        .map(|ic| mapper.map_ic(ic))
        .collect::<Result<Vec<_>>>()?;
    let after = mapper.diagnostics();
    Ok(MappedFractions {
        fractions: BasinFractions::from_labels(&labels),
        labels,
        attractors: mapper.attractors().clone(),
        diagnostics: Diagnostics {
            mapped: after.mapped - before.mapped,
            diverged: after.diverged - before.diverged,
            exhausted: after.exhausted - before.exhausted,
            observations: after.observations - before.observations,
        },
    })
}

/// Split `ics` into `workers` contiguous chunks and map each with a copy of
/// `template`, including any attractors it already knows. Attractors found
/// by different workers are merged in worker order by matching them with
/// `merge`; attractors inherited from the template keep their labels.
///
/// With `workers == 1` this equals [`basins_fractions_of`] on a copy of the
/// template.
pub fn basins_fractions_parallel(
    template: &RecurrenceMapper,
    ics: &[Vec<f64>],
    workers: usize,
    merge: &MatchConfig,
) -> Result<MappedFractions> {
    if ics.is_empty() {
        return Err(Error::config("need at least one initial condition"));
    }
    let workers = workers.clamp(1, ics.len());
    let chunk = ics.len().div_ceil(workers);
    let partials: Vec<Result<MappedFractions>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ics
            .chunks(chunk)
            .map(|part| {
                let mut mapper = template.clone();
                scope.spawn(move || basins_fractions_of(&mut mapper, part))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("mapping worker panicked"))
            .collect()
    });

    let inherited = template.attractors();
    let mut attractors: BTreeMap<Label, Attractor> = inherited.clone();
    let mut labels = Vec::with_capacity(ics.len());
    let mut diagnostics = Diagnostics::default();
    for partial in partials {
        let partial = partial?;
        diagnostics.merge(&partial.diagnostics);
        let found: BTreeMap<_, _> = partial
            .attractors
            .into_iter()
            .filter(|(l, _)| !inherited.contains_key(l))
            .collect();
        let reserved = attractors.keys().copied().collect();
        let mut relabel = match_ids_reserving(&found, &attractors, merge, &reserved)?;
        relabel.extend(inherited.keys().map(|&l| (l, l)));
        for (old, attractor) in found {
            attractors.entry(relabel[&old]).or_insert(attractor);
        }
        labels.extend(partial.labels.into_iter().map(|l| {
            if l == DIVERGED {
                DIVERGED
            } else {
                relabel[&l]
            }
        }));
    }
    Ok(MappedFractions {
        fractions: BasinFractions::from_labels(&labels),
        labels,
        attractors,
        diagnostics,
    })
}

/// Label of every cell of a tessellation, in linear-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinsGrid {
    pub shape: Vec<usize>,
    pub labels: Vec<Label>,
}

impl BasinsGrid {
    pub fn fractions(&self) -> BasinFractions {
        BasinFractions::from_labels(&self.labels)
    }
}

/// Map the center of every cell of the mapper's grid, in linear-index order.
pub fn full_basins(mapper: &mut RecurrenceMapper) -> Result<BasinsGrid> {
    let grid = mapper.grid().clone();
    let labels = (0..grid.total_cells())
        .map(|cell| mapper.map_ic(&grid.cell_center(cell)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BasinsGrid {
        shape: grid.cells_per_axis().to_vec(),
        labels,
    })
}

//! Continuation of attractors and basin fractions across parameter values.
//!
//! The recurrence route ([`rafm_continuation`]) seeds each parameter value
//! from the attractors of the previous one, maps fresh samples, and matches
//! labels step to step. The featurize route ([`featurize_group_continuation`])
//! pools features of all parameter values and groups them once, so group
//! identity across parameters needs no matching.

use std::collections::{BTreeMap, BTreeSet};

use crate::dynamics::{DynamicalSystem, UniformSampler};
use crate::error::{Error, Result};
use crate::featurize::{
    featurize_all, group_centroids, group_optional, FeatureVector, FeaturizeRun, Featurizer,
    GroupingConfig,
};
use crate::mapping::{
    basins_fractions_of, basins_fractions_parallel, Attractor, AttractorMapper, BasinFractions,
    Diagnostics, Label, MappedFractions, RecurrenceMapper, DIVERGED,
};
use crate::matching::{match_ids_reserving, MatchConfig, SetDistance};

/// Attractors and fractions along an ordered list of parameter points.
///
/// The same label at different points designates one matched attractor chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationResult {
    /// Indices of the parameters that vary.
    pub parameter_indices: Vec<usize>,
    /// One point per step; `parameters[s][k]` is the value of parameter
    /// `parameter_indices[k]` at step `s`.
    pub parameters: Vec<Vec<f64>>,
    pub fractions: Vec<BasinFractions>,
    pub attractors: Vec<BTreeMap<Label, Attractor>>,
    pub diagnostics: Vec<Diagnostics>,
}

impl ContinuationResult {
    pub fn len(&self) -> usize {
        self.parameters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameters.is_empty()
    }

    /// Every attractor label used at any step, in increasing order.
    pub fn labels(&self) -> BTreeSet<Label> {
        self.attractors
            .iter()
            .flat_map(|a| a.keys().copied())
            .collect()
    }

    /// Values of the first varied parameter, one per step.
    pub fn first_parameter(&self) -> Vec<f64> {
        self.parameters.iter().map(|p| p[0]).collect()
    }
}

/// Settings of a recurrence-based continuation.
#[derive(Debug, Clone)]
pub struct RafmConfig {
    /// Initial conditions sampled per parameter value.
    pub samples: usize,
    /// Seeds taken from each previous attractor.
    pub seeds_per_attractor: usize,
    pub matching: MatchConfig,
    /// Mapping workers per step.
    pub workers: usize,
    /// How attractors found by different workers are merged.
    pub merge: MatchConfig,
}

impl Default for RafmConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            seeds_per_attractor: 10,
            matching: MatchConfig::default(),
            workers: 1,
            merge: MatchConfig::new(SetDistance::cell_overlap(), 0.5),
        }
    }
}

/// Outcome of one continuation step, already relabeled.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub fractions: BasinFractions,
    pub attractors: BTreeMap<Label, Attractor>,
    pub diagnostics: Diagnostics,
}

/// Up to `count` points of `attractor`, evenly strided over its stored points.
pub fn seeds_from(attractor: &Attractor, count: usize) -> Vec<Vec<f64>> {
    let points = attractor.points();
    let k = count.min(points.len());
    (0..k)
        .map(|i| points[i * points.len() / k].clone())
        .collect()
}

fn set_point(system: &mut DynamicalSystem, indices: &[usize], point: &[f64]) -> Result<()> {
    if indices.len() != point.len() {
        return Err(Error::Dimension {
            expected: indices.len(),
            found: point.len(),
        });
    }
    for (&i, &v) in indices.iter().zip(point) {
        system.set_parameter(i, v)?;
    }
    Ok(())
}

fn relabel_fractions(
    fractions: &BasinFractions,
    relabel: &BTreeMap<Label, Label>,
) -> BasinFractions {
    BasinFractions::from_map(
        fractions
            .iter()
            .map(|(l, f)| (if l == DIVERGED { DIVERGED } else { relabel[&l] }, f))
            .collect(),
    )
}

fn relabel_attractors(
    attractors: BTreeMap<Label, Attractor>,
    relabel: &BTreeMap<Label, Label>,
) -> BTreeMap<Label, Attractor> {
    attractors
        .into_iter()
        .map(|(l, a)| (relabel[&l], a))
        .collect()
}

/// One continuation step at parameter `point`.
///
/// A fresh copy of `template` (empty registry) with the parameters set first
/// maps seeds from every previous attractor, then maps `cfg.samples` initial
/// conditions from stream `stream` of `sampler`. Only the sampled initial
/// conditions count towards the fractions; attractors reached by seeds alone
/// are kept with fraction 0. Labels are finally matched against `previous`,
/// never handing out a label in `reserved`.
#[allow(clippy::too_many_arguments)]
pub fn rafm_step(
    template: &RecurrenceMapper,
    previous: &BTreeMap<Label, Attractor>,
    parameter_indices: &[usize],
    point: &[f64],
    sampler: &UniformSampler,
    stream: u64,
    cfg: &RafmConfig,
    reserved: &BTreeSet<Label>,
) -> Result<StepResult> {
    if cfg.samples == 0 {
        return Err(Error::config(
            "need at least one initial condition per parameter value",
        ));
    }
    let mut mapper = template.fresh();
    set_point(mapper.system_mut(), parameter_indices, point)?;
    for attractor in previous.values() {
        for seed in seeds_from(attractor, cfg.seeds_per_attractor) {
            mapper.map_ic(&seed)?;
        }
    }
    let seeding = mapper.diagnostics();
    let ics = sampler.sample(cfg.samples, stream);
    let MappedFractions {
        fractions,
        attractors,
        diagnostics,
        ..
    } = if cfg.workers > 1 {
        basins_fractions_parallel(&mapper, &ics, cfg.workers, &cfg.merge)?
    } else {
        basins_fractions_of(&mut mapper, &ics)?
    };
    let mut fractions = fractions;
    for &label in attractors.keys() {
        if fractions.as_map().get(&label).is_none() {
            fractions.insert(label, 0.0);
        }
    }
    let mut total = seeding;
    total.merge(&diagnostics);

    let relabel = match_ids_reserving(&attractors, previous, &cfg.matching, reserved)?;
    Ok(StepResult {
        fractions: relabel_fractions(&fractions, &relabel),
        attractors: relabel_attractors(attractors, &relabel),
        diagnostics: total,
    })
}

/// Recurrence-based continuation over the values `prange` of parameter
/// `pidx` (0-based). Step `s` samples from stream `s` of `sampler`.
pub fn rafm_continuation(
    template: &RecurrenceMapper,
    pidx: usize,
    prange: &[f64],
    sampler: &UniformSampler,
    cfg: &RafmConfig,
) -> Result<ContinuationResult> {
    let points: Vec<Vec<f64>> = prange.iter().map(|&p| vec![p]).collect();
    rafm_continuation_points(template, &[pidx], &points, sampler, cfg)
}

/// Recurrence-based continuation along an ordered list of parameter points,
/// each giving values for `parameter_indices`.
pub fn rafm_continuation_points(
    template: &RecurrenceMapper,
    parameter_indices: &[usize],
    points: &[Vec<f64>],
    sampler: &UniformSampler,
    cfg: &RafmConfig,
) -> Result<ContinuationResult> {
    if points.is_empty() {
        return Err(Error::config("parameter range must not be empty"));
    }
    if parameter_indices.is_empty() {
        return Err(Error::config("at least one parameter must vary"));
    }
    let mut result = ContinuationResult {
        parameter_indices: parameter_indices.to_vec(),
        parameters: Vec::with_capacity(points.len()),
        fractions: Vec::with_capacity(points.len()),
        attractors: Vec::with_capacity(points.len()),
        diagnostics: Vec::with_capacity(points.len()),
    };
    let mut reserved = BTreeSet::new();
    let mut previous = BTreeMap::new();
    for (s, point) in points.iter().enumerate() {
        let step = rafm_step(
            template,
            &previous,
            parameter_indices,
            point,
            sampler,
            s as u64,
            cfg,
            &reserved,
        )?;
        log::info!(
            "parameter {:?}: {} attractors, fractions {:?}",
            point,
            step.attractors.len(),
            step.fractions.as_map()
        );
        reserved.extend(step.attractors.keys().copied());
        previous = step.attractors.clone();
        result.parameters.push(point.clone());
        result.fractions.push(step.fractions);
        result.attractors.push(step.attractors);
        result.diagnostics.push(step.diagnostics);
    }
    Ok(result)
}

/// Redo the label matching of a finished continuation with another matching
/// configuration. Fractions and attractor point sets are carried over
/// unchanged; only the labels differ.
pub fn rematch(result: &ContinuationResult, cfg: &MatchConfig) -> Result<ContinuationResult> {
    let mut out = ContinuationResult {
        parameter_indices: result.parameter_indices.clone(),
        parameters: result.parameters.clone(),
        fractions: Vec::with_capacity(result.len()),
        attractors: Vec::with_capacity(result.len()),
        diagnostics: result.diagnostics.clone(),
    };
    let mut reserved = BTreeSet::new();
    let mut previous = BTreeMap::new();
    for (fractions, attractors) in result.fractions.iter().zip(&result.attractors) {
        let relabel = match_ids_reserving(attractors, &previous, cfg, &reserved)?;
        let attractors = relabel_attractors(attractors.clone(), &relabel);
        reserved.extend(attractors.keys().copied());
        previous = attractors.clone();
        out.fractions.push(relabel_fractions(fractions, &relabel));
        out.attractors.push(attractors);
    }
    Ok(out)
}

/// Merge attractors that `key` maps to the same group, at every step.
///
/// Fractions of a group are summed and its attractors' points pooled; group
/// keys become the new labels. [`DIVERGED`] is kept apart.
pub fn aggregate_attractors<F>(result: &ContinuationResult, key: F) -> ContinuationResult
where
    F: Fn(Label, &Attractor) -> Label,
{
    let mut out = ContinuationResult {
        parameter_indices: result.parameter_indices.clone(),
        parameters: result.parameters.clone(),
        fractions: Vec::with_capacity(result.len()),
        attractors: Vec::with_capacity(result.len()),
        diagnostics: result.diagnostics.clone(),
    };
    for (fractions, attractors) in result.fractions.iter().zip(&result.attractors) {
        let keys: BTreeMap<Label, Label> =
            attractors.iter().map(|(&l, a)| (l, key(l, a))).collect();
        let mut grouped_fractions = BTreeMap::new();
        for (l, f) in fractions.iter() {
            let g = if l == DIVERGED { DIVERGED } else { keys[&l] };
            *grouped_fractions.entry(g).or_insert(0.0) += f;
        }
        let mut grouped: BTreeMap<Label, Attractor> = BTreeMap::new();
        for (l, a) in attractors {
            match grouped.get_mut(&keys[l]) {
                Some(existing) => existing.absorb(a.clone()),
                None => {
                    grouped.insert(keys[l], a.clone());
                }
            }
        }
        out.fractions
            .push(BasinFractions::from_map(grouped_fractions));
        out.attractors.push(grouped);
    }
    out
}

/// [`aggregate_attractors`] with group keys from featurizing every stored
/// attractor and grouping the pooled features. Attractors left ungrouped by
/// the grouping (noise) each keep a group of their own.
pub fn aggregate_by_features<F>(
    result: &ContinuationResult,
    featurize: F,
    grouping: &GroupingConfig,
) -> Result<ContinuationResult>
where
    F: Fn(&Attractor) -> FeatureVector,
{
    let order: Vec<(usize, Label)> = result
        .attractors
        .iter()
        .enumerate()
        .flat_map(|(s, a)| a.keys().map(move |&l| (s, l)))
        .collect();
    let features: Vec<Option<FeatureVector>> = order
        .iter()
        .map(|&(s, l)| Some(featurize(&result.attractors[s][&l])))
        .collect();
    let groups = group_optional(&features, grouping)?;
    let mut next = groups.iter().copied().max().unwrap_or(0).max(0);
    let keys: BTreeMap<(usize, Label), Label> = order
        .into_iter()
        .zip(groups)
        .map(|(at, g)| {
            if g == DIVERGED {
                next += 1;
                (at, next)
            } else {
                (at, g)
            }
        })
        .collect();

    let mut out = result.clone();
    for s in 0..result.len() {
        let single = ContinuationResult {
            parameter_indices: result.parameter_indices.clone(),
            parameters: vec![result.parameters[s].clone()],
            fractions: vec![result.fractions[s].clone()],
            attractors: vec![result.attractors[s].clone()],
            diagnostics: vec![result.diagnostics[s]],
        };
        let merged = aggregate_attractors(&single, |l, _| keys[&(s, l)]);
        out.fractions[s] = merged.fractions.into_iter().next().expect("one step");
        out.attractors[s] = merged.attractors.into_iter().next().expect("one step");
    }
    Ok(out)
}

/// Default cap on the pairwise working set of pooled clustering, in bytes.
pub const DEFAULT_MEMORY_BUDGET: u128 = 1 << 33;

/// Featurize-and-group continuation.
///
/// At every parameter point `n` initial conditions are drawn from stream `s`
/// (the step index) and featurized; all features are pooled and grouped once,
/// then split back into per-step fractions. Each group is represented at each
/// step by an attractor holding the mean feature vector of its members there.
///
/// Clustering needs pairwise distances of the pooled set; runs whose
/// `8 * m^2` bytes (with `m` pooled features) exceed `memory_budget` are
/// refused.
#[allow(clippy::too_many_arguments)]
pub fn featurize_group_continuation(
    system: &DynamicalSystem,
    parameter_indices: &[usize],
    points: &[Vec<f64>],
    sampler: &UniformSampler,
    n: usize,
    featurizer: &Featurizer,
    grouping: &GroupingConfig,
    run: &FeaturizeRun,
    memory_budget: u128,
) -> Result<ContinuationResult> {
    if points.is_empty() {
        return Err(Error::config("parameter range must not be empty"));
    }
    if n == 0 {
        return Err(Error::config(
            "need at least one initial condition per parameter value",
        ));
    }
    grouping.validate()?;
    if matches!(grouping, GroupingConfig::Clustering { .. }) {
        let m = (n * points.len()) as u128;
        let required = 8 * m * m;
        if required > memory_budget {
            return Err(Error::MemoryBudget {
                required,
                budget: memory_budget,
            });
        }
    }

    let mut pooled = Vec::with_capacity(n * points.len());
    for (s, point) in points.iter().enumerate() {
        let mut system = system.clone();
        set_point(&mut system, parameter_indices, point)?;
        let ics = sampler.sample(n, s as u64);
        pooled.extend(featurize_all(
            &system,
            &ics,
            featurizer,
            &run.trajectory,
            run.workers,
        )?);
    }
    let labels = group_optional(&pooled, grouping)?;

    let mut result = ContinuationResult {
        parameter_indices: parameter_indices.to_vec(),
        parameters: points.to_vec(),
        fractions: Vec::with_capacity(points.len()),
        attractors: Vec::with_capacity(points.len()),
        diagnostics: Vec::with_capacity(points.len()),
    };
    for (step_labels, step_features) in labels.chunks(n).zip(pooled.chunks(n)) {
        result
            .fractions
            .push(BasinFractions::from_labels(step_labels));
        result
            .attractors
            .push(group_centroids(step_features, step_labels));
        result.diagnostics.push(Diagnostics {
            mapped: n as u64,
            diverged: step_features.iter().filter(|f| f.is_none()).count() as u64,
            ..Diagnostics::default()
        });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{StateSpaceBox, TrajectorySpec};
    use crate::featurize::featurize_fractions;
    use crate::mapping::{basins_fractions, RecurrenceParams, Tessellation};

    fn mapper(system: DynamicalSystem, lo: f64, hi: f64, cells: usize) -> RecurrenceMapper {
        let d = system.dimension();
        let grid = Tessellation::uniform(StateSpaceBox::cube(d, lo, hi).unwrap(), cells).unwrap();
        RecurrenceMapper::new(system, grid, RecurrenceParams::default()).unwrap()
    }

    /// `x' = p x - x^3`: wells at `±sqrt(p)`.
    fn moving_wells() -> DynamicalSystem {
        DynamicalSystem::continuous(1, vec![1.0], |u, p, _, du| {
            du[0] = p[0] * u[0] - u[0].powi(3)
        })
    }

    fn cfg(samples: usize, threshold: f64) -> RafmConfig {
        RafmConfig {
            samples,
            matching: MatchConfig::new(SetDistance::Centroid, threshold),
            ..Default::default()
        }
    }

    fn sums_to_one(result: &ContinuationResult) -> bool {
        result
            .fractions
            .iter()
            .all(|f| (f.total() - 1.0).abs() < 1e-12)
    }

    #[test]
    fn fixed_point_keeps_one_label() {
        let sys = DynamicalSystem::continuous(1, vec![0.0], |u, _, _, du| du[0] = -u[0]);
        let m = mapper(sys, -1.0, 1.0, 101);
        let sampler = UniformSampler::new(StateSpaceBox::cube(1, -1.0, 1.0).unwrap(), 1);
        let r =
            rafm_continuation(&m, 0, &[0.0, 0.5, 1.0, 1.5, 2.0], &sampler, &cfg(20, 0.1)).unwrap();
        assert_eq!(r.labels(), BTreeSet::from([1]));
        assert!(r.fractions.iter().all(|f| f.get(1) == 1.0));
    }

    #[test]
    fn moving_wells_keep_their_labels() {
        let m = mapper(moving_wells(), -2.0, 2.0, 201);
        let sampler = UniformSampler::new(StateSpaceBox::cube(1, -2.0, 2.0).unwrap(), 4);
        let prange = [0.8, 0.9, 1.0, 1.1, 1.2];
        let r = rafm_continuation(&m, 0, &prange, &sampler, &cfg(40, 0.2)).unwrap();
        assert!(sums_to_one(&r));
        assert_eq!(r.labels().len(), 2, "{:?}", r.fractions);
        for (p, attractors) in prange.iter().zip(&r.attractors) {
            for (&l, a) in attractors {
                let x = a.centroid()[0];
                assert!((x.abs() - p.sqrt()).abs() < 0.03, "p={p} x={x}");
                let first = r.attractors[0][&l].centroid()[0];
                assert_eq!(x.signum(), first.signum());
            }
        }
    }

    #[test]
    fn vanishing_attractor_drops_out() {
        // x' = p + x - x^3 loses its left well at p = 2 / (3 sqrt 3).
        let tilted = DynamicalSystem::continuous(1, vec![0.0], |u, p, _, du| {
            du[0] = p[0] + u[0] - u[0].powi(3)
        });
        let m = mapper(tilted, -2.0, 2.0, 201);
        let sampler = UniformSampler::new(StateSpaceBox::cube(1, -2.0, 2.0).unwrap(), 6);
        let r = rafm_continuation(&m, 0, &[0.0, 0.2, 0.5, 0.7], &sampler, &cfg(40, 0.5)).unwrap();
        assert!(sums_to_one(&r));
        let left = *r.attractors[0]
            .iter()
            .find(|(_, a)| a.centroid()[0] < 0.0)
            .unwrap()
            .0;
        assert!(r.attractors[1].contains_key(&left));
        assert!(!r.attractors[2].contains_key(&left));
        assert!(!r.attractors[3].contains_key(&left));
        assert_eq!(r.attractors[3].len(), 1);
    }

    #[test]
    fn single_value_equals_basins_fractions() {
        let m = mapper(moving_wells(), -2.0, 2.0, 101);
        let sampler = UniformSampler::new(StateSpaceBox::cube(1, -2.0, 2.0).unwrap(), 2);
        let r = rafm_continuation(&m, 0, &[1.0], &sampler, &cfg(30, f64::INFINITY)).unwrap();
        let direct = basins_fractions(&mut m.fresh(), &sampler, 30).unwrap();
        assert_eq!(r.fractions[0], direct.fractions);
        assert_eq!(r.attractors[0], direct.attractors);
    }

    #[test]
    fn reversed_range_gives_the_same_chains() {
        let m = mapper(moving_wells(), -2.0, 2.0, 201);
        let sampler = UniformSampler::new(StateSpaceBox::cube(1, -2.0, 2.0).unwrap(), 8);
        let prange = [0.8, 0.9, 1.0, 1.1, 1.2];
        let mut reversed = prange;
        reversed.reverse();
        let fwd = rafm_continuation(&m, 0, &prange, &sampler, &cfg(40, 0.2)).unwrap();
        let bwd = rafm_continuation(&m, 0, &reversed, &sampler, &cfg(40, 0.2)).unwrap();
        let chains = |r: &ContinuationResult| -> BTreeSet<Vec<(i64, bool)>> {
            r.labels()
                .iter()
                .map(|l| {
                    let mut members: Vec<(i64, bool)> = r
                        .parameters
                        .iter()
                        .zip(&r.attractors)
                        .filter_map(|(p, a)| {
                            a.get(l)
                                .map(|a| ((p[0] * 1e6).round() as i64, a.centroid()[0] > 0.0))
                        })
                        .collect();
                    members.sort();
                    members
                })
                .collect()
        };
        assert_eq!(chains(&fwd), chains(&bwd));
    }

    #[test]
    fn rematch_properties() {
        let m = mapper(moving_wells(), -2.0, 2.0, 201);
        let sampler = UniformSampler::new(StateSpaceBox::cube(1, -2.0, 2.0).unwrap(), 4);
        let config = cfg(30, 0.2);
        let r = rafm_continuation(&m, 0, &[0.8, 1.0, 1.2], &sampler, &config).unwrap();
        assert_eq!(rematch(&r, &config.matching).unwrap(), r);

        let strict = rematch(&r, &MatchConfig::new(SetDistance::Centroid, 0.0)).unwrap();
        let total: usize = strict.attractors.iter().map(BTreeMap::len).sum();
        assert_eq!(strict.labels().len(), total);
        for (a, b) in r.fractions.iter().zip(&strict.fractions) {
            let mut x: Vec<f64> = a.iter().map(|(_, f)| f).collect();
            let mut y: Vec<f64> = b.iter().map(|(_, f)| f).collect();
            x.sort_by(f64::total_cmp);
            y.sort_by(f64::total_cmp);
            assert_eq!(x, y);
        }
        for (a, b) in r.attractors.iter().zip(&strict.attractors) {
            let mut x: Vec<_> = a.values().collect();
            let mut y: Vec<_> = b.values().collect();
            x.sort_by(|p, q| p.points()[0][0].total_cmp(&q.points()[0][0]));
            y.sort_by(|p, q| p.points()[0][0].total_cmp(&q.points()[0][0]));
            assert_eq!(x, y);
        }
    }

    fn synthetic(fractions: &[(Label, f64)], attractors: &[(Label, f64)]) -> ContinuationResult {
        ContinuationResult {
            parameter_indices: vec![0],
            parameters: vec![vec![0.0]],
            fractions: vec![BasinFractions::from_map(
                fractions.iter().copied().collect(),
            )],
            attractors: vec![attractors
                .iter()
                .map(|&(l, z)| (l, Attractor::new(vec![vec![0.0, 0.0, z]])))
                .collect()],
            diagnostics: vec![Diagnostics::default()],
        }
    }

    #[test]
    fn aggregation_sums_fractions() {
        let r = synthetic(
            &[(1, 0.2), (2, 0.3), (3, 0.5)],
            &[(1, 0.0), (2, 0.0), (3, 0.0)],
        );
        let g = aggregate_attractors(&r, |l, _| if l == 1 { 10 } else { 20 });
        assert_eq!(
            g.fractions[0].as_map(),
            &BTreeMap::from([(10, 0.2), (20, 0.8)])
        );
        assert_eq!(g.attractors[0][&20].points().len(), 2);
        assert_eq!(aggregate_attractors(&r, |l, _| l), r);
    }

    #[test]
    fn threshold_key_splits_into_two_groups() {
        let r = synthetic(
            &[(1, 0.1), (2, 0.2), (3, 0.3), (4, 0.4)],
            &[(1, 0.001), (2, 0.5), (3, 0.005), (4, 0.9)],
        );
        let g = aggregate_attractors(&r, |_, a| if a.centroid()[2] < 0.01 { 1 } else { 2 });
        assert_eq!(g.attractors[0].len(), 2);
        assert!((g.fractions[0].get(1) - 0.4).abs() < 1e-15);
        assert!((g.fractions[0].get(2) - 0.6).abs() < 1e-15);

        let edges = GroupingConfig::Histogram {
            edges: vec![vec![0.0, 0.01, 1.0]],
        };
        let h = aggregate_by_features(&r, |a| vec![a.centroid()[2]], &edges).unwrap();
        assert_eq!(h.fractions, g.fractions);
    }

    fn double_well() -> DynamicalSystem {
        DynamicalSystem::continuous(2, vec![0.0], |u, _, _, du| {
            du[0] = u[0] - u[0].powi(3);
            du[1] = -u[1];
        })
    }

    fn mean_xy(t: &crate::dynamics::Trajectory) -> FeatureVector {
        let n = t.len() as f64;
        vec![t.column(0).sum::<f64>() / n, t.column(1).sum::<f64>() / n]
    }

    fn featurize_run() -> FeaturizeRun {
        FeaturizeRun {
            trajectory: TrajectorySpec {
                total: 10.0,
                transient: 20.0,
                dt: 0.1,
                sample_dt: 1.0,
            },
            workers: 2,
        }
    }

    #[test]
    fn featurize_continuation_on_fixed_double_well() {
        let sampler = UniformSampler::new(StateSpaceBox::cube(2, -2.0, 2.0).unwrap(), 11);
        let points: Vec<Vec<f64>> = (0..3).map(|k| vec![k as f64]).collect();
        let grouping = GroupingConfig::Clustering {
            min_pts: 10,
            radius: None,
        };
        let r = featurize_group_continuation(
            &double_well(),
            &[0],
            &points,
            &sampler,
            300,
            &mean_xy,
            &grouping,
            &featurize_run(),
            DEFAULT_MEMORY_BUDGET,
        )
        .unwrap();
        assert!(sums_to_one(&r));
        for f in &r.fractions {
            assert_eq!(f.labels().filter(|&l| l > 0).count(), 2, "{f:?}");
            for (l, x) in f.iter().filter(|(l, _)| *l > 0) {
                assert!((x - 0.5).abs() < 0.07, "label {l}: {x}");
            }
        }

        let single = featurize_group_continuation(
            &double_well(),
            &[0],
            &points[..1],
            &sampler,
            300,
            &mean_xy,
            &grouping,
            &featurize_run(),
            DEFAULT_MEMORY_BUDGET,
        )
        .unwrap();
        let direct = featurize_fractions(
            &double_well(),
            &sampler,
            300,
            &mean_xy,
            &grouping,
            &featurize_run(),
        )
        .unwrap();
        assert_eq!(single.fractions[0], direct.fractions);
    }

    #[test]
    fn memory_guard_refuses_large_pools() {
        let sampler = UniformSampler::new(StateSpaceBox::cube(2, -2.0, 2.0).unwrap(), 1);
        let grouping = GroupingConfig::Clustering {
            min_pts: 10,
            radius: None,
        };
        let err = featurize_group_continuation(
            &double_well(),
            &[0],
            &[vec![0.0], vec![1.0]],
            &sampler,
            100,
            &mean_xy,
            &grouping,
            &featurize_run(),
            1000,
        );
        assert!(matches!(
            err,
            Err(Error::MemoryBudget {
                required: 320_000,
                budget: 1000
            })
        ));
    }

    #[test]
    fn methods_agree_on_double_well() {
        let box2 = StateSpaceBox::cube(2, -2.0, 2.0).unwrap();
        let sampler = UniformSampler::new(box2.clone(), 21);
        let points: Vec<Vec<f64>> = vec![vec![0.0], vec![1.0]];
        let grid = Tessellation::uniform(box2, 101).unwrap();
        let m = RecurrenceMapper::new(double_well(), grid, RecurrenceParams::default()).unwrap();
        let rafm = rafm_continuation_points(&m, &[0], &points, &sampler, &cfg(400, 0.5)).unwrap();
        let grouping = GroupingConfig::Clustering {
            min_pts: 10,
            radius: None,
        };
        let feat = featurize_group_continuation(
            &double_well(),
            &[0],
            &points,
            &sampler,
            400,
            &mean_xy,
            &grouping,
            &featurize_run(),
            DEFAULT_MEMORY_BUDGET,
        )
        .unwrap();
        let sorted = |f: &BasinFractions| {
            let mut v: Vec<f64> = f.iter().filter(|(l, _)| *l > 0).map(|(_, x)| x).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        for (a, b) in rafm.fractions.iter().zip(&feat.fractions) {
            let (a, b) = (sorted(a), sorted(b));
            assert_eq!(a.len(), 2);
            assert_eq!(b.len(), 2);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 0.07, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn empty_range_is_rejected() {
        let m = mapper(moving_wells(), -2.0, 2.0, 11);
        let sampler = UniformSampler::new(StateSpaceBox::cube(1, -2.0, 2.0).unwrap(), 1);
        assert!(rafm_continuation(&m, 0, &[], &sampler, &RafmConfig::default()).is_err());
        assert!(matches!(
            rafm_continuation(&m, 3, &[1.0], &sampler, &RafmConfig::default()),
            Err(Error::ParameterIndex { index: 3, len: 1 })
        ));
    }
}

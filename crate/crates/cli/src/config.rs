//! Run configuration.
//!
//! TOML by default, JSON when the file name ends in `.json`; unknown keys are
//! rejected. [`RunConfig::resolve`] fills every default from the model zoo and
//! validates the result. The resolved config is what the manifest records and
//! it resolves to itself.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use basins_core::continuation::DEFAULT_MEMORY_BUDGET;
use basins_core::dynamics::{StateSpaceBox, TrajectorySpec};
use basins_core::featurize::GroupingConfig;
use basins_core::mapping::{RecurrenceParams, Tessellation};
use basins_core::matching::{MatchConfig, SetDistance};
use basins_core::zoo::{self, ModelSpec, MODEL_NAMES};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEEDS_PER_ATTRACTOR: usize = 10;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_PROXIMITY_MAX_STEPS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Cap in bytes on the pairwise working set of pooled clustering.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_budget: Option<u64>,
    /// Output directory; `out` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    /// Box initial conditions are drawn from; the grid box when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<BoxConfig>,
    #[serde(default)]
    pub mapper: MapperConfig,
    pub job: JobConfig,
    #[serde(default)]
    pub matching: MatchingConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<ParameterValues>,
}

/// Either the full parameter vector or a table of overrides by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParameterValues {
    List(Vec<f64>),
    Named(BTreeMap<String, f64>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Cells>,
}

/// One count for every axis, or one per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cells {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapperConfig {
    Recurrences {
        #[serde(default)]
        recurrence: RecurrenceOverrides,
    },
    FeaturizeGroup {
        #[serde(default = "default_grouping")]
        grouping: GroupingConfig,
        #[serde(default)]
        trajectory: TrajectoryOverrides,
    },
    /// Attractors are first located by a recurrences pass over
    /// `reference_samples` initial conditions, then every sample is mapped by
    /// proximity to them.
    Proximity {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference_samples: Option<usize>,
        /// Step cap of the proximity search.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_steps: Option<u64>,
        #[serde(default)]
        recurrence: RecurrenceOverrides,
    },
}

impl Default for MapperConfig {
    fn default() -> Self {
        MapperConfig::Recurrences {
            recurrence: RecurrenceOverrides::default(),
        }
    }
}

fn default_grouping() -> GroupingConfig {
    GroupingConfig::Clustering {
        min_pts: 10,
        radius: None,
    }
}

/// Recurrence metaparameters; absent entries come from the model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substeps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recurrences_to_find: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recurrences_to_locate: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps_outside: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hits_to_converge: Option<u64>,
}

impl RecurrenceOverrides {
    fn apply(&self, base: RecurrenceParams) -> RecurrenceParams {
        RecurrenceParams {
            dt: self.dt.unwrap_or(base.dt),
            substeps: self.substeps.unwrap_or(base.substeps),
            recurrences_to_find: self.recurrences_to_find.unwrap_or(base.recurrences_to_find),
            recurrences_to_locate: self.recurrences_to_locate.unwrap_or(base.recurrences_to_locate),
            steps_outside: self.steps_outside.unwrap_or(base.steps_outside),
            max_steps: self.max_steps.unwrap_or(base.max_steps),
            hits_to_converge: self.hits_to_converge.unwrap_or(base.hits_to_converge),
        }
    }

    fn full(p: &RecurrenceParams) -> Self {
        RecurrenceOverrides {
            dt: Some(p.dt),
            substeps: Some(p.substeps),
            recurrences_to_find: Some(p.recurrences_to_find),
            recurrences_to_locate: Some(p.recurrences_to_locate),
            steps_outside: Some(p.steps_outside),
            max_steps: Some(p.max_steps),
            hits_to_converge: Some(p.hits_to_converge),
        }
    }
}

/// Trajectory settings of the featurizer; absent entries come from the model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transient: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_dt: Option<f64>,
}

impl TrajectoryOverrides {
    fn apply(&self, base: TrajectorySpec) -> TrajectorySpec {
        TrajectorySpec {
            total: self.total.unwrap_or(base.total),
            transient: self.transient.unwrap_or(base.transient),
            dt: self.dt.unwrap_or(base.dt),
            sample_dt: self.sample_dt.unwrap_or(base.sample_dt),
        }
    }

    fn full(t: &TrajectorySpec) -> Self {
        TrajectoryOverrides {
            total: Some(t.total),
            transient: Some(t.transient),
            dt: Some(t.dt),
            sample_dt: Some(t.sample_dt),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum JobConfig {
    /// Basin fractions at the model's parameters.
    Fractions {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
    },
    /// Fractions and matched attractors along `prange` of one parameter.
    Continuation {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parameter: Option<ParameterRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prange: Option<ParameterRange>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seeds_per_attractor: Option<usize>,
    },
    /// Label of every grid cell center.
    FullBasins {},
}

/// A parameter by 0-based position or by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParameterRef {
    Index(usize),
    Name(String),
}

/// Explicit values, or `length` evenly spaced values from `start` to `stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParameterRange {
    Values(Vec<f64>),
    Linspace { start: f64, stop: f64, length: usize },
}

impl ParameterRange {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            ParameterRange::Values(ref v) => v.clone(),
            ParameterRange::Linspace { start, stop, length } => match length {
                0 => Vec::new(),
                1 => vec![start],
                _ => (0..length)
                    .map(|k| {
                        if k == length - 1 {
                            stop
                        } else {
                            start + (stop - start) * k as f64 / (length - 1) as f64
                        }
                    })
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceKind {
    #[default]
    Centroid,
    Hausdorff,
    /// `|log2 n_A - log2 n_B|` on cell counts.
    CellCountLogRatio,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingConfig {
    #[serde(default)]
    pub distance: DistanceKind,
    /// Largest distance at which two attractors may match; unlimited when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl MatchingConfig {
    pub fn to_match_config(&self) -> MatchConfig {
        let distance = match self.distance {
            DistanceKind::Centroid => SetDistance::Centroid,
            DistanceKind::Hausdorff => SetDistance::Hausdorff,
            DistanceKind::CellCountLogRatio => SetDistance::cell_count_log_ratio(),
        };
        MatchConfig::new(distance, self.threshold.unwrap_or(f64::INFINITY))
    }
}

/// Mapper settings with every default filled.
#[derive(Debug, Clone, PartialEq)]
pub enum Mapper {
    Recurrences(RecurrenceParams),
    FeaturizeGroup {
        grouping: GroupingConfig,
        trajectory: TrajectorySpec,
    },
    Proximity {
        recurrence: RecurrenceParams,
        delta: f64,
        reference_samples: usize,
        max_steps: u64,
    },
}

/// Job settings with every default filled.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Fractions {
        samples: usize,
    },
    Continuation {
        samples: usize,
        parameter: usize,
        values: Vec<f64>,
        seeds_per_attractor: usize,
    },
    FullBasins,
}

/// A validated config together with the objects it describes.
#[derive(Debug, Clone)]
pub struct Resolved {
    /// Normalized config: every default explicit, no output directory.
    pub config: RunConfig,
    pub output: PathBuf,
    pub model: ModelSpec,
    pub parameters: Vec<f64>,
    pub grid: Tessellation,
    pub sampler_box: StateSpaceBox,
    pub mapper: Mapper,
    pub job: Job,
    pub matching: MatchConfig,
    pub seed: u64,
    pub workers: usize,
    pub memory_budget: u64,
}

fn err(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::config(format!("{key}: {msg}"))
}

fn positive(key: &str, value: usize) -> Result<usize> {
    if value == 0 {
        return Err(err(key, "must be a positive integer"));
    }
    Ok(value)
}

fn check_len(key: &str, values: &[f64], model: &ModelSpec) -> Result<()> {
    if values.len() != model.dimension {
        return Err(err(
            key,
            format!(
                "expected {} values for the {}-dimensional model {}, got {}",
                model.dimension,
                model.dimension,
                model.name,
                values.len()
            ),
        ));
    }
    Ok(())
}

fn make_box(key: &str, min: &[f64], max: &[f64], model: &ModelSpec) -> Result<StateSpaceBox> {
    check_len(&format!("{key}.min"), min, model)?;
    check_len(&format!("{key}.max"), max, model)?;
    StateSpaceBox::new(min.to_vec(), max.to_vec()).map_err(|e| err(key, e))
}

impl RunConfig {
    /// Parse TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    /// Parse JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    /// Read a config file: JSON for `.json` paths, TOML otherwise.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        };
        parsed.map_err(|e| match e {
            CliError::Config(msg) => CliError::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::config(e.to_string()))
    }

    /// Fill defaults and validate.
    pub fn resolve(&self) -> Result<Resolved> {
        let model = zoo::model(&self.model.name).ok_or_else(|| {
            err(
                "model.name",
                format!("unknown model `{}`, expected one of {}", self.model.name, MODEL_NAMES.join(", ")),
            )
        })?;
        let parameters = self.resolve_parameters(&model)?;
        let grid = self.resolve_grid(&model)?;
        let sampler_box = match &self.sampler {
            Some(b) => make_box("sampler", &b.min, &b.max, &model)?,
            None => grid.bounds().clone(),
        };

        let seed = self.seed.unwrap_or(DEFAULT_SEED);
        let workers = positive("workers", self.workers.unwrap_or(1))?;
        let memory_budget = self.memory_budget.unwrap_or(DEFAULT_MEMORY_BUDGET as u64);
        if memory_budget == 0 {
            return Err(err("memory_budget", "must be a positive number of bytes"));
        }
        if let Some(t) = self.matching.threshold {
            if t.is_nan() || t < 0.0 {
                return Err(err("matching.threshold", format!("must be non-negative, got {t}")));
            }
        }

        let mapper = self.resolve_mapper(&model, &grid)?;
        let job = self.resolve_job(&model)?;
        match (&job, &mapper) {
            (Job::Continuation { .. }, Mapper::Proximity { .. }) => {
                return Err(err(
                    "mapper.kind",
                    "continuation jobs need `recurrences` or `featurize-group`",
                ))
            }
            (Job::FullBasins, Mapper::FeaturizeGroup { .. } | Mapper::Proximity { .. }) => {
                return Err(err("mapper.kind", "full-basins jobs need `recurrences`"))
            }
            _ => {}
        }

        let config = RunConfig {
            seed: Some(seed),
            workers: Some(workers),
            memory_budget: Some(memory_budget),
            output: None,
            model: ModelConfig {
                name: model.name.to_string(),
                parameters: Some(ParameterValues::List(parameters.clone())),
            },
            grid: GridConfig {
                min: Some(grid.bounds().min().to_vec()),
                max: Some(grid.bounds().max().to_vec()),
                cells: Some(Cells::PerAxis(grid.cells_per_axis().to_vec())),
            },
            sampler: Some(BoxConfig {
                min: sampler_box.min().to_vec(),
                max: sampler_box.max().to_vec(),
            }),
            mapper: match &mapper {
                Mapper::Recurrences(p) => MapperConfig::Recurrences {
                    recurrence: RecurrenceOverrides::full(p),
                },
                Mapper::FeaturizeGroup { grouping, trajectory } => MapperConfig::FeaturizeGroup {
                    grouping: grouping.clone(),
                    trajectory: TrajectoryOverrides::full(trajectory),
                },
                Mapper::Proximity {
                    recurrence,
                    delta,
                    reference_samples,
                    max_steps,
                } => MapperConfig::Proximity {
                    delta: Some(*delta),
                    reference_samples: Some(*reference_samples),
                    max_steps: Some(*max_steps),
                    recurrence: RecurrenceOverrides::full(recurrence),
                },
            },
            job: match &job {
                Job::Fractions { samples } => JobConfig::Fractions {
                    samples: Some(*samples),
                },
                Job::Continuation {
                    samples,
                    values,
                    seeds_per_attractor,
                    ..
                } => {
                    let JobConfig::Continuation { parameter, .. } = &self.job else {
                        unreachable!("job kind is preserved")
                    };
                    JobConfig::Continuation {
                        samples: Some(*samples),
                        parameter: parameter.clone(),
                        prange: Some(ParameterRange::Values(values.clone())),
                        seeds_per_attractor: Some(*seeds_per_attractor),
                    }
                }
                Job::FullBasins => JobConfig::FullBasins {},
            },
            matching: self.matching.clone(),
        };

        Ok(Resolved {
            config,
            output: self.output.clone().unwrap_or_else(|| PathBuf::from("out")),
            matching: self.matching.to_match_config(),
            model,
            parameters,
            grid,
            sampler_box,
            mapper,
            job,
            seed,
            workers,
            memory_budget,
        })
    }

    fn resolve_parameters(&self, model: &ModelSpec) -> Result<Vec<f64>> {
        let mut p = model.parameters.clone();
        match &self.model.parameters {
            None => {}
            Some(ParameterValues::List(list)) => {
                if list.len() != p.len() {
                    return Err(err(
                        "model.parameters",
                        format!(
                            "expected {} values ({}), got {}",
                            p.len(),
                            model.parameter_names.join(", "),
                            list.len()
                        ),
                    ));
                }
                p.clone_from(list);
            }
            Some(ParameterValues::Named(named)) => {
                for (name, &value) in named {
                    let i = model.parameter_index(name).ok_or_else(|| {
                        err(
                            &format!("model.parameters.{name}"),
                            format!(
                                "no such parameter; {} has {}",
                                model.name,
                                model.parameter_names.join(", ")
                            ),
                        )
                    })?;
                    p[i] = value;
                }
            }
        }
        if let Some(i) = p.iter().position(|v| !v.is_finite()) {
            return Err(err("model.parameters", format!("value {} is not finite", p[i])));
        }
        Ok(p)
    }

    fn resolve_grid(&self, model: &ModelSpec) -> Result<Tessellation> {
        let min = self.grid.min.clone().unwrap_or_else(|| model.bounds.min().to_vec());
        let max = self.grid.max.clone().unwrap_or_else(|| model.bounds.max().to_vec());
        let bounds = make_box("grid", &min, &max, model)?;
        let cells = match &self.grid.cells {
            None => vec![model.cells_per_axis; model.dimension],
            Some(Cells::Uniform(n)) => vec![*n; model.dimension],
            Some(Cells::PerAxis(v)) => {
                if v.len() != model.dimension {
                    return Err(err(
                        "grid.cells",
                        format!(
                            "expected one count or {} counts for the {}-dimensional model {}, got {}",
                            model.dimension,
                            model.dimension,
                            model.name,
                            v.len()
                        ),
                    ));
                }
                v.clone()
            }
        };
        for &c in &cells {
            positive("grid.cells", c)?;
        }
        Tessellation::new(bounds, cells).map_err(|e| err("grid", e))
    }

    fn resolve_mapper(&self, model: &ModelSpec, grid: &Tessellation) -> Result<Mapper> {
        Ok(match &self.mapper {
            MapperConfig::Recurrences { recurrence } => {
                let p = recurrence.apply(model.recurrence);
                p.validate().map_err(|e| err("mapper.recurrence", e))?;
                Mapper::Recurrences(p)
            }
            MapperConfig::FeaturizeGroup { grouping, trajectory } => {
                grouping.validate().map_err(|e| err("mapper.grouping", e))?;
                let t = trajectory.apply(model.trajectory);
                t.validate(model.system().kind()).map_err(|e| err("mapper.trajectory", e))?;
                Mapper::FeaturizeGroup {
                    grouping: grouping.clone(),
                    trajectory: t,
                }
            }
            MapperConfig::Proximity {
                delta,
                reference_samples,
                max_steps,
                recurrence,
            } => {
                let p = recurrence.apply(model.recurrence);
                p.validate().map_err(|e| err("mapper.recurrence", e))?;
                let widest = grid.widths().iter().copied().fold(0.0, f64::max);
                let delta = delta.unwrap_or(2.0 * widest);
                if !(delta > 0.0 && delta.is_finite()) {
                    return Err(err("mapper.delta", format!("must be positive, got {delta}")));
                }
                let reference_samples = positive(
                    "mapper.reference_samples",
                    reference_samples.unwrap_or(DEFAULT_SAMPLES),
                )?;
                let max_steps = max_steps.unwrap_or(DEFAULT_PROXIMITY_MAX_STEPS);
                if max_steps == 0 {
                    return Err(err("mapper.max_steps", "must be a positive integer"));
                }
                Mapper::Proximity {
                    recurrence: p,
                    delta,
                    reference_samples,
                    max_steps,
                }
            }
        })
    }

    fn resolve_job(&self, model: &ModelSpec) -> Result<Job> {
        Ok(match &self.job {
            JobConfig::Fractions { samples } => Job::Fractions {
                samples: positive("job.samples", samples.unwrap_or(DEFAULT_SAMPLES))?,
            },
            JobConfig::Continuation {
                samples,
                parameter,
                prange,
                seeds_per_attractor,
            } => {
                let parameter = match parameter {
                    None => return Err(err("job.parameter", "required for continuation jobs")),
                    Some(ParameterRef::Index(i)) => {
                        if *i >= model.parameters.len() {
                            return Err(err(
                                "job.parameter",
                                format!(
                                    "index {i} out of range; {} has {} parameters ({})",
                                    model.name,
                                    model.parameters.len(),
                                    model.parameter_names.join(", ")
                                ),
                            ));
                        }
                        *i
                    }
                    Some(ParameterRef::Name(name)) => model.parameter_index(name).ok_or_else(|| {
                        err(
                            "job.parameter",
                            format!(
                                "no parameter `{name}`; {} has {}",
                                model.name,
                                model.parameter_names.join(", ")
                            ),
                        )
                    })?,
                };
                let values = match prange {
                    None => {
                        return Err(err(
                            "job.prange",
                            "required for continuation jobs, as a list of values or {start, stop, length}",
                        ))
                    }
                    Some(r) => r.values(),
                };
                if values.is_empty() {
                    return Err(err("job.prange", "must contain at least one value"));
                }
                if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                    return Err(err("job.prange", format!("value {v} is not finite")));
                }
                Job::Continuation {
                    samples: positive("job.samples", samples.unwrap_or(DEFAULT_SAMPLES))?,
                    parameter,
                    values,
                    seeds_per_attractor: positive(
                        "job.seeds_per_attractor",
                        seeds_per_attractor.unwrap_or(DEFAULT_SEEDS_PER_ATTRACTOR),
                    )?,
                }
            }
            JobConfig::FullBasins {} => Job::FullBasins,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_both_ends() {
        let r = ParameterRange::Linspace {
            start: 1.34,
            stop: 1.37,
            length: 11,
        };
        let v = r.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[0], 1.34);
        assert_eq!(v[10], 1.37);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        let one = ParameterRange::Linspace {
            start: 2.0,
            stop: 3.0,
            length: 1,
        };
        assert_eq!(one.values(), vec![2.0]);
    }

    #[test]
    fn overrides_fill_from_base() {
        let base = RecurrenceParams::default();
        let o = RecurrenceOverrides {
            dt: Some(0.5),
            ..Default::default()
        };
        let p = o.apply(base);
        assert_eq!(p.dt, 0.5);
        assert_eq!(p.recurrences_to_find, base.recurrences_to_find);
        assert_eq!(RecurrenceOverrides::full(&p).apply(base), p);
    }
}

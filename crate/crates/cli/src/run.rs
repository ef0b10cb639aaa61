//! Executing a resolved config and writing its outputs.
//!
//! Every run writes `fractions.csv`, one dump per attractor under
//! `attractors/`, `manifest.json` and `timings.json`. Continuations add
//! `plot.svg`, featurize-group fractions jobs add `features.csv` and
//! full-basins jobs add `basins.txt`. Everything except `timings.json` is a
//! function of the resolved config alone.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use basins_core::continuation::{
    featurize_group_continuation, rafm_continuation, ContinuationResult, RafmConfig,
};
use basins_core::dynamics::UniformSampler;
use basins_core::export::{
    attractor_file_name, write_attractor, write_basins_grid, write_features, write_fractions_table,
};
use basins_core::featurize::{featurize_fractions, group_centroids, FeatureVector, FeaturizeRun};
use basins_core::mapping::{
    basins_fractions_of, basins_fractions_parallel, full_basins, AttractorMapper, BasinsGrid, Diagnostics,
    ProximityMapper, RecurrenceMapper,
};
use basins_core::{Attractor, BasinFractions, Label};
use serde::Serialize;

use crate::config::{Job, Mapper, Resolved, RunConfig};
use crate::error::{CliError, Result};
use crate::plot::write_stacked_band_plot;

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        if let Some(w) = self.workers {
            config.workers = Some(w);
        }
        if let Some(s) = self.seed {
            config.seed = Some(s);
        }
        if let Some(o) = &self.out {
            config.output = Some(o.clone());
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output: PathBuf,
    /// Written files, relative to `output`.
    pub files: Vec<PathBuf>,
    pub result: ContinuationResult,
}

/// Read, resolve and run the config at `path`.
pub fn run_path(path: &Path, overrides: &Overrides) -> Result<RunReport> {
    let mut config = RunConfig::from_path(path)?;
    overrides.apply(&mut config);
    run(&config.resolve()?)
}

struct Computed {
    result: ContinuationResult,
    features: Option<(Vec<Option<FeatureVector>>, Vec<Label>)>,
    basins: Option<BasinsGrid>,
}

struct Timer(Vec<(&'static str, f64)>);

impl Timer {
    fn time<T>(&mut self, phase: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        log::info!("{phase}");
        let start = Instant::now();
        let out = f();
        self.0.push((phase, start.elapsed().as_secs_f64()));
        out
    }
}

pub fn run(resolved: &Resolved) -> Result<RunReport> {
    let mut timer = Timer(Vec::new());
    let computed = compute(resolved, &mut timer)?;
    let files = timer.time("writing outputs", || {
        write_outputs(resolved, &computed).map_err(|e| CliError::runtime("writing outputs", e))
    })?;
    let mut files = files;
    write_timings(&resolved.output, &timer.0).map_err(|e| CliError::runtime("writing outputs", e))?;
    files.push(PathBuf::from("timings.json"));
    Ok(RunReport {
        output: resolved.output.clone(),
        files,
        result: computed.result,
    })
}

fn single_step(
    resolved: &Resolved,
    mut fractions: BasinFractions,
    attractors: BTreeMap<Label, Attractor>,
    diagnostics: Diagnostics,
) -> ContinuationResult {
    for &label in attractors.keys() {
        if fractions.as_map().get(&label).is_none() {
            fractions.insert(label, 0.0);
        }
    }
    ContinuationResult {
        parameter_indices: (0..resolved.parameters.len()).collect(),
        parameters: vec![resolved.parameters.clone()],
        fractions: vec![fractions],
        attractors: vec![attractors],
        diagnostics: vec![diagnostics],
    }
}

fn compute(resolved: &Resolved, timer: &mut Timer) -> Result<Computed> {
    let system = resolved
        .model
        .system_with(&resolved.parameters)
        .map_err(|e| CliError::config(e.to_string()))?;
    let sampler = UniformSampler::new(resolved.sampler_box.clone(), resolved.seed);
    let recurrence_template = |p| {
        RecurrenceMapper::new(system.clone(), resolved.grid.clone(), p).map_err(|e| CliError::config(e.to_string()))
    };
    let mut out = Computed {
        result: ContinuationResult {
            parameter_indices: Vec::new(),
            parameters: Vec::new(),
            fractions: Vec::new(),
            attractors: Vec::new(),
            diagnostics: Vec::new(),
        },
        features: None,
        basins: None,
    };

    match (&resolved.job, &resolved.mapper) {
        (Job::Fractions { samples }, Mapper::Recurrences(p)) => {
            let template = recurrence_template(*p)?;
            let mapped = timer.time("mapping", || {
                let ics = sampler.sample(*samples, 0);
                let mapped = if resolved.workers > 1 {
                    basins_fractions_parallel(&template, &ics, resolved.workers, &RafmConfig::default().merge)
                } else {
                    basins_fractions_of(&mut template.fresh(), &ics)
                };
                mapped.map_err(|e| CliError::runtime("mapping", e))
            })?;
            out.result = single_step(resolved, mapped.fractions, mapped.attractors, mapped.diagnostics);
        }
        (Job::Fractions { samples }, Mapper::FeaturizeGroup { grouping, trajectory }) => {
            let run = FeaturizeRun {
                trajectory: *trajectory,
                workers: resolved.workers,
            };
            let f = timer.time("featurizing and grouping", || {
                featurize_fractions(&system, &sampler, *samples, &*resolved.model.featurizer, grouping, &run)
                    .map_err(|e| CliError::runtime("featurizing and grouping", e))
            })?;
            let attractors = group_centroids(&f.features, &f.labels);
            let diagnostics = Diagnostics {
                mapped: *samples as u64,
                diverged: f.features.iter().filter(|x| x.is_none()).count() as u64,
                ..Diagnostics::default()
            };
            out.result = single_step(resolved, f.fractions, attractors, diagnostics);
            out.features = Some((f.features, f.labels));
        }
        (
            Job::Fractions { samples },
            Mapper::Proximity {
                recurrence,
                delta,
                reference_samples,
                max_steps,
            },
        ) => {
            let mut reference = recurrence_template(*recurrence)?;
            let known = timer.time("reference mapping", || {
                basins_fractions_of(&mut reference, &sampler.sample(*reference_samples, 1))
                    .map_err(|e| CliError::runtime("reference mapping", e))?;
                if reference.attractors().is_empty() {
                    return Err(CliError::runtime(
                        "reference mapping",
                        anyhow::anyhow!("no attractor found from {reference_samples} initial conditions"),
                    ));
                }
                Ok(reference.attractors().clone())
            })?;
            let mapped = timer.time("proximity mapping", || {
                let mut mapper = ProximityMapper::new(
                    system.clone(),
                    known.clone(),
                    *delta,
                    recurrence.dt,
                    *max_steps,
                )
                .map_err(|e| CliError::runtime("proximity mapping", e))?;
                basins_fractions_of(&mut mapper, &sampler.sample(*samples, 0))
                    .map_err(|e| CliError::runtime("proximity mapping", e))
            })?;
            out.result = single_step(resolved, mapped.fractions, known, mapped.diagnostics);
        }
        (
            Job::Continuation {
                samples,
                parameter,
                values,
                seeds_per_attractor,
            },
            Mapper::Recurrences(p),
        ) => {
            let template = recurrence_template(*p)?;
            let cfg = RafmConfig {
                samples: *samples,
                seeds_per_attractor: *seeds_per_attractor,
                matching: resolved.matching.clone(),
                workers: resolved.workers,
                ..RafmConfig::default()
            };
            out.result = timer.time("continuation", || {
                rafm_continuation(&template, *parameter, values, &sampler, &cfg)
                    .map_err(|e| CliError::runtime("continuation", e))
            })?;
        }
        (
            Job::Continuation {
                samples,
                parameter,
                values,
                ..
            },
            Mapper::FeaturizeGroup { grouping, trajectory },
        ) => {
            let points: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
            let run = FeaturizeRun {
                trajectory: *trajectory,
                workers: resolved.workers,
            };
            out.result = timer.time("featurize-group continuation", || {
                featurize_group_continuation(
                    &system,
                    &[*parameter],
                    &points,
                    &sampler,
                    *samples,
                    &*resolved.model.featurizer,
                    grouping,
                    &run,
                    resolved.memory_budget as u128,
                )
                .map_err(|e| CliError::runtime("featurize-group continuation", e))
            })?;
        }
        (Job::FullBasins, Mapper::Recurrences(p)) => {
            let mut mapper = recurrence_template(*p)?;
            let grid = timer.time("full basins", || {
                full_basins(&mut mapper).map_err(|e| CliError::runtime("full basins", e))
            })?;
            out.result = single_step(resolved, grid.fractions(), mapper.attractors().clone(), mapper.diagnostics());
            out.basins = Some(grid);
        }
        (Job::Continuation { .. }, Mapper::Proximity { .. }) | (Job::FullBasins, _) => {
            return Err(CliError::config("mapper.kind: not supported for this job"));
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct StepRecord<'a> {
    parameter: &'a [f64],
    attractors: usize,
    labels: Vec<Label>,
    diagnostics: &'a Diagnostics,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    parameter_indices: &'a [usize],
    steps: Vec<StepRecord<'a>>,
    totals: Diagnostics,
}

fn create(path: &Path) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_outputs(resolved: &Resolved, computed: &Computed) -> anyhow::Result<Vec<PathBuf>> {
    let dir = &resolved.output;
    let result = &computed.result;
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();

    let mut w = create(&dir.join("fractions.csv"))?;
    write_fractions_table(&mut w, result)?;
    w.flush()?;
    files.push(PathBuf::from("fractions.csv"));

    let dumps = dir.join("attractors");
    if dumps.exists() {
        fs::remove_dir_all(&dumps)?;
    }
    fs::create_dir(&dumps)?;
    for (s, attractors) in result.attractors.iter().enumerate() {
        for (&label, attractor) in attractors {
            let name = Path::new("attractors").join(attractor_file_name(s, label));
            let mut w = create(&dir.join(&name))?;
            write_attractor(&mut w, label, &result.parameters[s], attractor)?;
            w.flush()?;
            files.push(name);
        }
    }

    if let Some((features, labels)) = &computed.features {
        let mut w = create(&dir.join("features.csv"))?;
        write_features(&mut w, features, labels)?;
        w.flush()?;
        files.push(PathBuf::from("features.csv"));
    }
    if let Some(grid) = &computed.basins {
        let mut w = create(&dir.join("basins.txt"))?;
        write_basins_grid(&mut w, grid)?;
        w.flush()?;
        files.push(PathBuf::from("basins.txt"));
    }
    if let Job::Continuation { parameter, .. } = &resolved.job {
        let name = &resolved.model.parameter_names[*parameter];
        write_stacked_band_plot(result, name, &dir.join("plot.svg"))?;
        files.push(PathBuf::from("plot.svg"));
    }

    let mut totals = Diagnostics::default();
    result.diagnostics.iter().for_each(|d| totals.merge(d));
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: &resolved.config,
        parameter_indices: &result.parameter_indices,
        steps: (0..result.len())
            .map(|s| StepRecord {
                parameter: &result.parameters[s],
                attractors: result.attractors[s].len(),
                labels: result.fractions[s].labels().collect(),
                diagnostics: &result.diagnostics[s],
            })
            .collect(),
        totals,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    files.push(PathBuf::from("manifest.json"));
    Ok(files)
}

#[derive(Serialize)]
struct Timing {
    phase: &'static str,
    seconds: f64,
}

fn write_timings(dir: &Path, phases: &[(&'static str, f64)]) -> anyhow::Result<()> {
    let timings: Vec<Timing> = phases.iter().map(|&(phase, seconds)| Timing { phase, seconds }).collect();
    let mut text = serde_json::to_string_pretty(&timings)?;
    text.push('\n');
    fs::write(dir.join("timings.json"), text)?;
    Ok(())
}

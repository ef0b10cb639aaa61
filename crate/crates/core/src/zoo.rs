//! Ready-made dynamical systems with default boxes, grids and featurizers.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::dynamics::{DynamicalSystem, StateSpaceBox, Trajectory, TrajectorySpec};
use crate::error::{Error, Result};
use crate::featurize::{FeatureVector, Featurizer};
use crate::mapping::RecurrenceParams;

/// Names accepted by [`model`].
pub const MODEL_NAMES: [&str; 4] = ["lorenz84", "henon", "double_well", "kuramoto"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Lorenz84,
    Henon,
    DoubleWell,
    Kuramoto,
}

/// A named model with its defaults.
#[derive(Clone)]
pub struct ModelSpec {
    pub name: &'static str,
    pub dimension: usize,
    pub parameter_names: Vec<String>,
    pub parameters: Vec<f64>,
    pub bounds: StateSpaceBox,
    pub cells_per_axis: usize,
    pub recurrence: RecurrenceParams,
    pub trajectory: TrajectorySpec,
    pub featurizer: Arc<Featurizer>,
    kind: Kind,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpec")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("parameters", &self.parameters)
            .field("bounds", &self.bounds)
            .field("cells_per_axis", &self.cells_per_axis)
            .finish_non_exhaustive()
    }
}

impl ModelSpec {
    /// The system at the default parameters.
    pub fn system(&self) -> DynamicalSystem {
        self.system_with(&self.parameters)
            .expect("defaults are valid")
    }

    /// The system at the given parameters, which must have the default length.
    pub fn system_with(&self, parameters: &[f64]) -> Result<DynamicalSystem> {
        if parameters.len() != self.parameters.len() {
            return Err(Error::config(format!(
                "model {} takes {} parameters, got {}",
                self.name,
                self.parameters.len(),
                parameters.len()
            )));
        }
        let p = parameters.to_vec();
        Ok(match self.kind {
            Kind::Lorenz84 => DynamicalSystem::continuous(3, p, lorenz84_rule),
            Kind::Henon => DynamicalSystem::discrete(2, p, henon_rule),
            Kind::DoubleWell => DynamicalSystem::continuous(2, p, double_well_rule),
            Kind::Kuramoto => DynamicalSystem::continuous(self.dimension, p, kuramoto_rule)
                .with_periodic_coordinates(TAU),
        })
    }

    /// 0-based index of a parameter by name.
    pub fn parameter_index(&self, name: &str) -> Option<usize> {
        self.parameter_names.iter().position(|n| n == name)
    }
}

/// Look up a model by name.
pub fn model(name: &str) -> Option<ModelSpec> {
    match name {
        "lorenz84" => Some(lorenz84()),
        "henon" => Some(henon()),
        "double_well" => Some(double_well()),
        "kuramoto" => {
            Some(kuramoto_first_order(4, 1.0, &[-0.3, -0.1, 0.1, 0.3]).expect("valid defaults"))
        }
        _ => None,
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn lorenz84_rule(u: &[f64], p: &[f64], _t: f64, du: &mut [f64]) {
    let (f, g, a, b) = (p[0], p[1], p[2], p[3]);
    let (x, y, z) = (u[0], u[1], u[2]);
    du[0] = -y * y - z * z - a * x + a * f;
    du[1] = x * y - y - b * x * z + g;
    du[2] = b * x * y + x * z - z;
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn lorenz84_features(t: &Trajectory) -> FeatureVector {
    let mut out = Vec::with_capacity(6);
    for axis in 0..3 {
        let (m, s) = mean_and_std(&t.column(axis).collect::<Vec<_>>());
        out.push(m);
        out.push(s);
    }
    out
}

/// Lorenz-84 low-order atmosphere model
/// `x' = -y^2 - z^2 - a x + a F`, `y' = x y - y - b x z + G`,
/// `z' = b x y + x z - z` with parameters `[F, G, a, b]`.
///
/// Defaults `[6.886, 1.347, 0.255, 4.0]` put a fixed point, a limit cycle and
/// a chaotic attractor side by side.
pub fn lorenz84() -> ModelSpec {
    ModelSpec {
        name: "lorenz84",
        dimension: 3,
        parameter_names: names(&["F", "G", "a", "b"]),
        parameters: vec![6.886, 1.347, 0.255, 4.0],
        bounds: StateSpaceBox::cube(3, -3.0, 3.0).expect("valid box"),
        cells_per_axis: 600,
        recurrence: RecurrenceParams {
            dt: 0.05,
            substeps: 1,
            recurrences_to_find: 1000,
            recurrences_to_locate: 2000,
            steps_outside: 100,
            max_steps: 100_000_000,
            hits_to_converge: 10,
        },
        trajectory: TrajectorySpec {
            total: 100.0,
            transient: 200.0,
            dt: 0.01,
            sample_dt: 0.05,
        },
        featurizer: Arc::new(lorenz84_features),
        kind: Kind::Lorenz84,
    }
}

fn henon_rule(u: &[f64], p: &[f64], out: &mut [f64]) {
    out[0] = 1.0 - p[0] * u[0] * u[0] + u[1];
    out[1] = p[1] * u[0];
}

fn mean_features(t: &Trajectory) -> FeatureVector {
    let n = t.len() as f64;
    (0..t.dimension())
        .map(|axis| t.column(axis).sum::<f64>() / n)
        .collect()
}

/// Hénon map `x' = 1 - a x^2 + y`, `y' = b x` with parameters `[a, b]`
/// (Hénon, Commun. Math. Phys. 50, 1976).
pub fn henon() -> ModelSpec {
    ModelSpec {
        name: "henon",
        dimension: 2,
        parameter_names: names(&["a", "b"]),
        parameters: vec![1.4, 0.3],
        bounds: StateSpaceBox::cube(2, -2.5, 2.5).expect("valid box"),
        cells_per_axis: 400,
        // Locating must cover nearly every cell of the chaotic attractor,
        // otherwise its unlabeled remainder is later found as a new one.
        recurrence: RecurrenceParams {
            recurrences_to_locate: 100_000,
            ..RecurrenceParams::default()
        },
        trajectory: TrajectorySpec {
            total: 1000.0,
            transient: 1000.0,
            dt: 1.0,
            sample_dt: 1.0,
        },
        featurizer: Arc::new(mean_features),
        kind: Kind::Henon,
    }
}

fn double_well_rule(u: &[f64], p: &[f64], _t: f64, du: &mut [f64]) {
    du[0] = p[0] * u[0] - u[0] * u[0] * u[0];
    du[1] = -u[1];
}

/// Symmetric double well `x' = mu x - x^3`, `y' = -y` with parameter `[mu]`.
/// At the default `mu = 1` the attractors are `(±1, 0)` and the basin
/// boundary is the line `x = 0`.
pub fn double_well() -> ModelSpec {
    ModelSpec {
        name: "double_well",
        dimension: 2,
        parameter_names: names(&["mu"]),
        parameters: vec![1.0],
        bounds: StateSpaceBox::cube(2, -2.0, 2.0).expect("valid box"),
        cells_per_axis: 101,
        recurrence: RecurrenceParams::default(),
        trajectory: TrajectorySpec {
            total: 10.0,
            transient: 20.0,
            dt: 0.1,
            sample_dt: 1.0,
        },
        featurizer: Arc::new(mean_features),
        kind: Kind::DoubleWell,
    }
}

fn kuramoto_rule(theta: &[f64], p: &[f64], _t: f64, out: &mut [f64]) {
    let n = theta.len();
    let coupling = p[0] / n as f64;
    for i in 0..n {
        let pull: f64 = theta.iter().map(|&tj| (tj - theta[i]).sin()).sum();
        out[i] = p[1 + i] + coupling * pull;
    }
}

/// Kuramoto order parameter `R = |sum_j exp(i theta_j)| / n`.
pub fn order_parameter(theta: &[f64]) -> f64 {
    let (s, c) = theta
        .iter()
        .fold((0.0, 0.0), |(s, c), &t| (s + t.sin(), c + t.cos()));
    (s * s + c * c).sqrt() / theta.len() as f64
}

fn mean_order_parameter(t: &Trajectory) -> FeatureVector {
    vec![t.points.iter().map(|p| order_parameter(p)).sum::<f64>() / t.len() as f64]
}

/// First-order Kuramoto network
/// `theta_i' = omega_i + (K / n) sum_j sin(theta_j - theta_i)` with parameters
/// `[K, omega_1, ..., omega_n]` (Strogatz, Physica D 143, 2000). Phases are
/// wrapped into `[0, 2 pi)`, which is also the default box.
pub fn kuramoto_first_order(n: usize, coupling: f64, omega: &[f64]) -> Result<ModelSpec> {
    if n < 2 {
        return Err(Error::config(
            "a Kuramoto network needs at least 2 oscillators",
        ));
    }
    if omega.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: omega.len(),
        });
    }
    let mut parameter_names = vec!["K".to_string()];
    parameter_names.extend((1..=n).map(|i| format!("omega{i}")));
    let mut parameters = vec![coupling];
    parameters.extend_from_slice(omega);
    Ok(ModelSpec {
        name: "kuramoto",
        dimension: n,
        parameter_names,
        parameters,
        bounds: StateSpaceBox::cube(n, 0.0, TAU)?,
        cells_per_axis: 20,
        recurrence: RecurrenceParams::default(),
        trajectory: TrajectorySpec {
            total: 50.0,
            transient: 100.0,
            dt: 0.05,
            sample_dt: 0.5,
        },
        featurizer: Arc::new(mean_order_parameter),
        kind: Kind::Kuramoto,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{step, trajectory};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eval(system: &DynamicalSystem, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        system.evaluate(u, 0.0, &mut out);
        out
    }

    #[test]
    fn lorenz84_rule_values() {
        let sys = lorenz84().system();
        let d = eval(&sys, &[1.0, 1.0, 1.0]);
        assert!((d[0] - (-0.49907)).abs() < 1e-12);
        assert!((d[1] - (1.0 - 1.0 - 4.0 + 1.347)).abs() < 1e-12);
        assert!((d[2] - (4.0 + 1.0 - 1.0)).abs() < 1e-12);
        let origin = eval(&sys, &[0.0, 0.0, 0.0]);
        assert_eq!(origin, vec![0.255 * 6.886, 1.347, 0.0]);
    }

    #[test]
    fn lorenz84_matches_independent_copy() {
        // Written out separately, term by term.
        fn reference(s: [f64; 3], p: [f64; 4]) -> [f64; 3] {
            let [x, y, z] = s;
            let [big_f, big_g, a, b] = p;
            [
                -(y.powi(2)) - z.powi(2) - a * x + a * big_f,
                x * y - y - b * x * z + big_g,
                b * x * y + x * z - z,
            ]
        }
        let sys = lorenz84().system();
        let mut rng = ChaCha8Rng::seed_from_u64(84);
        for _ in 0..100 {
            let s = [
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ];
            let d = eval(&sys, &s);
            let r = reference(s, [6.886, 1.347, 0.255, 4.0]);
            for k in 0..3 {
                assert!((d[k] - r[k]).abs() <= 1e-12 * (1.0 + r[k].abs()));
            }
        }
    }

    #[test]
    fn henon_steps() {
        let sys = henon().system();
        assert_eq!(step(&sys, &[0.0, 0.0], 1.0).unwrap(), vec![1.0, 0.0]);
        let next = step(&sys, &[1.0, 0.0], 1.0).unwrap();
        assert!((next[0] + 0.4).abs() < 1e-15 && (next[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn henon_orbit_stays_in_box() {
        let spec = henon();
        let sys = spec.system();
        let mut u = vec![0.1, 0.1];
        for _ in 0..100_000 {
            u = step(&sys, &u, 1.0).unwrap();
            for k in 0..2 {
                assert!(u[k] > spec.bounds.min()[k] && u[k] < spec.bounds.max()[k]);
            }
        }
    }

    #[test]
    fn double_well_fixed_points_and_basins() {
        let sys = double_well().system();
        for x in [-1.0, 0.0, 1.0] {
            assert_eq!(eval(&sys, &[x, 0.0]), vec![0.0, 0.0]);
        }
        // Linearization: d/dx (x - x^3) = 1 - 3 x^2.
        let slope = |x: f64| 1.0 - 3.0 * x * x;
        assert!(slope(1.0) < 0.0 && slope(-1.0) < 0.0 && slope(0.0) > 0.0);

        let spec = TrajectorySpec {
            total: 1.0,
            transient: 30.0,
            dt: 0.05,
            sample_dt: 1.0,
        };
        let end = trajectory(&sys, &[0.3, 2.0], &spec).unwrap().points[0].clone();
        assert!((end[0] - 1.0).abs() < 1e-6 && end[1].abs() < 1e-6);
        let end = trajectory(&sys, &[-0.3, -2.0], &spec).unwrap().points[0].clone();
        assert!((end[0] + 1.0).abs() < 1e-6 && end[1].abs() < 1e-6);
    }

    #[test]
    fn order_parameter_extremes() {
        assert!((order_parameter(&[0.7; 5]) - 1.0).abs() < 1e-15);
        let spread: Vec<f64> = (0..6).map(|k| TAU * k as f64 / 6.0).collect();
        assert!(order_parameter(&spread) < 1e-15);
    }

    #[test]
    fn uncoupled_kuramoto_drifts() {
        let omega = [0.1, 0.4, -0.2];
        let sys = kuramoto_first_order(3, 0.0, &omega).unwrap().system();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let th: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..TAU)).collect();
            let d = eval(&sys, &th);
            // Relative phase velocities never vanish, so no phase-locked state.
            assert!((d[1] - d[0] - 0.3).abs() < 1e-15);
            assert!((d[2] - d[0] + 0.3).abs() < 1e-15);
        }
        assert!(kuramoto_first_order(1, 1.0, &[0.0]).is_err());
        assert!(kuramoto_first_order(3, 1.0, &[0.0]).is_err());
    }

    #[test]
    fn synchronized_state_is_coherent() {
        let spec = kuramoto_first_order(4, 2.0, &[0.0; 4]).unwrap();
        let sys = spec.system();
        assert_eq!(eval(&sys, &[1.0; 4]), vec![0.0; 4]);
        let t = TrajectorySpec {
            total: 1.0,
            transient: 50.0,
            dt: 0.05,
            sample_dt: 0.5,
        };
        let traj = trajectory(&sys, &[0.1, 0.5, 0.9, 1.3], &t).unwrap();
        assert!((spec.featurizer)(&traj)[0] > 0.999);
        assert!(traj
            .points
            .iter()
            .flatten()
            .all(|&x| (0.0..TAU).contains(&x)));
    }

    #[test]
    fn every_model_steps_from_its_box_center() {
        for name in MODEL_NAMES {
            let spec = model(name).unwrap();
            let sys = spec.system();
            assert_eq!(sys.dimension(), spec.dimension);
            assert_eq!(spec.bounds.dimension(), spec.dimension);
            assert_eq!(spec.parameter_names.len(), spec.parameters.len());
            let dt = if name == "henon" { 1.0 } else { 0.01 };
            assert!(step(&sys, &spec.bounds.center(), dt).is_ok(), "{name}");
            spec.recurrence.validate().unwrap();
        }
        assert!(model("lorenz63").is_none());
        assert_eq!(lorenz84().parameter_index("G"), Some(1));
    }
}

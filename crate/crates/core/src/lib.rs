//! Find the attractors of a multistable dynamical system inside a state-space
//! box, estimate their basin fractions, and continue attractors and fractions
//! across parameter ranges.
//!
//! Two independent routes are provided:
//!
//! * [`mapping`]: a recurrence finite-state machine on a sparse tessellation of
//!   the box, which locates actual attractors ([`mapping::RecurrenceMapper`]).
//! * [`featurize`]: integrate trajectories, map them to feature vectors and
//!   group those (DBSCAN with an automatic radius, histograms, or templates).
//!
//! [`continuation`] ties the two together over parameter ranges: seeding,
//! attractor matching with pluggable set distances, rematching and
//! aggregation.

pub mod continuation;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod featurize;
pub mod mapping;
pub mod matching;
pub mod zoo;

pub use dynamics::{DynamicalSystem, StateSpaceBox, SystemKind, Trajectory};
pub use error::{Error, Result};
pub use mapping::{Attractor, BasinFractions, Label, DIVERGED};

//! Modeling toolkit for atom-interferometric infrasound gravitational-wave
//! detectors: pulse-sequence response, spurious-phase budgets, relaunch
//! trajectories and strain sensitivity curves.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod error;
pub mod grid;
pub mod io;
pub mod model;
pub mod par;
pub mod response;
pub mod sequence;
pub mod sensitivity;
pub mod trajectory;

pub use error::{Error, Result};
pub use grid::FrequencyGrid;
pub use model::{AtomSource, BeamSplitterSpec, DetectorConfig, Geometry, PhysicalConstants};
pub use par::Execution;
pub use sequence::{PulseEvent, PulseSequence, SequenceKind};

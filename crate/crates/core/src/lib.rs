//! Intelligent trial-and-error damage recovery.
//!
//! The crate is split along the two phases of the method:
//!
//! * **Map creation**: [`map_elites`] fills an [`archive::ArchiveGrid`] with the
//!   best controller found for every cell of a discretized behavior space.
//! * **Adaptation**: [`adapt`] searches that archive with a Gaussian process
//!   ([`gp`]) whose prior mean is the archive's own performance prediction,
//!   choosing each trial by upper confidence bound.
//!
//! [`arm`] is a deterministic planar 8-joint arm used as the end-to-end
//! testbed, [`gait`] holds the hexapod gait generator and trajectory
//! descriptors, and [`bench`] runs the knockout variants side by side.

pub mod adapt;
pub mod archive;
pub mod arm;
pub mod bench;
pub mod error;
pub mod gait;
pub mod gp;
pub mod linalg;
pub mod map_elites;
pub mod rng;
pub mod stats;

pub use archive::{ArchiveGrid, Elite, Genome, GridSpec, InsertOutcome};
pub use error::{Error, Result};

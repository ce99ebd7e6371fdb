//! Approximate uniform sampling of proper k-colourings of sparse random graphs.
//!
//! The sampler works in three phases:
//!
//! 1. [`schedule`] deletes every edge that lies only on long cycles, producing a
//!    sparse base graph `G_0` and the ordered list of deleted edges.
//! 2. [`base`] draws an exactly uniform colouring of `G_0` with a list-colouring
//!    dynamic program over trees and low-cyclomatic components.
//! 3. [`switching`] re-inserts the deleted edges one at a time; whenever the
//!    current colouring is monochromatic on the re-inserted edge it swaps the
//!    two colour classes of a Kempe chain rooted at one endpoint.
//!
//! [`pipeline`] ties the phases together with run logging and random-bit
//! accounting.

pub mod base;
pub mod error;
pub mod graph;
pub mod pipeline;
pub mod rng;
pub mod schedule;
pub mod switching;

pub use base::{sample_base, Colouring, ColouringStatus};
pub use error::{Error, Result};
pub use graph::{Edge, Graph, Vertex};
pub use pipeline::{run, RunConfig, RunLog};
pub use switching::StepMode;
pub use rng::{Chooser, RandomStream, StreamLabel};
pub use schedule::{build_schedule, DeletionSchedule};

/// Colour identifiers are `0..k`.
pub type Colour = u32;

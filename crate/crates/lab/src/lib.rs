//! Exact oracles and statistical experiments for the `recolour-core`
//! sampler.
//!
//! Small instances are checked by brute force with exact rational
//! arithmetic: laws of the production code are obtained by enumerating its
//! random branches ([`replay`]), compared against uniform laws from
//! exhaustive enumeration ([`enumerate`]). Larger-scale behaviour is probed
//! by Monte Carlo ([`decay`], [`correlation`]).

pub mod alpha;
pub mod bijection;
pub mod correlation;
pub mod decay;
pub mod dist;
pub mod domination;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod graphs;
pub mod replay;
pub mod report;
pub mod suites;

pub use alpha::{alpha_exact, verify_step_accuracy, AlphaReport, StepAccuracy};
pub use dist::{tv_distance, ColouringDistribution};
pub use enumerate::enumerate_proper;
pub use error::{LabError, LabResult};
pub use exact::{exact_output_distribution, uniform_proper};
pub use suites::{run_suite, Suite, SuiteOptions};

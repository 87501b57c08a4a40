//! Generators, seeding, bit extraction and a statistical battery for
//! multi-stream quality studies.

pub mod battery;
pub mod bitstream;
pub mod campaign;
pub mod error;
pub mod kat;
pub mod prng;
pub mod report;
pub mod seeding;

pub use battery::{
    classify, run_battery, Battery, BatteryProfile, Cluster, PValue, Statistic, TestDefinition, TestKind, TestResult,
    Thresholds, Verdict,
};
pub use bitstream::{HalfPolicy, Word32Source, WordSource};
pub use error::{Error, Result};
pub use prng::{GeneratorId, GeneratorState, OutputKind};
pub use seeding::{derive, parse_state, render_state, RenderedState, SeedIndex};

/// Artifact version recorded in report headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

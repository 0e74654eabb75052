//! Experiment driver for the `stoq` compiler: configuration, seeded
//! multi-run execution and CSV/JSON artifacts.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod stats;

pub use config::{AlphabetKind, Experiment, ExperimentConfig, Overrides};
pub use error::{HarnessError, Result};
pub use experiments::run;

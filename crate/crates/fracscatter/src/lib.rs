//! Experiment runner for `fracscatter-core`: a `rustfft` transform backend,
//! the key-value configuration format, the experiment kinds, and CSV/JSON
//! output.

pub mod backend;
pub mod config;
pub mod experiments;
pub mod output;
pub mod probes;
pub mod selftest;

pub use backend::RustFftBackend;
pub use config::{ConfigError, ExperimentConfig, Kind};
pub use experiments::{run, Check, Report, RunError, Setup, Table};

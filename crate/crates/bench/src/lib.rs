//! The `groundfact` command line and the library behind it.
//!
//! Benchmark flow: `ingest` raw rows into a normalized file, `split` it into
//! validation and test halves by query group, optionally `tune` thresholds on
//! validation, then `eval` a checker on test and `report` one or more runs as
//! a table. `synth` drives the data synthesis pipelines through a gateway
//! config, and `annotate-serve` runs the human evaluation service.
//!
//! Every artifact-producing command writes `<output>.manifest.json` with the
//! command line, a settings digest, seeds, backend identity, timestamps and
//! sha256 digests of inputs and outputs. Reports themselves carry no
//! timestamps and list records by id, so reruns are byte-identical.

pub mod cli;
mod commands;
pub mod datasets;
pub mod engine;
mod error;
pub mod eval;
pub mod ingest;
pub mod io;
pub mod manifest;
pub mod report;
pub mod split;
pub mod tune;

pub use commands::run;
pub use engine::{Engine, PolicyChoice, RecordOptions, RecordResult};
pub use error::{BenchError, EXIT_BACKEND, EXIT_DATA, EXIT_OK, EXIT_USAGE};
pub use eval::{attach_bootstrap, evaluate, DatasetResult, EvalOptions, EvalReport};
pub use manifest::RunManifest;
pub use tune::{tune, ThresholdFile, TunedEntry};

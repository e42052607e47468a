//! Experiment harnesses and file plumbing behind the `sdist` binary.

pub mod data;
pub mod error;
pub mod experiments;
pub mod table;

pub use error::{CliError, Result};
pub use experiments::{
    gen_random_sparse_target, run_compression, run_experiment, run_prototypes, run_simulation,
    CompressParams, ExperimentSpec, HistogramSource, ObjectiveKind, PointSource, PrototypeParams,
    SimulateParams,
};
pub use table::{Cell, ResultsTable};

//! File formats and command dispatch for the `smoothperc` binary.

pub mod error;
pub mod io;
pub mod run;

pub use error::{CliError, Result, EXIT_DATA, EXIT_USAGE};
pub use io::{format_record, load_dataset, load_gram, load_labels, read_trace, write_trace};
pub use run::{per_algorithm_path, run, Command, KernelSpec, RunRequest, RunResult};

//! File formats, reports and the `semsec` command-line surface.

pub mod commands;
pub mod fixtures;
pub mod format;
pub mod report;

pub use commands::{run, Cli, CliError, Command, Outcome};
pub use format::{load_family, load_path, load_str, save_code, save_model, save_system, save_v_theta, save_v_theta_system, FormatError, Loaded, Model};
pub use report::{AnalysisReport, Measured};

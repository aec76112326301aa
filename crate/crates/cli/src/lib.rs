//! Configuration, orchestration and CSV output for the `magdimer` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod table;

pub use commands::{compute, run_subcommand, Command};
pub use config::{parse_config, serialize_config, ExperimentConfig, Overrides, DEFAULT_CONFIG};
pub use error::CliError;
pub use plot::emit_plot_data;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MAGDIMER_THREADS";

/// Sizes the global worker pool from [`THREADS_ENV`] when it is set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "{THREADS_ENV} must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size worker pool: {e}")))
}

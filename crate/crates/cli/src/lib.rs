//! Front end of the `rwl` binary: TOML configuration, experiment dispatch
//! and bit-stable CSV/JSON output.

pub mod app;
pub mod config;
pub mod error;
pub mod output;

pub use app::dispatch;
pub use config::RunConfig;
pub use error::CliError;

/// JSON Schema of `report.json`.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");
/// Required CSV columns per series kind.
pub const SERIES_SCHEMA: &str = include_str!("../schema/series.schema.json");

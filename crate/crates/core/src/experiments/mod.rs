//! Scenario grids, statistics over replications, CSV output and config
//! files.

mod config;
mod grid;
mod output;
mod stats;

pub use config::ConfigFile;
pub use grid::{run_grid, scenario_id, CellResult, Complexity, Figure, GridCell, ScenarioGrid};
pub use output::{format_sig, read_csv, write_csv, CsvRow, CSV_HEADER};
pub use stats::{aggregate, normal_quantile, AggregateSeries, PeriodStats, TailSummary};

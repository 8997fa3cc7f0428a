//! Parameter sweeps: JSON configuration in, one CSV row per grid point out.

mod config;
mod output;
mod table;

pub use config::{default_workers, parse_config, EnergyAxis, SweepConfig};
pub use output::{write_csv, write_csv_to, write_json, HEADER};
pub use table::{run_bounds, run_sweep, run_sweep_with_workers, ResultTable, Row};

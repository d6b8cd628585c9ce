//! Experiment sweeps: configuration, execution, aggregation and output files.

mod config;
mod dataset;
mod report;
mod sweep;

pub use config::{
    load_config, parse_config, ExperimentSpec, DEFAULT_DEPLOYMENT_ATTEMPTS, DEFAULT_NODE_COUNT,
    DEFAULT_PAYLOAD_GRID, DEFAULT_RANGE_CM,
};
pub use dataset::{mean_stddev, summarize, write_summary_csv, Dataset, Row, SummaryRow, CSV_HEADER};
pub use report::{emit_plot_series, series_file_name, write_topology_dumps};
pub use sweep::{build_topology, deployment_seed, run_logged, run_seed, run_sweep, run_sweep_inspect};

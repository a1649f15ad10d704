//! Datasets, experiment orchestration and reports.

mod config;
mod experiment;
mod io;
mod report;
mod synthetic;

pub use config::{ExperimentConfig, Mode};
pub use experiment::{
    column_order, evaluation_irls, load_dataset, offline_pipeline, run_experiment, run_on_matrix,
    ExperimentOutcome, MetricsRow,
};
pub use io::{
    load_matrix, read_assignment, read_binary, read_csv, save_matrix, write_binary, write_csv,
    MatrixFormat,
};
pub use report::{
    file_header, format_summary, read_metrics, report_from_file, report_header, summarize,
    write_outputs, SummaryRow,
};
pub use synthetic::{gen_synthetic, synthetic_certificate};

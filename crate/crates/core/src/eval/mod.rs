//! Experiment grids: datasets x methods x realizations, with accuracy
//! aggregation and resumable CSV output.

mod mnist;
mod persist;
mod runner;
mod spec;

pub use mnist::{
    mnist_dir, mnist_files, run_mnist, run_mnist_files, write_mnist_table, MnistConfig, MnistRow, MNIST_DIR_VAR,
    TRAIN_IMAGES, TRAIN_LABELS,
};
pub use persist::{
    read_realizations, run_grid_to_dir, write_realizations, write_summary, write_timings, CONFIG_FILE,
    REALIZATIONS_FILE, SUMMARY_FILE, TIMINGS_FILE,
};
pub use runner::{
    algo_seed, compute_metric, data_seed, mean_std, run_algorithm, run_cell, run_dataset, run_grid, CellResult,
    ExperimentResult, RealizationResult,
};
pub use spec::{
    Algorithm, DatasetCell, ExperimentSpec, MethodSpec, MetricKind, DEFAULT_REALIZATIONS, DEFAULT_SIGMA_FACTOR,
};

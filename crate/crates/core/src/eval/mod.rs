//! Evaluation harness: marginal similarity, downstream accuracy and the epsilon sweep.

pub mod adult;
mod experiment;
mod similarity;
mod tree;

pub use experiment::{
    cell_seed, run_experiment, run_sweep, train_test_split, CellSummary, ExperimentConfig, MetricReport, MetricRow,
    Summary, Sweep, BASELINE, DEFAULT_EPSILONS, DEFAULT_RUNS, TEST_FRACTION,
};
pub use similarity::{covering_bounds, marginal_similarity};
pub use tree::{downstream_accuracy, DecisionTree, EvalClassifier};

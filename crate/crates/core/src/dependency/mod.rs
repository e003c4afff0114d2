//! Dependency structure: explicit orders, prediction matrices and DP structure inference.

mod infer;
mod kahn;
mod mi;
mod structure;

pub use infer::{
    discretize_table, infer_chain, infer_chain_with, infer_network, infer_network_with, Inference, InferenceOptions,
    InferenceStats,
};
pub use kahn::kahn_sort;
pub use mi::{mi_sensitivity, mutual_information, CacheStats, HistogramCache, JointCodes};
pub use structure::{Dependency, PredictionMatrix, VisitOrder};

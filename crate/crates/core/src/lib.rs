//! Differentially private autoregressive tabular synthesis.
//!
//! A table's joint distribution is factored column by column along a visit order; each
//! conditional is fitted by a private sampler method and the privacy budget is split
//! between dependency inference and the per-column methods.

pub mod data;
pub mod dependency;
pub mod engine;
pub mod error;
pub mod eval;
pub mod instances;
pub mod mechanisms;
pub mod methods;

pub use data::{Bounds, Column, ColumnBounds, ColumnType, Schema, SchemaFile, Table};
pub use engine::{fit, FitOutput, FittedModel, ModelSpec, Warning, WarningKind};
pub use error::{Error, Result};
pub use instances::InstanceKind;
pub use mechanisms::{BudgetLedger, PrivacyBudget};
pub use methods::MethodKind;

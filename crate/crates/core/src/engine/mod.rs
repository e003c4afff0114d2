//! Fitting pipeline, generation and the model file format.

mod file;
mod model;
mod spec;

pub use file::FORMAT_VERSION;
pub use model::{fit, FitOutput, FittedModel, GenerationTrace, Warning, WarningKind};
pub use spec::{DependencyMode, FamilyMethods, ModelSpec, DEFAULT_METHOD};

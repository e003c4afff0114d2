//! Differential-privacy primitives and budget accounting.

mod budget;
mod exponential;
mod laplace;

pub use budget::{
    allocate_budget, Allocation, BudgetLedger, BudgetSplit, LedgerEntry, PrivacyBudget, Share, DEFAULT_DEPENDENCY_SHARE,
};
pub use exponential::{exponential_select, exponential_select_index, selection_probabilities};
pub(crate) use laplace::check_epsilon;
pub use laplace::{laplace_noise, Laplace};

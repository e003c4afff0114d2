use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::data::{Bounds, ColumnType, Schema};
use crate::dependency::PredictionMatrix;
use crate::error::{Error, Result};
use crate::mechanisms::{BudgetSplit, PrivacyBudget};
use crate::methods::{MethodConfig, MethodKind};

/// How the dependency structure is obtained when neither an explicit visit order nor a
/// prediction matrix is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DependencyMode {
    /// Every column parentless, schema order.
    Independent,
    /// Greedy DP network with at most `n_parents` parents per column.
    Infer { n_parents: usize },
    /// Greedy DP chain conditioning each column on all visited columns.
    InferChain,
}

/// Method to use for every column of a type family that has no explicit entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMethods {
    pub numerical: MethodKind,
    pub categorical: MethodKind,
}

impl FamilyMethods {
    pub fn uniform(kind: MethodKind) -> Self {
        Self {
            numerical: kind,
            categorical: kind,
        }
    }

    pub fn for_type(&self, ty: ColumnType) -> MethodKind {
        if ty.is_numerical() {
            self.numerical
        } else {
            self.categorical
        }
    }
}

/// Everything a fit needs besides the data.
///
/// At most one of `visit_order`, `prediction_matrix` and `dependency` may be set. With
/// none of them the schema order is used and each column conditions on all earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub split: Option<BudgetSplit>,
    #[serde(default)]
    pub bounds: Option<Bounds>,
    #[serde(default)]
    pub visit_order: Option<Vec<String>>,
    #[serde(default)]
    pub prediction_matrix: Option<PredictionMatrix>,
    #[serde(default)]
    pub dependency: Option<DependencyMode>,
    #[serde(default)]
    pub methods: IndexMap<String, MethodKind>,
    #[serde(default)]
    pub family_methods: Option<FamilyMethods>,
    #[serde(default)]
    pub config: MethodConfig,
    #[serde(default)]
    pub max_candidates: Option<usize>,
}

/// Method used for columns that nothing in the spec covers.
pub const DEFAULT_METHOD: MethodKind = MethodKind::ConditionalDistribution;

impl ModelSpec {
    pub fn budget(&self) -> Result<PrivacyBudget> {
        PrivacyBudget::new(self.epsilon)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    /// Checks everything that can be checked without data.
    pub fn validate(&self, schema: &Schema) -> Result<()> {
        if self.visit_order.is_some() && self.prediction_matrix.is_some() {
            return Err(Error::InvalidSpec(
                "at most one of visit_order and prediction_matrix may be given".into(),
            ));
        }
        if self.dependency.is_some() && (self.visit_order.is_some() || self.prediction_matrix.is_some()) {
            return Err(Error::InvalidSpec(
                "a dependency mode cannot be combined with visit_order or prediction_matrix".into(),
            ));
        }
        self.budget()?;
        if let Some(DependencyMode::Infer { n_parents: 0 }) = self.dependency {
            return Err(Error::InvalidSpec("n_parents must be at least 1".into()));
        }
        if self.config.n_bins == 0 {
            return Err(Error::InvalidSpec("n_bins must be positive".into()));
        }
        if self.max_candidates == Some(0) {
            return Err(Error::InvalidSpec("max_candidates must be positive".into()));
        }
        for name in self.methods.keys() {
            schema.require(name)?;
        }
        if let Some(order) = &self.visit_order {
            for c in order {
                schema.require(c)?;
            }
        }
        if let Some(m) = &self.prediction_matrix {
            for (c, ps) in m {
                schema.require(c)?;
                for p in ps {
                    schema.require(p)?;
                }
            }
        }
        if let Some(b) = &self.bounds {
            for (name, _) in b.iter() {
                schema.require(name)?;
            }
        }
        for def in schema.columns() {
            self.method_for(&def.name, def.ty).0.check_supports(&def.name, def.ty)?;
        }
        Ok(())
    }

    /// The method for a column and whether the spec chose it (as opposed to the default).
    pub fn method_for(&self, column: &str, ty: ColumnType) -> (MethodKind, bool) {
        if let Some(k) = self.methods.get(column) {
            return (*k, true);
        }
        match &self.family_methods {
            Some(f) => (f.for_type(ty), true),
            None => (DEFAULT_METHOD, false),
        }
    }

    /// Whether the dependency step runs a private mechanism for a table with `k` columns.
    pub fn dependency_consumes(&self, k: usize) -> bool {
        matches!(
            self.dependency,
            Some(DependencyMode::Infer { .. } | DependencyMode::InferChain)
        ) && k >= 2
    }
}

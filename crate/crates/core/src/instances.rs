//! The preset engines, expressed as ready-made model specs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Bounds;
use crate::engine::{DependencyMode, FamilyMethods, ModelSpec};
use crate::error::{Error, Result};
use crate::methods::MethodKind;

pub const DEFAULT_N_PARENTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InstanceKind {
    #[serde(rename = "independent")]
    Independent,
    #[serde(rename = "privbayes")]
    PrivBayes,
    #[serde(rename = "dp-synthpop")]
    DpSynthpop,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 3] = [
        InstanceKind::Independent,
        InstanceKind::PrivBayes,
        InstanceKind::DpSynthpop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Independent => "independent",
            InstanceKind::PrivBayes => "privbayes",
            InstanceKind::DpSynthpop => "dp-synthpop",
        }
    }

    pub fn spec(self, epsilon: Option<f64>, bounds: Option<Bounds>) -> ModelSpec {
        match self {
            InstanceKind::Independent => independent_spec(epsilon, bounds),
            InstanceKind::PrivBayes => privbayes_spec(epsilon, bounds, DEFAULT_N_PARENTS),
            InstanceKind::DpSynthpop => dpsynthpop_spec(epsilon, bounds),
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let norm = if norm == "dpsynthpop" {
            "dp-synthpop".to_string()
        } else {
            norm
        };
        InstanceKind::ALL.into_iter().find(|k| k.name() == norm).ok_or_else(|| {
            Error::InvalidSpec(format!(
                "unknown engine \"{s}\"; valid engines: {}",
                InstanceKind::ALL.map(InstanceKind::name).join(", ")
            ))
        })
    }
}

/// Every column modelled on its own with a histogram sampler.
pub fn independent_spec(epsilon: Option<f64>, bounds: Option<Bounds>) -> ModelSpec {
    ModelSpec {
        epsilon,
        bounds,
        dependency: Some(DependencyMode::Independent),
        family_methods: Some(FamilyMethods::uniform(MethodKind::HistogramSampler)),
        ..Default::default()
    }
}

/// Inferred Bayesian network with conditional distributions.
pub fn privbayes_spec(epsilon: Option<f64>, bounds: Option<Bounds>, n_parents: usize) -> ModelSpec {
    ModelSpec {
        epsilon,
        bounds,
        dependency: Some(DependencyMode::Infer { n_parents }),
        family_methods: Some(FamilyMethods::uniform(MethodKind::ConditionalDistribution)),
        ..Default::default()
    }
}

/// Inferred chain with linear (numerical) and logistic (categorical) regressions.
pub fn dpsynthpop_spec(epsilon: Option<f64>, bounds: Option<Bounds>) -> ModelSpec {
    ModelSpec {
        epsilon,
        bounds,
        dependency: Some(DependencyMode::InferChain),
        family_methods: Some(FamilyMethods {
            numerical: MethodKind::LinearRegression,
            categorical: MethodKind::LogisticRegression,
        }),
        ..Default::default()
    }
}

//! Per-column conditional samplers: fit on (parents, target), then sample given parents.

mod conditional;
mod encoding;
mod linear;
mod logistic;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Column, ColumnType};
use crate::error::{Error, Result};

pub use conditional::{fit_conditional, ConditionalTable, DEFAULT_CELL_CAP};
pub use encoding::{ColumnMeta, FitColumn};
pub use linear::{fit_linear, LinearModel, LinearOptions, COEFFICIENT_SHARE, MIN_PRIVATE_ROWS};
pub use logistic::{fit_logistic, LogisticModel, DEFAULT_LAMBDA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    HistogramSampler,
    ConditionalDistribution,
    LinearRegression,
    LogisticRegression,
}

impl MethodKind {
    pub const ALL: [MethodKind; 4] = [
        MethodKind::HistogramSampler,
        MethodKind::ConditionalDistribution,
        MethodKind::LinearRegression,
        MethodKind::LogisticRegression,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::HistogramSampler => "histogram_sampler",
            MethodKind::ConditionalDistribution => "conditional_distribution",
            MethodKind::LinearRegression => "linear_regression",
            MethodKind::LogisticRegression => "logistic_regression",
        }
    }

    pub fn supports(self, ty: ColumnType) -> bool {
        match self {
            MethodKind::LinearRegression => ty.is_numerical(),
            MethodKind::LogisticRegression => ty.is_categorical(),
            _ => true,
        }
    }

    /// Whether the method conditions on parent columns at all.
    pub fn uses_parents(self) -> bool {
        self != MethodKind::HistogramSampler
    }

    pub fn check_supports(self, column: &str, ty: ColumnType) -> Result<()> {
        if self.supports(ty) {
            Ok(())
        } else {
            Err(Error::MethodTypeMismatch {
                column: column.to_string(),
                method: self.name().to_string(),
                ty: ty.name().to_string(),
            })
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        if let Some(k) = MethodKind::ALL.iter().find(|k| k.name() == norm) {
            return Ok(*k);
        }
        match norm.as_str() {
            "decision_tree" | "random_forest" => Err(Error::UnsupportedMethod(norm)),
            _ => Err(Error::InvalidSpec(format!("unknown method \"{s}\""))),
        }
    }
}

/// Tuning knobs shared by all methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodConfig {
    pub n_bins: usize,
    pub cell_cap: u64,
    pub logistic_lambda: f64,
    pub linear: LinearOptions,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            n_bins: crate::data::DEFAULT_BINS,
            cell_cap: DEFAULT_CELL_CAP,
            logistic_lambda: DEFAULT_LAMBDA,
            linear: LinearOptions::default(),
        }
    }
}

/// A fitted sampler, serialized with a `"kind"` discriminator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedMethod {
    HistogramSampler(ConditionalTable),
    ConditionalDistribution(ConditionalTable),
    LinearRegression(LinearModel),
    LogisticRegression(LogisticModel),
}

/// Fits `kind` for `target` given `parents`. A histogram sampler ignores `parents`.
pub fn fit_method<R: Rng + ?Sized>(
    kind: MethodKind,
    target: &FitColumn<'_>,
    parents: &[FitColumn<'_>],
    epsilon: Option<f64>,
    config: &MethodConfig,
    rng: &mut R,
) -> Result<FittedMethod> {
    kind.check_supports(target.name, target.ty)?;
    Ok(match kind {
        MethodKind::HistogramSampler => FittedMethod::HistogramSampler(fit_conditional(
            target,
            &[],
            epsilon,
            config.n_bins,
            config.cell_cap,
            rng,
        )?),
        MethodKind::ConditionalDistribution => FittedMethod::ConditionalDistribution(fit_conditional(
            target,
            parents,
            epsilon,
            config.n_bins,
            config.cell_cap,
            rng,
        )?),
        MethodKind::LinearRegression => {
            FittedMethod::LinearRegression(fit_linear(target, parents, epsilon, &config.linear, rng)?)
        }
        MethodKind::LogisticRegression => {
            FittedMethod::LogisticRegression(fit_logistic(target, parents, epsilon, config.logistic_lambda, rng)?)
        }
    })
}

impl FittedMethod {
    pub fn kind(&self) -> MethodKind {
        match self {
            FittedMethod::HistogramSampler(_) => MethodKind::HistogramSampler,
            FittedMethod::ConditionalDistribution(_) => MethodKind::ConditionalDistribution,
            FittedMethod::LinearRegression(_) => MethodKind::LinearRegression,
            FittedMethod::LogisticRegression(_) => MethodKind::LogisticRegression,
        }
    }

    pub fn target(&self) -> &ColumnMeta {
        match self {
            FittedMethod::HistogramSampler(t) | FittedMethod::ConditionalDistribution(t) => &t.target,
            FittedMethod::LinearRegression(m) => &m.target,
            FittedMethod::LogisticRegression(m) => &m.target,
        }
    }

    pub fn parents(&self) -> &[ColumnMeta] {
        match self {
            FittedMethod::HistogramSampler(t) | FittedMethod::ConditionalDistribution(t) => &t.parents,
            FittedMethod::LinearRegression(m) => &m.parents,
            FittedMethod::LogisticRegression(m) => &m.parents,
        }
    }

    pub fn parent_names(&self) -> Vec<String> {
        self.parents().iter().map(|p| p.name.clone()).collect()
    }

    /// Draws `n` target values; `parents` are the columns named by `parents()`, in order.
    pub fn sample<R: Rng + ?Sized>(&self, parents: &[&Column], n: usize, rng: &mut R) -> Result<Column> {
        match self {
            FittedMethod::HistogramSampler(t) | FittedMethod::ConditionalDistribution(t) => t.sample(parents, n, rng),
            FittedMethod::LinearRegression(m) => m.sample(parents, n, rng),
            FittedMethod::LogisticRegression(m) => m.sample(parents, n, rng),
        }
    }

    /// Structural checks run after deserialization.
    pub fn validate(&self) -> Result<()> {
        let t = self.target();
        self.kind().check_supports(&t.name, t.ty)?;
        match self {
            FittedMethod::HistogramSampler(t) if !t.parents.is_empty() => Err(Error::MalformedModel(format!(
                "histogram sampler for \"{}\" has parents",
                t.target.name
            ))),
            FittedMethod::HistogramSampler(t) | FittedMethod::ConditionalDistribution(t) => t.validate(),
            FittedMethod::LinearRegression(m) => m.validate(),
            FittedMethod::LogisticRegression(m) => m.validate(),
        }
    }
}

use std::fmt;

use indexmap::IndexMap;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{infer_bounds, Bounds, Column, Schema, Table};
use crate::dependency::{
    infer_chain_with, infer_network_with, kahn_sort, Dependency, InferenceOptions, InferenceStats, VisitOrder,
};
use crate::error::{Error, Result};
use crate::mechanisms::{allocate_budget, BudgetLedger};
use crate::methods::{fit_method, FitColumn, FittedMethod, MethodKind};

use super::spec::{DependencyMode, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WarningKind {
    PrivacyLeak,
    DefaultMethod,
}

/// Non-fatal diagnostic produced by a fit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub kind: WarningKind,
    pub message: String,
    pub column: Option<String>,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

/// A fitted synthesizer: one sampler per column plus the structure tying them together.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub(crate) schema: Schema,
    pub(crate) bounds: Bounds,
    pub(crate) dependency: Dependency,
    pub(crate) methods: IndexMap<String, FittedMethod>,
    pub(crate) ledger: BudgetLedger,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutput {
    pub model: FittedModel,
    pub warnings: Vec<Warning>,
    /// Present when the dependency structure was inferred from the data.
    pub inference: Option<InferenceStats>,
}

fn resolve_bounds(table: &Table, spec: &ModelSpec, warnings: &mut Vec<Warning>) -> Result<Bounds> {
    let given = spec.bounds.clone().unwrap_or_default();
    let schema = table.schema();
    let missing: Vec<&str> = schema.names().filter(|c| given.get(c).is_none()).collect();
    let mut bounds = Bounds::new();
    if missing.is_empty() {
        for name in schema.names() {
            bounds.insert(name, given.require(name)?.clone());
        }
    } else {
        let inferred = infer_bounds(table)?;
        for name in schema.names() {
            let b = given
                .get(name)
                .unwrap_or_else(|| inferred.bounds.get(name).expect("every column inferred"));
            bounds.insert(name, b.clone());
        }
        if spec.epsilon.is_some() {
            warnings.push(Warning {
                kind: WarningKind::PrivacyLeak,
                message: format!(
                    "bounds for {} were read from the data; supply public bounds to keep the guarantee",
                    missing
                        .iter()
                        .map(|c| format!("\"{c}\""))
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
                column: None,
            });
        }
    }
    bounds.check_table(table)?;
    Ok(bounds)
}

/// Fits every column of `table` according to `spec`.
pub fn fit<R: Rng + ?Sized>(table: &Table, spec: &ModelSpec, rng: &mut R) -> Result<FitOutput> {
    let schema = table.schema();
    spec.validate(schema)?;
    let budget = spec.budget()?;
    let names: Vec<String> = schema.names().map(str::to_string).collect();
    let k = names.len();
    let consumes = spec.dependency_consumes(k);
    let allocation = allocate_budget(budget, spec.split.as_ref(), &names, consumes)?;

    let mut warnings = Vec::new();
    let bounds = resolve_bounds(table, spec, &mut warnings)?;

    let kinds: IndexMap<String, MethodKind> = schema
        .columns()
        .iter()
        .map(|def| {
            let (kind, explicit) = spec.method_for(&def.name, def.ty);
            if !explicit {
                warnings.push(Warning {
                    kind: WarningKind::DefaultMethod,
                    message: format!("no method given for \"{}\"; using {kind}", def.name),
                    column: Some(def.name.clone()),
                });
            }
            (def.name.clone(), kind)
        })
        .collect();

    let mut ledger = allocation.ledger();
    let mut inference = None;
    let opts = InferenceOptions {
        n_bins: spec.config.n_bins,
        max_candidates: spec
            .max_candidates
            .unwrap_or(InferenceOptions::default().max_candidates),
    };
    let dependency = match (&spec.visit_order, &spec.prediction_matrix, spec.dependency) {
        (Some(order), _, _) => Dependency::full_prefix(VisitOrder::new(order.clone(), schema)?),
        (_, Some(matrix), _) => Dependency::new(kahn_sort(matrix, schema)?, matrix)?,
        (_, _, Some(DependencyMode::Independent)) => Dependency::independent(VisitOrder::schema_order(schema)),
        (_, _, Some(_)) if k < 2 => Dependency::independent(VisitOrder::schema_order(schema)),
        (_, _, Some(mode)) => {
            let eps = allocation.dependency_epsilon();
            let inf = match mode {
                DependencyMode::Infer { n_parents } => infer_network_with(table, &bounds, eps, n_parents, &opts, rng)?,
                DependencyMode::InferChain => infer_chain_with(table, &bounds, eps, &opts, rng)?,
                DependencyMode::Independent => unreachable!("handled above"),
            };
            if let Some(share) = allocation.dependency_share() {
                if ledger.total_budget().is_some() {
                    let step = share.divide(k - 1);
                    for i in 0..k - 1 {
                        ledger.charge(format!("dependency/select {}", i + 1), &step)?;
                    }
                }
            }
            inference = Some(inf.stats);
            inf.dependency
        }
        (None, None, None) => Dependency::full_prefix(VisitOrder::schema_order(schema)),
    };
    // Samplers that ignore parents must not be recorded as having any.
    let parentless: Vec<String> = kinds
        .iter()
        .filter(|(_, k)| !k.uses_parents())
        .map(|(c, _)| c.clone())
        .collect();
    let dependency = dependency.without_parents_for(&parentless);

    let mut methods = IndexMap::new();
    for name in dependency.visit_order().columns() {
        let idx = schema.require(name)?;
        let def = &schema.columns()[idx];
        let parents = dependency.parents_of(name);
        let mut kind = kinds[name.as_str()];
        // A regression with nothing to regress on is a marginal.
        if parents.is_empty() && kind != MethodKind::ConditionalDistribution {
            kind = MethodKind::HistogramSampler;
        }
        let target = FitColumn {
            name,
            ty: def.ty,
            bounds: bounds.require(name)?,
            values: &table.columns()[idx],
        };
        let parent_cols = parents
            .iter()
            .map(|p| {
                let j = schema.require(p)?;
                Ok(FitColumn {
                    name: p,
                    ty: schema.columns()[j].ty,
                    bounds: bounds.require(p)?,
                    values: &table.columns()[j],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let eps = allocation.column_epsilon(name);
        let fitted = fit_method(kind, &target, &parent_cols, eps, &spec.config, rng)?;
        if let (Some(share), Some(_)) = (allocation.column_share(name), ledger.total_budget()) {
            ledger.charge(format!("method/{name}"), share)?;
        }
        methods.insert(name.clone(), fitted);
    }
    debug_assert!(ledger.is_complete());
    Ok(FitOutput {
        model: FittedModel {
            schema: schema.clone(),
            bounds,
            dependency,
            methods,
            ledger,
        },
        warnings,
        inference,
    })
}

/// Column reads made while generating: for each generated column, the columns its
/// sampler was handed, in visit order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenerationTrace {
    pub reads: Vec<(String, Vec<String>)>,
}

impl FittedModel {
    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn dependency(&self) -> &Dependency {
        &self.dependency
    }

    pub fn methods(&self) -> &IndexMap<String, FittedMethod> {
        &self.methods
    }

    pub fn method(&self, column: &str) -> Option<&FittedMethod> {
        self.methods.get(column)
    }

    pub fn ledger(&self) -> &BudgetLedger {
        &self.ledger
    }

    /// Samples `n` rows, one column at a time in visit order.
    pub fn generate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Table> {
        self.generate_traced(n, rng).map(|(t, _)| t)
    }

    pub fn generate_traced<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<(Table, GenerationTrace)> {
        if n == 0 {
            return Err(Error::InvalidArgument("number of rows must be at least 1".into()));
        }
        let mut done: IndexMap<&str, Column> = IndexMap::new();
        let mut trace = GenerationTrace::default();
        for name in self.dependency.visit_order().columns() {
            let method = self
                .methods
                .get(name)
                .ok_or_else(|| Error::MalformedModel(format!("no method for \"{name}\"")))?;
            let parent_names = method.parent_names();
            let parents = parent_names
                .iter()
                .map(|p| {
                    done.get(p.as_str()).ok_or_else(|| {
                        Error::MalformedModel(format!("\"{name}\" reads \"{p}\" before it is generated"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let column = method.sample(&parents, n, rng)?;
            trace.reads.push((name.clone(), parent_names));
            done.insert(name, column);
        }
        let columns = self
            .schema
            .names()
            .map(|c| done.swap_remove(c).expect("every column generated"))
            .collect();
        Ok((Table::new(self.schema.clone(), columns)?, trace))
    }

    /// Consistency checks between the parts of a model (run on load).
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedModel(m));
        if self.dependency.visit_order().len() != self.schema.len() {
            return bad("visit order does not cover the schema".into());
        }
        VisitOrder::new(self.dependency.visit_order().columns().to_vec(), &self.schema)?;
        if self.methods.len() != self.schema.len() {
            return bad("one method per column is required".into());
        }
        for def in self.schema.columns() {
            let Some(m) = self.methods.get(&def.name) else {
                return bad(format!("no method for \"{}\"", def.name));
            };
            m.validate()?;
            let t = m.target();
            if t.name != def.name || t.ty != def.ty || Some(&t.bounds) != self.bounds.get(&def.name) {
                return bad(format!(
                    "method metadata for \"{}\" disagrees with the schema",
                    def.name
                ));
            }
            if m.parent_names().as_slice() != self.dependency.parents_of(&def.name) {
                return bad(format!("parents of \"{}\" disagree with the dependency", def.name));
            }
            for p in m.parents() {
                if Some(&p.bounds) != self.bounds.get(&p.name) || self.schema.type_of(&p.name)? != p.ty {
                    return bad(format!("parent metadata of \"{}\" is inconsistent", def.name));
                }
            }
        }
        match self.ledger.total_budget() {
            Some(_) if !self.ledger.is_complete() => bad("ledger does not sum to the budget".into()),
            None if !self.ledger.is_empty() => bad("non-private model has ledger entries".into()),
            _ => Ok(()),
        }
    }
}

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::data::Schema;
use crate::error::{Error, Result};

/// Column name → parent (predictor) column names.
pub type PredictionMatrix = IndexMap<String, Vec<String>>;

/// Permutation of the schema's columns defining the autoregressive sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VisitOrder(Vec<String>);

impl VisitOrder {
    pub fn new(order: Vec<String>, schema: &Schema) -> Result<Self> {
        if order.len() != schema.len() {
            return Err(Error::InvalidDependency(format!(
                "visit order has {} columns, schema has {}",
                order.len(),
                schema.len()
            )));
        }
        for (i, c) in order.iter().enumerate() {
            schema.require(c)?;
            if order[..i].contains(c) {
                return Err(Error::InvalidDependency(format!(
                    "column \"{c}\" appears twice in the visit order"
                )));
            }
        }
        Ok(Self(order))
    }

    pub fn schema_order(schema: &Schema) -> Self {
        Self(schema.names().map(str::to_string).collect())
    }

    pub fn columns(&self) -> &[String] {
        &self.0
    }

    pub fn position(&self, column: &str) -> Option<usize> {
        self.0.iter().position(|c| c == column)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Visit order plus the parent set of every column.
///
/// Invariant: the parents of a column all precede it in the visit order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DependencyRepr", into = "DependencyRepr")]
pub struct Dependency {
    visit_order: VisitOrder,
    parents: IndexMap<String, Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct DependencyRepr {
    visit_order: Vec<String>,
    parents: IndexMap<String, Vec<String>>,
}

impl TryFrom<DependencyRepr> for Dependency {
    type Error = Error;

    fn try_from(r: DependencyRepr) -> Result<Self> {
        let mut parents = IndexMap::new();
        for c in &r.visit_order {
            parents.insert(c.clone(), r.parents.get(c).cloned().unwrap_or_default());
        }
        if let Some(extra) = r.parents.keys().find(|k| !r.visit_order.contains(k)) {
            return Err(Error::UnknownColumn(extra.clone()));
        }
        let d = Dependency {
            visit_order: VisitOrder(r.visit_order),
            parents,
        };
        d.check()?;
        Ok(d)
    }
}

impl From<Dependency> for DependencyRepr {
    fn from(d: Dependency) -> Self {
        DependencyRepr {
            visit_order: d.visit_order.0,
            parents: d.parents,
        }
    }
}

impl Dependency {
    /// Builds a dependency; columns missing from `parents` are parentless.
    pub fn new(visit_order: VisitOrder, parents: &PredictionMatrix) -> Result<Self> {
        for k in parents.keys() {
            if visit_order.position(k).is_none() {
                return Err(Error::UnknownColumn(k.clone()));
            }
        }
        let parents = visit_order
            .columns()
            .iter()
            .map(|c| (c.clone(), parents.get(c).cloned().unwrap_or_default()))
            .collect();
        let d = Self { visit_order, parents };
        d.check()?;
        Ok(d)
    }

    /// Every column conditioned on all columns visited before it.
    pub fn full_prefix(visit_order: VisitOrder) -> Self {
        let cols = visit_order.columns();
        let parents = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), cols[..i].to_vec()))
            .collect();
        Self { visit_order, parents }
    }

    pub fn independent(visit_order: VisitOrder) -> Self {
        let parents = visit_order.columns().iter().map(|c| (c.clone(), Vec::new())).collect();
        Self { visit_order, parents }
    }

    fn check(&self) -> Result<()> {
        for (pos, c) in self.visit_order.columns().iter().enumerate() {
            let ps = &self.parents[c];
            for (j, p) in ps.iter().enumerate() {
                match self.visit_order.position(p) {
                    None => return Err(Error::UnknownColumn(p.clone())),
                    Some(pp) if pp >= pos => {
                        return Err(Error::InvalidDependency(format!(
                            "parent \"{p}\" of \"{c}\" is not visited before it"
                        )))
                    }
                    Some(_) => {}
                }
                if ps[..j].contains(p) {
                    return Err(Error::InvalidDependency(format!(
                        "parent \"{p}\" listed twice for \"{c}\""
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn visit_order(&self) -> &VisitOrder {
        &self.visit_order
    }

    pub fn parents_of(&self, column: &str) -> &[String] {
        self.parents.get(column).map_or(&[], Vec::as_slice)
    }

    pub fn parents(&self) -> &IndexMap<String, Vec<String>> {
        &self.parents
    }

    /// Copy with the given columns made parentless.
    pub fn without_parents_for(&self, columns: &[String]) -> Self {
        let mut d = self.clone();
        for c in columns {
            if let Some(ps) = d.parents.get_mut(c) {
                ps.clear();
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ColumnType;

    fn schema() -> Schema {
        Schema::from_pairs([
            ("a", ColumnType::Float),
            ("b", ColumnType::Float),
            ("c", ColumnType::Category),
        ])
        .unwrap()
    }

    fn order(cols: &[&str]) -> VisitOrder {
        VisitOrder::new(cols.iter().map(|s| s.to_string()).collect(), &schema()).unwrap()
    }

    #[test]
    fn visit_order_must_be_permutation() {
        assert!(VisitOrder::new(vec!["a".into(), "a".into(), "b".into()], &schema()).is_err());
        assert!(VisitOrder::new(vec!["a".into(), "b".into()], &schema()).is_err());
        assert!(VisitOrder::new(vec!["a".into(), "b".into(), "z".into()], &schema()).is_err());
    }

    #[test]
    fn parents_must_precede() {
        let m: PredictionMatrix = [("a".to_string(), vec!["b".to_string()])].into_iter().collect();
        assert!(Dependency::new(order(&["a", "b", "c"]), &m).is_err());
        assert!(Dependency::new(order(&["b", "a", "c"]), &m).is_ok());
    }

    #[test]
    fn full_prefix_shape() {
        let d = Dependency::full_prefix(order(&["c", "a", "b"]));
        assert!(d.parents_of("c").is_empty());
        assert_eq!(d.parents_of("b"), &["c".to_string(), "a".to_string()]);
    }

    #[test]
    fn serde_shape() {
        let d = Dependency::full_prefix(order(&["a", "b", "c"]));
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["visit_order"], serde_json::json!(["a", "b", "c"]));
        assert_eq!(v["parents"]["c"], serde_json::json!(["a", "b"]));
        let back: Dependency = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
        let bad = serde_json::json!({"visit_order": ["a", "b"], "parents": {"a": ["b"]}});
        assert!(serde_json::from_value::<Dependency>(bad).is_err());
    }
}

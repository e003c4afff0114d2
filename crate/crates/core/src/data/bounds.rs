use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::table::{Column, Table};
use crate::error::{Error, Result};

/// Domain of one column: a numeric range or the ordered category list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnBounds {
    Numeric { min: f64, max: f64 },
    Categorical { categories: Vec<String> },
}

impl ColumnBounds {
    pub fn numeric(column: &str, min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::InvalidBounds {
                column: column.to_string(),
                message: format!("need finite min < max, got ({min}, {max})"),
            });
        }
        Ok(ColumnBounds::Numeric { min, max })
    }

    pub fn categorical(column: &str, categories: Vec<String>) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::InvalidBounds {
                column: column.to_string(),
                message: "category list is empty".into(),
            });
        }
        for (i, c) in categories.iter().enumerate() {
            if categories[..i].contains(c) {
                return Err(Error::InvalidBounds {
                    column: column.to_string(),
                    message: format!("duplicate category \"{c}\""),
                });
            }
        }
        Ok(ColumnBounds::Categorical { categories })
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ColumnBounds::Numeric { .. })
    }

    pub fn categories(&self) -> Option<&[String]> {
        match self {
            ColumnBounds::Categorical { categories } => Some(categories),
            ColumnBounds::Numeric { .. } => None,
        }
    }

    pub fn range(&self) -> Option<(f64, f64)> {
        match self {
            ColumnBounds::Numeric { min, max } => Some((*min, *max)),
            ColumnBounds::Categorical { .. } => None,
        }
    }

    /// Checks that every value of `column` lies inside these bounds.
    pub fn check(&self, name: &str, column: &Column) -> Result<()> {
        match (self, column) {
            (ColumnBounds::Numeric { min, max }, Column::Numeric(values)) => {
                match values.iter().find(|v| !(**v >= *min && **v <= *max)) {
                    Some(v) => Err(Error::OutOfBounds {
                        column: name.to_string(),
                        value: v.to_string(),
                    }),
                    None => Ok(()),
                }
            }
            (ColumnBounds::Categorical { categories }, Column::Categorical(values)) => {
                match values.iter().find(|v| !categories.contains(v)) {
                    Some(v) => Err(Error::OutOfBounds {
                        column: name.to_string(),
                        value: format!("\"{v}\""),
                    }),
                    None => Ok(()),
                }
            }
            _ => Err(Error::InvalidBounds {
                column: name.to_string(),
                message: "bounds family does not match the column type".into(),
            }),
        }
    }
}

/// Per-column bounds keyed by column name. May cover only part of a schema.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bounds {
    columns: IndexMap<String, ColumnBounds>,
}

impl Bounds {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, bounds: ColumnBounds) {
        self.columns.insert(name.to_string(), bounds);
    }

    pub fn with(mut self, name: &str, bounds: ColumnBounds) -> Self {
        self.insert(name, bounds);
        self
    }

    pub fn get(&self, name: &str) -> Option<&ColumnBounds> {
        self.columns.get(name)
    }

    pub fn require(&self, name: &str) -> Result<&ColumnBounds> {
        self.get(name).ok_or_else(|| Error::InvalidBounds {
            column: name.to_string(),
            message: "no bounds available".into(),
        })
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ColumnBounds)> {
        self.columns.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Checks the whole table against these bounds and that every column is covered.
    pub fn check_table(&self, table: &Table) -> Result<()> {
        for (def, column) in table.schema().columns().iter().zip(table.columns()) {
            self.require(&def.name)?.check(&def.name, column)?;
        }
        Ok(())
    }
}

/// Result of [`infer_bounds`]. `degenerate` lists constant numerical columns whose range was widened.
#[derive(Debug, Clone, PartialEq)]
pub struct InferredBounds {
    pub bounds: Bounds,
    pub degenerate: Vec<String>,
}

/// Reads bounds off the data itself: observed numeric range and sorted distinct labels.
///
/// This looks at private data. Callers that run with a privacy budget must surface
/// a privacy-leak warning when they rely on it.
pub fn infer_bounds(table: &Table) -> Result<InferredBounds> {
    if table.n_rows() == 0 {
        return Err(Error::EmptyTable);
    }
    let mut bounds = Bounds::new();
    let mut degenerate = Vec::new();
    for (def, column) in table.schema().columns().iter().zip(table.columns()) {
        let b = match column {
            Column::Numeric(values) => {
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if lo == hi {
                    log::warn!(
                        "column \"{}\" is constant ({lo}); widening its bounds by 0.5 on each side",
                        def.name
                    );
                    degenerate.push(def.name.clone());
                    ColumnBounds::numeric(&def.name, lo - 0.5, hi + 0.5)?
                } else {
                    ColumnBounds::numeric(&def.name, lo, hi)?
                }
            }
            Column::Categorical(values) => {
                let mut cats: Vec<String> = values.to_vec();
                cats.sort();
                cats.dedup();
                ColumnBounds::categorical(&def.name, cats)?
            }
        };
        bounds.insert(&def.name, b);
    }
    Ok(InferredBounds { bounds, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ColumnType, Schema};

    fn table(cols: Vec<(&str, ColumnType, Column)>) -> Table {
        let schema = Schema::from_pairs(cols.iter().map(|(n, t, _)| (*n, *t))).unwrap();
        Table::new(schema, cols.into_iter().map(|(_, _, c)| c).collect()).unwrap()
    }

    #[test]
    fn numeric_range_observed() {
        let t = table(vec![("x", ColumnType::Integer, Column::Numeric(vec![1.0, 5.0, 3.0]))]);
        let inf = infer_bounds(&t).unwrap();
        assert_eq!(inf.bounds.get("x").unwrap().range(), Some((1.0, 5.0)));
        assert!(inf.degenerate.is_empty());
    }

    #[test]
    fn categories_sorted_distinct() {
        let t = table(vec![(
            "c",
            ColumnType::Category,
            Column::Categorical(vec!["b".into(), "a".into(), "b".into()]),
        )]);
        let inf = infer_bounds(&t).unwrap();
        assert_eq!(
            inf.bounds.get("c").unwrap().categories().unwrap(),
            &["a".to_string(), "b".to_string()]
        );
    }

    #[test]
    fn constant_column_widened_and_flagged() {
        let t = table(vec![("k", ColumnType::Integer, Column::Numeric(vec![4.0, 4.0]))]);
        let inf = infer_bounds(&t).unwrap();
        assert_eq!(inf.bounds.get("k").unwrap().range(), Some((3.5, 4.5)));
        assert_eq!(inf.degenerate, vec!["k".to_string()]);
    }

    #[test]
    fn invalid_bounds_rejected() {
        assert!(ColumnBounds::numeric("x", 1.0, 1.0).is_err());
        assert!(ColumnBounds::numeric("x", f64::NAN, 1.0).is_err());
        assert!(ColumnBounds::categorical("c", vec![]).is_err());
        assert!(ColumnBounds::categorical("c", vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn check_reports_offending_column() {
        let b = ColumnBounds::numeric("x", 0.0, 1.0).unwrap();
        let err = b.check("x", &Column::Numeric(vec![0.5, 2.0])).unwrap_err();
        assert!(matches!(err, Error::OutOfBounds { ref column, .. } if column == "x"));
    }
}

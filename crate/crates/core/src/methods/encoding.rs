use serde::{Deserialize, Serialize};

use crate::data::{Column, ColumnBounds, ColumnType, Discretizer};
use crate::error::{Error, Result};

/// Name, type and domain of a column, as stored inside a fitted method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ColumnType,
    pub bounds: ColumnBounds,
}

impl ColumnMeta {
    pub fn discretizer(&self, n_bins: usize) -> Result<Discretizer> {
        Discretizer::new(&self.name, self.ty, &self.bounds, n_bins)
    }
}

/// Borrowed view of one column's values plus its metadata, used at fit time.
#[derive(Debug, Clone, Copy)]
pub struct FitColumn<'a> {
    pub name: &'a str,
    pub ty: ColumnType,
    pub bounds: &'a ColumnBounds,
    pub values: &'a Column,
}

impl FitColumn<'_> {
    pub fn meta(&self) -> ColumnMeta {
        ColumnMeta {
            name: self.name.to_string(),
            ty: self.ty,
            bounds: self.bounds.clone(),
        }
    }
}

/// Encodes parent values as unit-box features: numerical columns min-max rescaled by
/// their bounds, categorical columns one-hot over their bound categories.
#[derive(Debug, Clone)]
pub(crate) struct FeatureEncoder {
    parts: Vec<Part>,
    width: usize,
}

#[derive(Debug, Clone)]
enum Part {
    Numeric { min: f64, span: f64 },
    OneHot(Discretizer),
}

impl FeatureEncoder {
    pub fn new(parents: &[ColumnMeta]) -> Result<Self> {
        let mut parts = Vec::with_capacity(parents.len());
        let mut width = 0;
        for p in parents {
            match &p.bounds {
                ColumnBounds::Numeric { min, max } => {
                    parts.push(Part::Numeric {
                        min: *min,
                        span: max - min,
                    });
                    width += 1;
                }
                ColumnBounds::Categorical { categories } => {
                    width += categories.len();
                    parts.push(Part::OneHot(p.discretizer(1)?));
                }
            }
        }
        Ok(Self { parts, width })
    }

    /// Number of features, excluding the intercept.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Writes row `r` of `columns` into `out` (length `width()`).
    pub fn encode(&self, columns: &[&Column], r: usize, out: &mut [f64]) -> Result<()> {
        let mut at = 0;
        for (part, col) in self.parts.iter().zip(columns) {
            match (part, col) {
                (Part::Numeric { min, span }, Column::Numeric(v)) => {
                    out[at] = ((v[r] - min) / span).clamp(0.0, 1.0);
                    at += 1;
                }
                (Part::OneHot(d), Column::Categorical(v)) => {
                    let k = d.n_bins();
                    out[at..at + k].iter_mut().for_each(|x| *x = 0.0);
                    out[at + d.bin_of_label(&v[r])? as usize] = 1.0;
                    at += k;
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "parent column does not match its metadata".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn check_lengths(target: &FitColumn<'_>, parents: &[FitColumn<'_>]) -> Result<usize> {
    let n = target.values.len();
    if let Some(p) = parents.iter().find(|p| p.values.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "parent \"{}\" has {} rows, target \"{}\" has {n}",
            p.name,
            p.values.len(),
            target.name
        )));
    }
    if n == 0 {
        return Err(Error::EmptyTable);
    }
    Ok(n)
}

pub(crate) fn check_parent_columns(parents: &[ColumnMeta], columns: &[&Column], n: usize) -> Result<()> {
    if parents.len() != columns.len() {
        return Err(Error::InvalidArgument(format!(
            "sampler expects {} parent columns, got {}",
            parents.len(),
            columns.len()
        )));
    }
    if let Some((m, _)) = parents.iter().zip(columns).find(|(_, c)| c.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "parent column \"{}\" has the wrong length",
            m.name
        )));
    }
    Ok(())
}

/// Converts a continuous draw in column units to the column type and clamps it to bounds.
pub(crate) fn finish_numeric(v: f64, ty: ColumnType, min: f64, max: f64) -> f64 {
    let v = v.clamp(min, max);
    if ty.is_integral() {
        v.round().clamp(min.ceil(), max.floor())
    } else {
        v
    }
}

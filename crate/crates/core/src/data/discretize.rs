use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bounds::ColumnBounds;
use super::schema::ColumnType;
use super::table::Column;
use crate::error::{Error, Result};

/// Bin count used for uniform binning of numerical columns unless configured otherwise.
pub const DEFAULT_BINS: usize = 20;

/// A single cell value produced during generation.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Numeric(f64),
    Label(String),
}

/// Bin edges of a numerical column or the category list of a categorical one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BinEdges {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl BinEdges {
    pub fn n_bins(&self) -> usize {
        match self {
            BinEdges::Numeric(e) => e.len() - 1,
            BinEdges::Categorical(c) => c.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedColumn {
    pub bins: Vec<u32>,
    pub edges: BinEdges,
}

impl DiscretizedColumn {
    pub fn n_bins(&self) -> usize {
        self.edges.n_bins()
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

fn uniform_edges(min: f64, max: f64, n_bins: usize) -> Vec<f64> {
    let width = max - min;
    let mut edges: Vec<f64> = (0..n_bins)
        .map(|i| min + width * (i as f64) / (n_bins as f64))
        .collect();
    edges.push(max);
    edges
}

/// Maps a column's values to bin ids and back, for a fixed type, bounds and bin count.
#[derive(Debug, Clone)]
pub struct Discretizer {
    column: String,
    ty: ColumnType,
    edges: BinEdges,
    index: HashMap<String, u32>,
}

impl Discretizer {
    pub fn new(column: &str, ty: ColumnType, bounds: &ColumnBounds, n_bins: usize) -> Result<Self> {
        let edges = match (ty.is_numerical(), bounds) {
            (true, ColumnBounds::Numeric { min, max }) => {
                if n_bins == 0 {
                    return Err(Error::InvalidArgument("n_bins must be positive".into()));
                }
                if ty.is_integral() && min.ceil() > max.floor() {
                    return Err(Error::InvalidBounds {
                        column: column.to_string(),
                        message: format!("range ({min}, {max}) holds no integer"),
                    });
                }
                BinEdges::Numeric(uniform_edges(*min, *max, n_bins))
            }
            (false, ColumnBounds::Categorical { categories }) => BinEdges::Categorical(categories.clone()),
            _ => {
                return Err(Error::InvalidBounds {
                    column: column.to_string(),
                    message: format!("bounds do not fit a {ty} column"),
                })
            }
        };
        let index = match &edges {
            BinEdges::Categorical(c) => c.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect(),
            BinEdges::Numeric(_) => HashMap::new(),
        };
        Ok(Self {
            column: column.to_string(),
            ty,
            edges,
            index,
        })
    }

    pub fn column(&self) -> &str {
        &self.column
    }

    pub fn column_type(&self) -> ColumnType {
        self.ty
    }

    pub fn edges(&self) -> &BinEdges {
        &self.edges
    }

    pub fn n_bins(&self) -> usize {
        self.edges.n_bins()
    }

    pub fn bin_of_numeric(&self, v: f64) -> Result<u32> {
        let BinEdges::Numeric(edges) = &self.edges else {
            return Err(Error::InvalidArgument(format!(
                "column \"{}\" is categorical",
                self.column
            )));
        };
        let n = edges.len() - 1;
        let (min, max) = (edges[0], edges[n]);
        if !(v >= min && v <= max) {
            return Err(Error::OutOfBounds {
                column: self.column.clone(),
                value: v.to_string(),
            });
        }
        let width = (max - min) / n as f64;
        let mut b = (((v - min) / width).floor() as i64).clamp(0, n as i64 - 1) as usize;
        // Resolve rounding against the stored edges so that bins are exactly [e_i, e_{i+1}).
        while b > 0 && v < edges[b] {
            b -= 1;
        }
        while b + 1 < n && v >= edges[b + 1] {
            b += 1;
        }
        Ok(b as u32)
    }

    pub fn bin_of_label(&self, label: &str) -> Result<u32> {
        self.index.get(label).copied().ok_or_else(|| Error::OutOfBounds {
            column: self.column.clone(),
            value: format!("\"{label}\""),
        })
    }

    pub fn discretize(&self, column: &Column) -> Result<DiscretizedColumn> {
        let bins = match column {
            Column::Numeric(v) => v.iter().map(|&x| self.bin_of_numeric(x)).collect::<Result<Vec<_>>>()?,
            Column::Categorical(v) => v.iter().map(|s| self.bin_of_label(s)).collect::<Result<Vec<_>>>()?,
        };
        Ok(DiscretizedColumn {
            bins,
            edges: self.edges.clone(),
        })
    }

    /// Draws a representative value of `bin`.
    pub fn undiscretize<R: Rng + ?Sized>(&self, bin: u32, rng: &mut R) -> Result<Value> {
        undiscretize(bin, &self.edges, self.ty, rng)
    }

    pub fn undiscretize_numeric<R: Rng + ?Sized>(&self, bin: u32, rng: &mut R) -> f64 {
        match &self.edges {
            BinEdges::Numeric(edges) => draw_numeric(bin as usize, edges, self.ty, rng),
            BinEdges::Categorical(_) => f64::NAN,
        }
    }
}

/// Discretizes `values` with uniform bins over `bounds` (numerical) or category indices.
pub fn discretize(
    column: &str,
    ty: ColumnType,
    values: &Column,
    bounds: &ColumnBounds,
    n_bins: usize,
) -> Result<DiscretizedColumn> {
    Discretizer::new(column, ty, bounds, n_bins)?.discretize(values)
}

/// Inverse of [`discretize`]: a uniform draw inside the bin, converted to the column type.
///
/// Integral types draw uniformly among the integers the bin holds (the top bin includes
/// the upper bound). A bin narrower than one unit that holds no integer falls back to
/// rounding a continuous draw down, clamped to the bounds.
pub fn undiscretize<R: Rng + ?Sized>(bin: u32, edges: &BinEdges, ty: ColumnType, rng: &mut R) -> Result<Value> {
    let i = bin as usize;
    if i >= edges.n_bins() {
        return Err(Error::InvalidArgument(format!(
            "bin {bin} out of range 0..{}",
            edges.n_bins()
        )));
    }
    Ok(match edges {
        BinEdges::Categorical(c) => Value::Label(c[i].clone()),
        BinEdges::Numeric(e) => Value::Numeric(draw_numeric(i, e, ty, rng)),
    })
}

fn draw_numeric<R: Rng + ?Sized>(i: usize, edges: &[f64], ty: ColumnType, rng: &mut R) -> f64 {
    let n = edges.len() - 1;
    let (lo, hi) = (edges[i], edges[i + 1]);
    let last = i + 1 == n;
    if ty.is_integral() {
        let k_lo = lo.ceil();
        let k_hi = if last { hi.floor() } else { hi.ceil() - 1.0 };
        if k_lo <= k_hi {
            let a = k_lo as i64;
            let b = k_hi as i64;
            return rng.random_range(a..=b) as f64;
        }
        let v: f64 = lo + rng.random::<f64>() * (hi - lo);
        return v.floor().clamp(edges[0].ceil(), edges[n].floor());
    }
    let v = lo + rng.random::<f64>() * (hi - lo);
    if v >= hi && !last {
        lo
    } else {
        v.min(hi)
    }
}

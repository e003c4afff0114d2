//! Typed tabular data: schema, bounds, CSV ingestion and uniform binning.

mod bounds;
mod discretize;
mod schema;
mod table;

pub use bounds::{infer_bounds, Bounds, ColumnBounds, InferredBounds};
pub use discretize::{discretize, undiscretize, BinEdges, DiscretizedColumn, Discretizer, Value, DEFAULT_BINS};
pub use schema::{format_datetime, parse_datetime, ColumnDef, ColumnType, Schema, SchemaFile};
pub use table::{Column, Table};

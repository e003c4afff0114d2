use std::io::{Read, Write};
use std::path::Path;

use super::schema::{ColumnType, Schema};
use crate::error::{Error, Result};

/// Values of one column. Numerical types share the `f64` representation
/// (datetimes as epoch seconds, timedeltas as seconds); categorical values keep their labels.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match self {
            Column::Numeric(v) => Some(v),
            Column::Categorical(_) => None,
        }
    }

    pub fn as_categorical(&self) -> Option<&[String]> {
        match self {
            Column::Categorical(v) => Some(v),
            Column::Numeric(_) => None,
        }
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r]).collect()),
            Column::Categorical(v) => Column::Categorical(rows.iter().map(|&r| v[r].clone()).collect()),
        }
    }

    fn matches(&self, ty: ColumnType) -> bool {
        match self {
            Column::Numeric(_) => ty.is_numerical(),
            Column::Categorical(_) => ty.is_categorical(),
        }
    }
}

/// Columnar table conforming to a schema. All columns share one length.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    schema: Schema,
    columns: Vec<Column>,
}

impl Table {
    pub fn new(schema: Schema, columns: Vec<Column>) -> Result<Self> {
        if columns.len() != schema.len() {
            return Err(Error::InvalidSchema(format!(
                "schema has {} columns but {} were given",
                schema.len(),
                columns.len()
            )));
        }
        let n = columns.first().map_or(0, Column::len);
        for (def, col) in schema.columns().iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::InvalidSchema(format!(
                    "column \"{}\" has {} rows, expected {n}",
                    def.name,
                    col.len()
                )));
            }
            if !col.matches(def.ty) {
                return Err(Error::InvalidSchema(format!(
                    "column \"{}\" values do not match declared type {}",
                    def.name, def.ty
                )));
            }
            if let Column::Numeric(v) = col {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidSchema(format!(
                        "column \"{}\" contains a non-finite value",
                        def.name
                    )));
                }
            }
        }
        Ok(Self { schema, columns })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.schema.index_of(name).map(|i| &self.columns[i])
    }

    pub fn require(&self, name: &str) -> Result<&Column> {
        self.column(name).ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// New table holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Table {
        Table {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
        }
    }

    pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Table> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(file, schema)
    }

    /// Parses UTF-8 CSV with a mandatory header matching `schema` names and order.
    pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<Table> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let expected: Vec<&str> = schema.names().collect();
        if header != expected {
            return Err(Error::HeaderMismatch {
                expected: expected.join(","),
                found: header.join(","),
            });
        }
        let mut columns: Vec<Column> = schema
            .columns()
            .iter()
            .map(|c| {
                if c.ty.is_numerical() {
                    Column::Numeric(Vec::new())
                } else {
                    Column::Categorical(Vec::new())
                }
            })
            .collect();
        for (i, record) in rdr.records().enumerate() {
            let row = i + 1;
            let record = record?;
            for ((def, column), raw) in schema.columns().iter().zip(&mut columns).zip(record.iter()) {
                if raw.trim().is_empty() {
                    return Err(Error::MissingValue {
                        row,
                        column: def.name.clone(),
                    });
                }
                let parse_err = |message: String| Error::Parse {
                    row,
                    column: def.name.clone(),
                    message,
                };
                match column {
                    Column::Numeric(v) => v.push(def.ty.parse_numeric(raw).map_err(parse_err)?),
                    Column::Categorical(v) => v.push(def.ty.parse_label(raw).map_err(parse_err)?),
                }
            }
        }
        let table = Table::new(schema.clone(), columns)?;
        if table.n_rows() == 0 {
            return Err(Error::EmptyTable);
        }
        Ok(table)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new()
            .quote_style(csv::QuoteStyle::Necessary)
            .from_writer(writer);
        wtr.write_record(self.schema.names())?;
        let mut record: Vec<String> = Vec::with_capacity(self.columns.len());
        for r in 0..self.n_rows() {
            record.clear();
            for (def, col) in self.schema.columns().iter().zip(&self.columns) {
                record.push(match col {
                    Column::Numeric(v) => def.ty.format_numeric(v[r]),
                    Column::Categorical(v) => v[r].clone(),
                });
            }
            wtr.write_record(&record)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

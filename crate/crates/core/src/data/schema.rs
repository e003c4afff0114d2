use std::fmt;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use serde_json::Value as JsonValue;

use super::bounds::{Bounds, ColumnBounds};
use crate::error::{Error, Result};

/// Declared type of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Float,
    Integer,
    Datetime,
    Timedelta,
    Category,
    Boolean,
}

impl ColumnType {
    pub const ALL: [ColumnType; 6] = [
        ColumnType::Float,
        ColumnType::Integer,
        ColumnType::Datetime,
        ColumnType::Timedelta,
        ColumnType::Category,
        ColumnType::Boolean,
    ];

    pub fn is_numerical(self) -> bool {
        matches!(
            self,
            ColumnType::Float | ColumnType::Integer | ColumnType::Datetime | ColumnType::Timedelta
        )
    }

    pub fn is_categorical(self) -> bool {
        !self.is_numerical()
    }

    /// Integer-valued numerical types: integers, datetimes (epoch seconds) and timedeltas (seconds).
    pub fn is_integral(self) -> bool {
        matches!(self, ColumnType::Integer | ColumnType::Datetime | ColumnType::Timedelta)
    }

    pub fn name(self) -> &'static str {
        match self {
            ColumnType::Float => "float",
            ColumnType::Integer => "integer",
            ColumnType::Datetime => "datetime",
            ColumnType::Timedelta => "timedelta",
            ColumnType::Category => "category",
            ColumnType::Boolean => "boolean",
        }
    }

    /// Parses a numerical cell into its internal representation.
    pub fn parse_numeric(self, raw: &str) -> std::result::Result<f64, String> {
        let raw = raw.trim();
        match self {
            ColumnType::Float => {
                let v: f64 = raw.parse().map_err(|_| format!("\"{raw}\" is not a float"))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(format!("\"{raw}\" is not finite"))
                }
            }
            ColumnType::Integer | ColumnType::Timedelta => raw
                .parse::<i64>()
                .map(|v| v as f64)
                .map_err(|_| format!("\"{raw}\" is not an integer")),
            ColumnType::Datetime => parse_datetime(raw).map(|s| s as f64),
            ColumnType::Category | ColumnType::Boolean => Err(format!("{} column is not numerical", self.name())),
        }
    }

    pub fn format_numeric(self, v: f64) -> String {
        match self {
            ColumnType::Float => format!("{v}"),
            ColumnType::Integer | ColumnType::Timedelta => format!("{}", v as i64),
            ColumnType::Datetime => format_datetime(v as i64),
            ColumnType::Category | ColumnType::Boolean => format!("{v}"),
        }
    }

    /// Normalizes a categorical cell. Booleans accept `true`/`false` in any case.
    pub fn parse_label(self, raw: &str) -> std::result::Result<String, String> {
        match self {
            ColumnType::Boolean => match raw.trim().to_ascii_lowercase().as_str() {
                "true" => Ok("true".to_string()),
                "false" => Ok("false".to_string()),
                _ => Err(format!("\"{raw}\" is not a boolean")),
            },
            _ => Ok(raw.to_string()),
        }
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Seconds since the Unix epoch from an ISO-8601 date or datetime.
pub fn parse_datetime(raw: &str) -> std::result::Result<i64, String> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Ok(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Ok(dt.and_utc().timestamp());
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).expect("midnight").and_utc().timestamp());
    }
    Err(format!("\"{raw}\" is not an ISO-8601 datetime"))
}

pub fn format_datetime(secs: i64) -> String {
    match DateTime::from_timestamp(secs, 0) {
        Some(dt) => dt.naive_utc().format("%Y-%m-%dT%H:%M:%S").to_string(),
        None => secs.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDef {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ColumnType,
}

/// Ordered, uniquely named columns. Order is the default tie-break everywhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ColumnDef>", into = "Vec<ColumnDef>")]
pub struct Schema {
    columns: Vec<ColumnDef>,
}

impl Schema {
    pub fn new(columns: Vec<ColumnDef>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidSchema("schema has no columns".into()));
        }
        for (i, c) in columns.iter().enumerate() {
            if c.name.is_empty() {
                return Err(Error::InvalidSchema(format!("column {i} has an empty name")));
            }
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::InvalidSchema(format!("duplicate column name \"{}\"", c.name)));
            }
        }
        Ok(Self { columns })
    }

    /// Convenience constructor from `(name, type)` pairs.
    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, ColumnType)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(name, ty)| ColumnDef { name: name.into(), ty })
                .collect(),
        )
    }

    pub fn columns(&self) -> &[ColumnDef] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&ColumnDef> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn type_of(&self, name: &str) -> Result<ColumnType> {
        self.column(name)
            .map(|c| c.ty)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }
}

impl TryFrom<Vec<ColumnDef>> for Schema {
    type Error = Error;

    fn try_from(columns: Vec<ColumnDef>) -> Result<Self> {
        Schema::new(columns)
    }
}

impl From<Schema> for Vec<ColumnDef> {
    fn from(s: Schema) -> Self {
        s.columns
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SchemaFileEntry {
    name: String,
    #[serde(rename = "type")]
    ty: ColumnType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min: Option<JsonValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max: Option<JsonValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    categories: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SchemaFileDoc {
    columns: Vec<SchemaFileEntry>,
}

/// Schema and (possibly partial) bounds read from a schema/bounds JSON document.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaFile {
    pub schema: Schema,
    pub bounds: Bounds,
}

impl SchemaFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SchemaFileDoc = serde_json::from_str(text)?;
        let schema = Schema::new(
            doc.columns
                .iter()
                .map(|e| ColumnDef {
                    name: e.name.clone(),
                    ty: e.ty,
                })
                .collect(),
        )?;
        let mut bounds = Bounds::default();
        for e in &doc.columns {
            if e.ty.is_numerical() {
                if e.categories.is_some() {
                    return Err(Error::InvalidBounds {
                        column: e.name.clone(),
                        message: "numerical column cannot list categories".into(),
                    });
                }
                match (&e.min, &e.max) {
                    (Some(lo), Some(hi)) => {
                        let lo = json_to_numeric(e.ty, lo, &e.name)?;
                        let hi = json_to_numeric(e.ty, hi, &e.name)?;
                        bounds.insert(&e.name, ColumnBounds::numeric(&e.name, lo, hi)?);
                    }
                    (None, None) => {}
                    _ => {
                        return Err(Error::InvalidBounds {
                            column: e.name.clone(),
                            message: "both min and max are required".into(),
                        })
                    }
                }
            } else {
                if e.min.is_some() || e.max.is_some() {
                    return Err(Error::InvalidBounds {
                        column: e.name.clone(),
                        message: "categorical column cannot have min/max".into(),
                    });
                }
                if let Some(cats) = &e.categories {
                    let cats = cats
                        .iter()
                        .map(|c| e.ty.parse_label(c))
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|m| Error::InvalidBounds {
                            column: e.name.clone(),
                            message: m,
                        })?;
                    bounds.insert(&e.name, ColumnBounds::categorical(&e.name, cats)?);
                }
            }
        }
        Ok(Self { schema, bounds })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let columns = self
            .schema
            .columns()
            .iter()
            .map(|c| {
                let mut entry = SchemaFileEntry {
                    name: c.name.clone(),
                    ty: c.ty,
                    min: None,
                    max: None,
                    categories: None,
                };
                match self.bounds.get(&c.name) {
                    Some(ColumnBounds::Numeric { min, max }) => {
                        entry.min = Some(numeric_to_json(c.ty, *min));
                        entry.max = Some(numeric_to_json(c.ty, *max));
                    }
                    Some(ColumnBounds::Categorical { categories }) => {
                        entry.categories = Some(categories.clone());
                    }
                    None => {}
                }
                entry
            })
            .collect();
        Ok(serde_json::to_string_pretty(&SchemaFileDoc { columns })?)
    }
}

fn json_to_numeric(ty: ColumnType, v: &JsonValue, column: &str) -> Result<f64> {
    let err = |m: String| Error::InvalidBounds {
        column: column.to_string(),
        message: m,
    };
    match v {
        JsonValue::Number(n) => n.as_f64().ok_or_else(|| err(format!("{n} is not representable"))),
        JsonValue::String(s) => ty.parse_numeric(s).map_err(err),
        other => Err(err(format!("unexpected bound value {other}"))),
    }
}

fn numeric_to_json(ty: ColumnType, v: f64) -> JsonValue {
    match ty {
        ColumnType::Datetime => JsonValue::String(format_datetime(v as i64)),
        ColumnType::Integer | ColumnType::Timedelta => JsonValue::from(v as i64),
        _ => JsonValue::from(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_partition_types() {
        for ty in ColumnType::ALL {
            assert_ne!(ty.is_numerical(), ty.is_categorical());
        }
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = Schema::from_pairs([("a", ColumnType::Float), ("a", ColumnType::Integer)]);
        assert!(matches!(err, Err(Error::InvalidSchema(_))));
    }

    #[test]
    fn datetime_round_trip() {
        let s = parse_datetime("2021-03-04T05:06:07").unwrap();
        assert_eq!(format_datetime(s), "2021-03-04T05:06:07");
        assert_eq!(parse_datetime("1970-01-02").unwrap(), 86_400);
        assert_eq!(parse_datetime("1970-01-01T00:00:10Z").unwrap(), 10);
    }

    #[test]
    fn schema_file_with_bounds() {
        let text = r#"{"columns":[
            {"name":"age","type":"integer","min":17,"max":90},
            {"name":"when","type":"datetime","min":"2020-01-01","max":"2020-12-31T00:00:00"},
            {"name":"sex","type":"category","categories":["F","M"]},
            {"name":"flag","type":"boolean"}
        ]}"#;
        let f = SchemaFile::from_json(text).unwrap();
        assert_eq!(f.schema.len(), 4);
        assert_eq!(
            f.bounds.get("age"),
            Some(&ColumnBounds::Numeric { min: 17.0, max: 90.0 })
        );
        assert!(f.bounds.get("flag").is_none());
        let again = SchemaFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn schema_file_rejects_half_bounds() {
        let text = r#"{"columns":[{"name":"x","type":"float","min":0}]}"#;
        assert!(matches!(SchemaFile::from_json(text), Err(Error::InvalidBounds { .. })));
    }
}

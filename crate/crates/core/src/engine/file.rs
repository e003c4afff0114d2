use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;
use sha2::{Digest, Sha256};

use super::model::FittedModel;
use crate::data::{Bounds, Schema};
use crate::dependency::Dependency;
use crate::error::{Error, Result};
use crate::mechanisms::BudgetLedger;
use crate::methods::FittedMethod;

/// Model file format version written by this build.
pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: u64,
    schema: Schema,
    bounds: Bounds,
    dependency: Dependency,
    methods: IndexMap<String, FittedMethod>,
    ledger: BudgetLedger,
}

// serde_json's object map is sorted by key, so the compact form is canonical.
fn checksum(body: &Json) -> String {
    hex::encode(Sha256::digest(body.to_string().as_bytes()))
}

impl FittedModel {
    /// Serializes to the versioned, checksummed JSON model format.
    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            version: FORMAT_VERSION,
            schema: self.schema.clone(),
            bounds: self.bounds.clone(),
            dependency: self.dependency.clone(),
            methods: self.methods.clone(),
            ledger: self.ledger.clone(),
        };
        let mut value = serde_json::to_value(&file)?;
        let sum = checksum(&value);
        value
            .as_object_mut()
            .expect("model serializes to an object")
            .insert("checksum".into(), Json::String(sum));
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: Json = serde_json::from_str(text).map_err(|e| Error::MalformedModel(e.to_string()))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| Error::MalformedModel("model file is not a JSON object".into()))?;
        let version = obj
            .get("version")
            .and_then(Json::as_u64)
            .ok_or_else(|| Error::MalformedModel("missing or invalid \"version\"".into()))?;
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let stored = match obj.remove("checksum") {
            Some(Json::String(s)) => s,
            _ => return Err(Error::MalformedModel("missing \"checksum\"".into())),
        };
        if checksum(&value) != stored {
            return Err(Error::Checksum);
        }
        let file: ModelFile = serde_json::from_value(value).map_err(|e| Error::MalformedModel(e.to_string()))?;
        let model = FittedModel {
            schema: file.schema,
            bounds: file.bounds,
            dependency: file.dependency,
            methods: file.methods,
            ledger: file.ledger,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

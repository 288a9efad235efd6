use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How one analysis column is derived from a raw file column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnRule {
    pub source: String,
    /// When set, the column is the 0/1 indicator `source == equals`.
    #[serde(default)]
    pub equals: Option<String>,
}

/// Analysis column names mapped to raw-file rules, loaded from TOML:
///
/// ```toml
/// [columns.MALE]
/// source = "gender"
/// equals = "male"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnMapping {
    pub columns: IndexMap<String, ColumnRule>,
}

impl ColumnMapping {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read mapping {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    /// Rule for `name`, defaulting to the raw column of the same name.
    pub fn rule(&self, name: &str) -> ColumnRule {
        self.columns.get(name).cloned().unwrap_or_else(|| ColumnRule {
            source: name.to_string(),
            equals: None,
        })
    }
}

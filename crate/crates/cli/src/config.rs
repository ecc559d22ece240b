use std::path::{Path, PathBuf};

use crate::args::parse_real;
use crate::{CliError, CliResult};

const KEYS: &[&str] = &[
    "p_min", "p_max", "p_step", "delta_in", "c1", "c2", "c3", "n", "seed", "format", "out", "p", "d", "schmidt", "m",
    "a1", "a2",
];

/// Defaults read from a flat TOML table. Keys may use `-` or `_`.
#[derive(Debug, Default)]
pub struct FileConfig {
    table: toml::Table,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let raw: toml::Table = text
            .parse()
            .map_err(|e| CliError::Usage(format!("malformed config {}: {e}", path.display())))?;
        let mut table = toml::Table::new();
        for (k, v) in raw {
            let key = k.replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown config key `{k}`")));
            }
            if v.is_table() || v.is_array() {
                return Err(CliError::Usage(format!("config key `{k}` must be a scalar")));
            }
            table.insert(key, v);
        }
        Ok(Self { table })
    }

    fn bad(key: &str) -> CliError {
        CliError::Usage(format!("config key `{key}` has the wrong type"))
    }

    pub fn real(&self, key: &str) -> CliResult<Option<f64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Float(x)) => Ok(Some(*x)),
            Some(toml::Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(toml::Value::String(s)) => parse_real(s).map(Some).map_err(CliError::Usage),
            Some(_) => Err(Self::bad(key)),
        }
    }

    pub fn uint(&self, key: &str) -> CliResult<Option<u64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(_) => Err(Self::bad(key)),
        }
    }

    pub fn string(&self, key: &str) -> CliResult<Option<String>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(Self::bad(key)),
        }
    }

    pub fn path(&self, key: &str) -> CliResult<Option<PathBuf>> {
        Ok(self.string(key)?.map(PathBuf::from))
    }
}

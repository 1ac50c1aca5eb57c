//! `key = value` config files and flag/file/default resolution.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Keys
//! are the long flag names without the leading dashes. Flags win over the
//! file, the file wins over built-in defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

/// Every key any subcommand understands; anything else in a file is a typo.
pub const KNOWN_KEYS: &[&str] = &[
    "gain-min",
    "gain-max",
    "steps",
    "eta",
    "squeezing-db",
    "antisqueezing-db",
    "window-t",
    "windows",
    "polarizer-t",
    "gain",
    "transmission",
    "g",
    "points",
    "metric",
    "g-hi",
    "g-limit",
    "seed",
    "shots",
    "block-size",
    "scenario",
    "out",
];

pub type ConfigMap = BTreeMap<String, String>;

pub fn parse_config(text: &str) -> Result<ConfigMap, CliError> {
    let mut map = ConfigMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected `key = value`, got `{raw}`",
                lineno + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        if value.is_empty() {
            return Err(CliError::Usage(format!(
                "config line {}: empty value for `{key}`",
                lineno + 1
            )));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(CliError::Usage(format!(
                "config line {}: duplicate key `{key}`",
                lineno + 1
            )));
        }
    }
    Ok(map)
}

pub fn load_config(path: &Path) -> Result<ConfigMap, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Resolves parameters and remembers the effective values for provenance.
pub struct Params<'a> {
    file: &'a ConfigMap,
    effective: Vec<(&'static str, String)>,
}

impl<'a> Params<'a> {
    pub fn new(file: &'a ConfigMap) -> Self {
        Self {
            file,
            effective: Vec::new(),
        }
    }

    pub fn optional<T>(&mut self, key: &'static str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(raw) => Some(raw.parse::<T>().map_err(|e| {
                    CliError::Usage(format!("config value for `{key}` (`{raw}`): {e}"))
                })?),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.effective.push((key, v.to_string()));
        }
        Ok(value)
    }

    pub fn get<T>(&mut self, key: &'static str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.optional(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.effective.push((key, default.to_string()));
                Ok(default)
            }
        }
    }

    /// Effective configuration in config-file syntax.
    pub fn echo(&self) -> String {
        let mut out = String::from("# effective config\n");
        for (k, v) in &self.effective {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

//! Flat key=value config files and flag/file merging.
//!
//! One `key=value` pair per line, `#` starts a comment, blank lines are
//! ignored. Flags always override file values. Unknown keys are rejected
//! so typos fail loudly instead of silently using defaults.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Every key any subcommand understands.
const ALLOWED_KEYS: [&str; 18] = [
    "n", "h", "q", "preset", "seed", "bound", "theta", "lambda", "n_list", "mode", "out", "tol",
    "lo", "hi", "a_max", "mean", "samples", "plot",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !ALLOWED_KEYS.contains(&key.as_str()) {
                return Err(CliError::Validation(format!(
                    "config line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            values.insert(key, value);
        }
        Ok(ConfigFile { values })
    }

    /// flag value if present, else the parsed file value, else None.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| {
                CliError::Validation(format!("config key `{key}`: bad value `{raw}`: {e}"))
            }),
        }
    }

    /// As [`resolve`], then error with exit code 2 when the key is absent
    /// from both sources.
    pub fn require<T>(&self, flag: Option<T>, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.resolve(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing required key `{key}` (flag --{})", key.replace('_', "-"))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let cfg = ConfigFile::parse("# comment\nn = 100\nh=5 # trailing\n\nmode=exact\n").unwrap();
        assert_eq!(cfg.resolve::<u64>(None, "n").unwrap(), Some(100));
        assert_eq!(cfg.resolve::<u64>(None, "h").unwrap(), Some(5));
        assert_eq!(cfg.resolve::<u64>(Some(7), "h").unwrap(), Some(7)); // flag wins
    }

    #[test]
    fn rejects_unknown_keys_and_garbage() {
        assert!(matches!(
            ConfigFile::parse("frobnicate=1"),
            Err(CliError::Validation(_))
        ));
        assert!(matches!(
            ConfigFile::parse("just some text"),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn require_reports_usage() {
        let cfg = ConfigFile::parse("").unwrap();
        assert!(matches!(
            cfg.require::<u64>(None, "n"),
            Err(CliError::Usage(_))
        ));
    }
}

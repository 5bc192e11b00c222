//! Flat `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

/// Keys a configuration file may set; each mirrors the long flag name.
pub const KEYS: [&str; 11] = [
    "out", "precision", "cache", "jobs", "ed-cap", "twist-form", "method", "L", "delta", "phi", "n",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", no + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::Usage(format!("config line {}: unknown key {key}", no + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// The flag value if given, else the file value.
pub fn pick(flag: Option<String>, file: &FileConfig, key: &str) -> Option<String> {
    flag.or_else(|| file.get(key).map(str::to_string))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let c = FileConfig::parse("# header\nprecision = 8  # digits\n\nmethod=ed,cft\n").unwrap();
        assert_eq!(c.get("precision"), Some("8"));
        assert_eq!(c.get("method"), Some("ed,cft"));
        assert_eq!(c.get("jobs"), None);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(FileConfig::parse("colour = red"), Err(CliError::Usage(_))));
        assert!(matches!(FileConfig::parse("precision 8"), Err(CliError::Usage(_))));
    }

    #[test]
    fn flags_win() {
        let c = FileConfig::parse("precision = 8").unwrap();
        assert_eq!(pick(Some("10".into()), &c, "precision").as_deref(), Some("10"));
        assert_eq!(pick(None, &c, "precision").as_deref(), Some("8"));
    }
}

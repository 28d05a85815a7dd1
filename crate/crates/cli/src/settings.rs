//! Layered run settings.
//!
//! Every parameter is looked up, in order, as a command-line flag, an
//! `ITEQD_<KEY>` environment variable (handled by clap) and a `key=value`
//! line of the `--config` file, falling back to a default. Keys use
//! underscores where flags use dashes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const TOOL: &str = concat!("iteqd ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    source: Option<PathBuf>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut file = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| CliError::Usage(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
            let key = k.trim().replace('-', "_");
            if file.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!("{}:{}: `{key}` set twice", path.display(), i + 1)));
            }
        }
        Ok(Self { file, source: Some(path.to_path_buf()), ..Self::default() })
    }

    fn file_value<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| {
                let src = self.source.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
                CliError::Usage(format!("{src}: invalid value `{v}` for `{key}`"))
            }),
        }
    }

    /// Resolves a parameter that is part of the experiment (and of the hash).
    pub fn get<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        self.used.insert(key.to_string());
        let v = match flag {
            Some(v) => v,
            None => self.file_value(key)?.unwrap_or(default),
        };
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// Like [`Settings::get`] without a default.
    pub fn get_opt<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        self.used.insert(key.to_string());
        let v = match flag {
            Some(v) => Some(v),
            None => self.file_value(key)?,
        };
        self.resolved.insert(key.to_string(), v.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "none".into()));
        Ok(v)
    }

    /// Output locations and other values that do not change results.
    pub fn path(&mut self, key: &str, flag: Option<PathBuf>) -> Result<Option<PathBuf>, CliError> {
        self.used.insert(key.to_string());
        match flag {
            Some(p) => Ok(Some(p)),
            None => self.file_value::<PathBuf>(key),
        }
    }

    pub fn required_path(&mut self, key: &str, flag: Option<PathBuf>) -> Result<PathBuf, CliError> {
        self.path(key, flag)?.ok_or_else(|| CliError::Usage(format!("missing --{}", key.replace('_', "-"))))
    }

    /// Records a derived value in the hash without looking it up.
    pub fn record(&mut self, key: &str, value: impl Display) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    /// Rejects config-file keys that the command never asked for.
    pub fn finish(&self, command: &str) -> Result<Config, CliError> {
        if let Some(k) = self.file.keys().find(|k| !self.used.contains(*k)) {
            return Err(CliError::Usage(format!("unknown setting `{k}` for `{command}`")));
        }
        let mut text = format!("command={command}\n");
        for (k, v) in &self.resolved {
            text.push_str(&format!("{k}={v}\n"));
        }
        let digest = Sha256::digest(text.as_bytes());
        Ok(Config { hash: hex::encode(&digest[..8]), resolved: self.resolved.clone() })
    }
}

/// The resolved settings of one command.
#[derive(Debug, Clone)]
pub struct Config {
    pub hash: String,
    pub resolved: BTreeMap<String, String>,
}

impl Config {
    /// `# tool=... config_hash=...` line for text outputs.
    pub fn header_comment(&self) -> String {
        format!("# tool={TOOL} config_hash={}", self.hash)
    }

    /// Metadata object written as the first line of JSONL outputs.
    pub fn meta_json(&self, command: &str) -> serde_json::Value {
        serde_json::json!({ "meta": { "tool": TOOL, "config_hash": self.hash, "command": command, "settings": self.resolved } })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn flag_beats_file_beats_default() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment\nseed = 7\nkappa=0.2\n").unwrap();
        let mut s = Settings::load(Some(f.path())).unwrap();
        assert_eq!(s.get("seed", Some(3u64), 0).unwrap(), 3);
        assert_eq!(s.get("kappa", None, 0.05).unwrap(), 0.2);
        assert_eq!(s.get("alpha", None, 0.9).unwrap(), 0.9);
        let a = s.finish("adapt run").unwrap();
        assert_eq!(a.hash.len(), 16);
    }

    #[test]
    fn hash_tracks_values() {
        let mut a = Settings::default();
        a.get("seed", Some(1u64), 0).unwrap();
        let mut b = Settings::default();
        b.get("seed", Some(2u64), 0).unwrap();
        let mut c = Settings::default();
        c.get("seed", None, 1u64).unwrap();
        let (a, b, c) = (a.finish("x").unwrap(), b.finish("x").unwrap(), c.finish("x").unwrap());
        assert_ne!(a.hash, b.hash);
        assert_eq!(a.hash, c.hash);
    }

    #[test]
    fn rejects_bad_files() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "seed=x").unwrap();
        let mut s = Settings::load(Some(f.path())).unwrap();
        assert!(matches!(s.get("seed", None, 0u64), Err(CliError::Usage(_))));

        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "bogus=1").unwrap();
        let s = Settings::load(Some(f.path())).unwrap();
        assert!(matches!(s.finish("map create"), Err(CliError::Usage(_))));

        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "no equals sign").unwrap();
        assert!(Settings::load(Some(f.path())).is_err());
    }
}

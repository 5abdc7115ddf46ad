//! `key = value` configuration files merged with command-line overrides.
//!
//! Files hold one `key = value` pair per line; `#` starts a comment. Flags
//! given as `--key value` or `--key=value` replace file values. Keys use
//! underscores; dashes in flag names are accepted and normalised.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn normalise_key(key: &str) -> String {
    key.trim().replace('-', "_").to_ascii_lowercase()
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses the text of a configuration file.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut settings = Self::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "line {}: expected `key = value`, got {raw:?}",
                    n + 1
                ))
            })?;
            let key = normalise_key(key);
            if key.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key", n + 1)));
            }
            settings.values.insert(key, value.trim().to_string());
        }
        Ok(settings)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses `--key value` / `--key=value` pairs.
    pub fn from_flags(args: &[String]) -> Result<Self, CliError> {
        let mut settings = Self::new();
        let mut iter = args.iter();
        while let Some(arg) = iter.next() {
            let flag = arg
                .strip_prefix("--")
                .ok_or_else(|| CliError::Config(format!("expected a --key flag, got {arg:?}")))?;
            let (key, value) = match flag.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    let v = iter
                        .next()
                        .ok_or_else(|| CliError::Config(format!("flag --{flag} needs a value")))?;
                    (flag.to_string(), v.clone())
                }
            };
            settings
                .values
                .insert(normalise_key(&key), value.trim().to_string());
        }
        Ok(settings)
    }

    /// Values of `other` replace values of `self`.
    pub fn merged(mut self, other: Settings) -> Self {
        self.values.extend(other.values);
        self
    }

    pub fn set(&mut self, key: &str, value: impl fmt::Display) {
        self.values.insert(normalise_key(key), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown key {key:?}; expected one of {}",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn value<T: ParseValue>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(raw) => T::parse_value(raw).map_err(|e| CliError::Config(format!("{key}: {e}"))),
        }
    }

    pub fn list<T: ParseValue + Clone>(
        &self,
        key: &str,
        default: &[T],
    ) -> Result<Vec<T>, CliError> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(raw) => raw
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| T::parse_value(s).map_err(|e| CliError::Config(format!("{key}: {e}"))))
                .collect(),
        }
    }
}

/// Values readable from configuration text.
pub trait ParseValue: Sized {
    fn parse_value(raw: &str) -> Result<Self, String>;
}

impl ParseValue for f64 {
    /// Accepts plain numbers and multiples of pi (`pi`, `2pi`, `0.5*pi`).
    fn parse_value(raw: &str) -> Result<Self, String> {
        let s = raw.trim().to_ascii_lowercase();
        let parsed = match s.strip_suffix("pi") {
            Some(prefix) => {
                let prefix = prefix.trim_end_matches('*').trim();
                let factor = if prefix.is_empty() {
                    Ok(1.0)
                } else {
                    prefix.parse::<f64>()
                };
                factor.map(|f| f * std::f64::consts::PI)
            }
            None => s.parse::<f64>(),
        };
        match parsed {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("expected a finite number, got {raw:?}")),
        }
    }
}

macro_rules! parse_via_from_str {
    ($($t:ty),*) => {$(
        impl ParseValue for $t {
            fn parse_value(raw: &str) -> Result<Self, String> {
                <$t>::from_str(raw.trim()).map_err(|e| format!("cannot parse {raw:?}: {e}"))
            }
        }
    )*};
}

parse_via_from_str!(usize, u64, String);

impl ParseValue for vlbm_core::ModelKind {
    fn parse_value(raw: &str) -> Result<Self, String> {
        raw.parse().map_err(|e: vlbm_core::VlbmError| e.to_string())
    }
}

impl ParseValue for vlbm_core::solver::SplitScheme {
    fn parse_value(raw: &str) -> Result<Self, String> {
        raw.parse().map_err(|e: vlbm_core::VlbmError| e.to_string())
    }
}

impl ParseValue for vlbm_core::solver::TransportBackend {
    fn parse_value(raw: &str) -> Result<Self, String> {
        raw.parse().map_err(|e: vlbm_core::VlbmError| e.to_string())
    }
}

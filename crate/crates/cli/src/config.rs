//! Configuration resolution: command-line flags take precedence over
//! `key=value` entries in the optional `--config` file; the master seed
//! additionally falls back to the `EDGE_LOGDET_SEED` environment variable
//! and finally to 0.

use crate::Failure;
use std::collections::HashMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

pub const SEED_ENV: &str = "EDGE_LOGDET_SEED";

/// Parsed `--config` file: `key = value` lines, `#` comments, blank lines
/// ignored. Keys use the long-flag spelling (`n-list`, `sigma-rule`, …);
/// keys that the current subcommand does not consume are ignored so one
/// file can drive several subcommands.
pub struct Settings {
    map: HashMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::Usage(format!("cannot read config file {}: {e}", path.display()))
            })?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    Failure::Usage(format!(
                        "{}:{}: expected key=value, got {raw:?}",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Settings { map })
    }

    fn parse<T>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                Failure::Usage(format!("config key {key} = {raw:?}: {e}"))
            }),
        }
    }

    /// Flag value if given, else config value, else None.
    pub fn opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.parse(key),
        }
    }

    /// Flag value if given, else config value, else the default.
    pub fn or_default<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    /// Flag value if given, else config value, else a usage error.
    pub fn require<T>(&self, flag: Option<T>, key: &str) -> Result<T, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.opt(flag, key)?.ok_or_else(|| {
            Failure::Usage(format!("missing required value: pass --{key} or set {key}= in the config file"))
        })
    }

    /// Master seed: flag > config `seed=` > EDGE_LOGDET_SEED > 0.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64, Failure> {
        if let Some(v) = self.opt(flag, "seed")? {
            return Ok(v);
        }
        match std::env::var(SEED_ENV) {
            Ok(raw) => raw.parse::<u64>().map_err(|e| {
                Failure::Usage(format!("{SEED_ENV} = {raw:?}: {e}"))
            }),
            Err(_) => Ok(0),
        }
    }
}

/// Comma-separated list of dimensions, e.g. `128,8192`.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>, Failure> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        out.push(part.parse::<usize>().map_err(|e| {
            Failure::Usage(format!("n-list entry {part:?}: {e}"))
        })?);
    }
    Ok(out)
}

/// Prints the effective configuration (after all fallbacks) to stderr.
pub fn echo_config(subcommand: &str, entries: &[(&str, String)]) {
    eprintln!("# effective configuration");
    eprintln!("#   subcommand = {subcommand}");
    for (k, v) in entries {
        eprintln!("#   {k} = {v}");
    }
}

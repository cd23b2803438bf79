//! Parameter tables, config files and run manifests.
//!
//! Config files and manifests share one flat format: `key = value` per line,
//! `#` starts a comment. Effective values are resolved in increasing
//! precedence: built-in defaults, `--config` file, dedicated flags, `--set`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Value,
    /// A file path; stored absolute so a manifest can be replayed elsewhere.
    Path,
}

#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: String,
    pub kind: Kind,
    pub help: &'static str,
}

pub fn value(key: &'static str, default: impl ToString, help: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        default: default.to_string(),
        kind: Kind::Value,
        help,
    }
}

pub fn path(key: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        default: String::new(),
        kind: Kind::Path,
        help,
    }
}

/// Parses `key = value` lines.
pub fn parse_key_values(text: &str, origin: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{origin}:{}: expected `key = value`", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Effective parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    values: BTreeMap<String, String>,
    kinds: BTreeMap<String, Kind>,
}

impl Params {
    pub fn defaults(specs: &[ParamSpec]) -> Self {
        Params {
            values: specs.iter().map(|s| (s.key.to_string(), s.default.clone())).collect(),
            kinds: specs.iter().map(|s| (s.key.to_string(), s.kind)).collect(),
        }
    }

    /// Overrides one key; unknown keys are usage errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let kind = *self
            .kinds
            .get(key)
            .ok_or_else(|| CliError::Usage(format!("unknown parameter {key:?}")))?;
        let v = match kind {
            Kind::Path if !value.is_empty() => absolute(Path::new(value))?,
            _ => value.to_string(),
        };
        self.values.insert(key.to_string(), v);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn str(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("parameter {key} not declared"))
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        let s = self.str(key);
        s.parse()
            .map_err(|_| CliError::Usage(format!("bad value {s:?} for {key}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.parse(key)
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.parse(key)
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        self.parse(key)
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        match self.str(key) {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            s => Err(CliError::Usage(format!("bad boolean {s:?} for {key}"))),
        }
    }

    /// `None` for the literal `auto`.
    pub fn auto_usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.str(key) {
            "auto" => Ok(None),
            _ => self.usize(key).map(Some),
        }
    }

    pub fn optional_path(&self, key: &str) -> Option<PathBuf> {
        let s = self.str(key);
        (!s.is_empty()).then(|| PathBuf::from(s))
    }

    /// `WxH`.
    pub fn dims(&self, key: &str) -> Result<(usize, usize), CliError> {
        let s = self.str(key);
        s.split_once('x')
            .and_then(|(w, h)| Some((w.trim().parse().ok()?, h.trim().parse().ok()?)))
            .filter(|&(w, h): &(usize, usize)| w > 0 && h > 0)
            .ok_or_else(|| CliError::Usage(format!("bad size {s:?} for {key}, expected WxH")))
    }
}

fn absolute(p: &Path) -> Result<String, CliError> {
    let abs = std::path::absolute(p).map_err(|e| CliError::Io(p.display().to_string(), e))?;
    Ok(abs.to_string_lossy().into_owned())
}

pub const MANIFEST: &str = "manifest.txt";

/// Manifest text: command, version, every effective parameter, then the
/// files written. Output paths are relative to the manifest.
pub fn manifest_text(command: &str, params: &Params, outputs: &[&str]) -> String {
    let mut s = String::from("# rhizome run manifest\n");
    s += &format!("command = {command}\nversion = {}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in params.iter() {
        s += &format!("{k} = {v}\n");
    }
    for o in outputs {
        s += &format!("output = {o}\n");
    }
    s
}

/// Command name and parameter assignments recorded in a manifest.
pub fn read_manifest(text: &str) -> Result<(String, Vec<(String, String)>), CliError> {
    let mut command = None;
    let mut params = Vec::new();
    for (k, v) in parse_key_values(text, MANIFEST)? {
        match k.as_str() {
            "command" => command = Some(v),
            "version" | "output" => {}
            _ => params.push((k, v)),
        }
    }
    let command = command.ok_or_else(|| CliError::Usage("manifest has no command line".into()))?;
    Ok((command, params))
}

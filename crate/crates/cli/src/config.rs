//! Line-based `key = value` configuration files. Command-line flags win
//! over file values.

use std::collections::BTreeMap;
use std::path::Path;

pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn empty() -> Self {
        ConfigFile {
            values: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut values = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {} is not `key = value`", idx + 1))?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    /// Flag value if set, else parsed config value, else default.
    pub fn resolve<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| format!("config key `{key}`: cannot parse `{raw}`")),
            None => Ok(default),
        }
    }

    pub fn resolve_opt<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>, String> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| format!("config key `{key}`: cannot parse `{raw}`")),
            None => Ok(None),
        }
    }
}

/// Comma-separated non-zero shifts.
pub fn parse_shifts(raw: &str) -> Result<Vec<i64>, String> {
    let mut out = Vec::new();
    for tok in raw.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let v: i64 = tok
            .parse()
            .map_err(|_| format!("shift list: `{tok}` is not an integer"))?;
        if v == 0 {
            return Err("shift list must not contain 0".into());
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err("shift list is empty".into());
    }
    Ok(out)
}

/// Comma-separated x grid, sorted ascending and deduplicated.
pub fn parse_grid(raw: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for tok in raw.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let v: f64 = tok
            .parse()
            .map_err(|_| format!("x grid: `{tok}` is not a number"))?;
        if !(v >= 1.0) {
            return Err(format!("x grid entries must be >= 1, got {v}"));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err("x grid is empty".into());
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup();
    Ok(out)
}

pub fn parse_moduli(raw: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for tok in raw.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let v: u64 = tok
            .parse()
            .map_err(|_| format!("modulus list: `{tok}` is not a positive integer"))?;
        if v == 0 {
            return Err("modulus must be >= 1".into());
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err("modulus list is empty".into());
    }
    Ok(out)
}

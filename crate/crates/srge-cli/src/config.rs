//! Key=value configuration files.
//!
//! A config file holds one `key = value` pair per line, with `#` or `;`
//! comments and blank lines ignored. Keys use the long flag names of the
//! command the file is passed to; flags given on the command line take
//! precedence over file values. Unknown keys are rejected so a typo cannot
//! silently fall back to a default.

use crate::failure::Failure;
use std::collections::BTreeMap;
use std::path::Path;

/// Parsed contents of a config file (possibly empty when none was given).
#[derive(Debug, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    /// Loads a config file, or returns an empty map when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::Usage(format!(
                    "{}:{}: expected key = value, found {line:?}",
                    path.display(),
                    idx + 1
                )));
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    /// Rejects keys outside the documented set of the current command.
    pub fn ensure_known(&self, keys: &[&str]) -> Result<(), Failure> {
        for key in self.entries.keys() {
            if !keys.contains(&key.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown config key {key:?}; documented keys: {}",
                    keys.join(", ")
                )));
            }
        }
        Ok(())
    }

    /// Raw string value.
    pub fn string(&self, key: &str) -> Option<String> {
        self.entries.get(key).cloned()
    }

    /// Floating-point value.
    pub fn f64(&self, key: &str) -> Result<Option<f64>, Failure> {
        self.parsed(key)
    }

    /// Unsigned integer value.
    pub fn usize(&self, key: &str) -> Result<Option<usize>, Failure> {
        self.parsed(key)
    }

    /// Replica-count style small integer.
    pub fn u32(&self, key: &str) -> Result<Option<u32>, Failure> {
        self.parsed(key)
    }

    /// Boolean value (`true`/`false`/`1`/`0`).
    pub fn flag(&self, key: &str) -> Result<Option<bool>, Failure> {
        match self.entries.get(key).map(String::as_str) {
            None => Ok(None),
            Some("true") | Some("1") => Ok(Some(true)),
            Some("false") | Some("0") => Ok(Some(false)),
            Some(other) => Err(Failure::Usage(format!(
                "config key {key:?}: expected true/false, found {other:?}"
            ))),
        }
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| {
                Failure::Usage(format!("config key {key:?}: cannot parse {raw:?}: {e}"))
            }),
        }
    }
}

/// Parses an inclusive `start:stop:step` grid of floats.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::Usage(format!(
            "grid {text:?}: expected start:stop:step"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Failure::Usage(format!("grid {text:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(Failure::Usage(format!(
            "grid {text:?}: needs finite bounds and a positive step"
        )));
    }
    if stop < start {
        return Err(Failure::Usage(format!(
            "grid {text:?}: stop is below start"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + step * i as f64).collect())
}

/// Parses an inclusive `start:stop` integer range.
pub fn parse_range(text: &str) -> Result<(usize, usize), Failure> {
    let Some((a, b)) = text.split_once(':') else {
        return Err(Failure::Usage(format!(
            "range {text:?}: expected start:stop"
        )));
    };
    let lo = a
        .trim()
        .parse::<usize>()
        .map_err(|e| Failure::Usage(format!("range {text:?}: {e}")))?;
    let hi = b
        .trim()
        .parse::<usize>()
        .map_err(|e| Failure::Usage(format!("range {text:?}: {e}")))?;
    if hi < lo {
        return Err(Failure::Usage(format!("range {text:?}: stop below start")));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_inclusive() {
        let g = parse_grid("0.15:0.85:0.1").unwrap();
        assert_eq!(g.len(), 8);
        assert!((g[7] - 0.85).abs() < 1e-12);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("3:9").unwrap(), (3, 9));
        assert!(parse_range("9:3").is_err());
        assert!(parse_range("x:3").is_err());
    }
}

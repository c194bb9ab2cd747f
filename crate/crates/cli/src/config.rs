//! Run configuration: defaults, then a `key=value` file, then flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Overrides each command's default tolerance when set.
    pub tol: Option<f64>,
    /// Overrides each command's primary iteration budget when set.
    pub budget: Option<usize>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub no_timestamp: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, tol: None, budget: None, out: None, format: Format::Json, no_timestamp: false }
    }
}

/// Values given on the command line; `None` defers to the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub budget: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub no_timestamp: bool,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value", no + 1))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

fn value<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, String> {
    map.get(key).map(|v| v.parse::<T>().map_err(|_| format!("config key `{key}`: bad value `{v}`"))).transpose()
}

impl RunConfig {
    pub fn load(file: Option<&Path>, flags: Overrides) -> Result<Self, String> {
        let map = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("config {}: {e}", p.display()))?;
                parse_file(&text)?
            }
            None => BTreeMap::new(),
        };
        const KEYS: [&str; 6] = ["seed", "tol", "budget", "out", "format", "no_timestamp"];
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(format!("unknown config key `{k}`"));
        }
        let d = RunConfig::default();
        let format = match flags.format {
            Some(f) => f,
            None => match map.get("format") {
                Some(v) => Format::from_str(v, true).map_err(|_| format!("config key `format`: bad value `{v}`"))?,
                None => d.format,
            },
        };
        let cfg = RunConfig {
            seed: flags.seed.or(value(&map, "seed")?).unwrap_or(d.seed),
            tol: flags.tol.or(value(&map, "tol")?),
            budget: flags.budget.or(value(&map, "budget")?),
            out: flags.out.or(value::<PathBuf>(&map, "out")?),
            format,
            no_timestamp: flags.no_timestamp || value(&map, "no_timestamp")?.unwrap_or(false),
        };
        if let Some(t) = cfg.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("tolerance must be positive, got {t}"));
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        std::fs::write(&p, "# run\nseed = 7\ntol=1e-4\nformat = csv\n").unwrap();
        let cfg = RunConfig::load(Some(&p), Overrides { seed: Some(9), ..Default::default() }).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.tol, Some(1e-4));
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn bad_lines_rejected() {
        assert!(parse_file("seed 3").is_err());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        std::fs::write(&p, "colour = blue\n").unwrap();
        assert!(RunConfig::load(Some(&p), Overrides::default()).is_err());
        std::fs::write(&p, "seed = x\n").unwrap();
        assert!(RunConfig::load(Some(&p), Overrides::default()).is_err());
    }
}

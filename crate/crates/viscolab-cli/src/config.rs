//! Plain-text experiment configuration: `[section]` headers over
//! `key = value` lines, with `#` or `;` starting a comment. Values stay
//! strings until a typed getter parses them; per-experiment allowlists
//! reject unknown sections and keys so typos surface as usage errors.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

/// A configuration problem (parse failure, unknown key, malformed value).
/// Always reported as a usage error.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(section: &str, key: &str, value: &str, want: &str) -> ConfigError {
    ConfigError(format!(
        "key {key:?} in [{section}]: cannot parse {value:?} as {want}"
    ))
}

type Section = BTreeMap<String, String>;

#[derive(Debug, Default)]
pub struct Config {
    sections: BTreeMap<String, Section>,
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        let mut current = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let ln = idx + 1;
            let line = match raw.find(['#', ';']) {
                Some(i) => &raw[..i],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| {
                        ConfigError(format!("line {ln}: unterminated section header {raw:?}"))
                    })?
                    .trim();
                if name.is_empty() {
                    return Err(ConfigError(format!("line {ln}: empty section name")));
                }
                current = name.to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "line {ln}: expected `key = value`, found {raw:?}"
                )));
            };
            if current.is_empty() {
                return Err(ConfigError(format!(
                    "line {ln}: key {:?} appears before any [section]",
                    k.trim()
                )));
            }
            let key = k.trim().to_string();
            if sections
                .get_mut(&current)
                .unwrap()
                .insert(key.clone(), v.trim().to_string())
                .is_some()
            {
                return Err(ConfigError(format!(
                    "line {ln}: duplicate key {key:?} in [{current}]"
                )));
            }
        }
        Ok(Self { sections })
    }

    /// Rejects sections and keys outside the given vocabulary, naming the
    /// offender.
    pub fn validate(&self, allowed: &[(&str, &[&str])]) -> Result<(), ConfigError> {
        for (section, keys) in &self.sections {
            let Some((_, ok)) = allowed.iter().find(|(s, _)| s == section) else {
                return Err(ConfigError(format!(
                    "unknown config section [{section}] for this experiment"
                )));
            };
            for key in keys.keys() {
                if !ok.contains(&key.as_str()) {
                    return Err(ConfigError(format!(
                        "unknown key {key:?} in section [{section}]"
                    )));
                }
            }
        }
        Ok(())
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .map(String::as_str)
    }

    pub fn str(&self, section: &str, key: &str, default: &str) -> String {
        self.raw(section, key).unwrap_or(default).to_string()
    }

    pub fn f64(&self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.raw(section, key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| bad(section, key, v, "a number")),
        }
    }

    pub fn usize(&self, section: &str, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.raw(section, key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| bad(section, key, v, "a count")),
        }
    }

    pub fn u64(&self, section: &str, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.raw(section, key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| bad(section, key, v, "an integer")),
        }
    }

    pub fn bool(&self, section: &str, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.raw(section, key) {
            None => Ok(default),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(v) => Err(bad(section, key, v, "true or false")),
        }
    }

    pub fn str_list(&self, section: &str, key: &str, default: &str) -> Vec<String> {
        self.str(section, key, default)
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    }

    pub fn f64_list(
        &self,
        section: &str,
        key: &str,
        default: &[f64],
    ) -> Result<Vec<f64>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|_| bad(section, key, v, "numbers")))
                .collect(),
        }
    }

    /// Parses a comma-separated list of `NRxNT` grid sizes.
    pub fn resolutions(
        &self,
        section: &str,
        key: &str,
        default: &str,
    ) -> Result<Vec<(usize, usize)>, ConfigError> {
        self.str_list(section, key, default)
            .iter()
            .map(|s| parse_resolution(s))
            .collect()
    }

    pub fn resolution_override(&self) -> Result<Option<(usize, usize)>, ConfigError> {
        match self.raw("experiment", "resolution") {
            None => Ok(None),
            Some(v) => parse_resolution(v).map(Some),
        }
    }

    pub fn seed_default(&self) -> Result<u64, ConfigError> {
        self.u64("experiment", "seed", 0)
    }
}

/// Accepts `NRxNT` (config files, list-friendly) and `NR,NT` (command line).
pub fn parse_resolution(s: &str) -> Result<(usize, usize), ConfigError> {
    let parts: Vec<&str> = if s.contains('x') {
        s.split('x').collect()
    } else {
        s.split(',').collect()
    };
    let err = || ConfigError(format!("resolution {s:?}: expected NRxNT or NR,NT"));
    if parts.len() != 2 {
        return Err(err());
    }
    let nr: usize = parts[0].trim().parse().map_err(|_| err())?;
    let nt: usize = parts[1].trim().parse().map_err(|_| err())?;
    if !(4..=24).contains(&nr) || !(8..=96).contains(&nt) || nt % 2 != 0 {
        return Err(ConfigError(format!(
            "resolution {nr}x{nt} outside the supported range \
             (4 <= NR <= 24, even 8 <= NT <= 96)"
        )));
    }
    Ok((nr, nt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_values() {
        let cfg = Config::parse(
            "# heading\n[experiment]\nresolution = 12x48 ; inline\nseed = 7\n\n[probe]\nc = 0.3\n",
        )
        .unwrap();
        assert_eq!(cfg.str("experiment", "resolution", ""), "12x48");
        assert_eq!(cfg.seed_default().unwrap(), 7);
        assert_eq!(cfg.f64("probe", "c", 0.0).unwrap(), 0.3);
        assert_eq!(cfg.f64("probe", "missing", 1.5).unwrap(), 1.5);
    }

    #[test]
    fn rejects_malformed_lines_and_duplicates() {
        assert!(Config::parse("[a]\nnonsense\n").is_err());
        assert!(Config::parse("orphan = 1\n").is_err());
        assert!(Config::parse("[a]\nk = 1\nk = 2\n").is_err());
        assert!(Config::parse("[unclosed\n").is_err());
    }

    #[test]
    fn validates_against_allowlist() {
        let cfg = Config::parse("[a]\nk = 1\n").unwrap();
        assert!(cfg.validate(&[("a", &["k"])]).is_ok());
        assert!(cfg.validate(&[("a", &["other"])]).is_err());
        assert!(cfg.validate(&[("b", &["k"])]).is_err());
    }

    #[test]
    fn resolution_formats_and_bounds() {
        assert_eq!(parse_resolution("12x48").unwrap(), (12, 48));
        assert_eq!(parse_resolution("12,48").unwrap(), (12, 48));
        assert!(parse_resolution("3x48").is_err());
        assert!(parse_resolution("12x47").is_err());
        assert!(parse_resolution("12x100").is_err());
        assert!(parse_resolution("12").is_err());
    }
}

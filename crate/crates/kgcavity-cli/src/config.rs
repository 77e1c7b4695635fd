//! Flat `key = value` config files, one pair per line, `#` comments.
//!
//! Each subcommand owns a schema: required keys, optional keys with
//! defaults, and a units mode. Violations are rejected up front with the
//! offending key named, so downstream code only ever sees validated values.

use kgcavity::model::{HBAR_SI, SPEED_OF_LIGHT_SI};
use std::collections::BTreeMap;
use std::path::Path;

/// A parse-level error; always maps to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

/// Raw parsed file: ordered key/value pairs with duplicate detection.
#[derive(Debug)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
    consumed: std::cell::RefCell<Vec<String>>,
}

impl RawConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "line {}: expected `key = value`, got `{}`",
                    lineno + 1,
                    line
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError(format!("line {}: empty key", lineno + 1)));
            }
            if values.insert(key.clone(), value).is_some() {
                return Err(ConfigError(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self {
            values,
            consumed: std::cell::RefCell::new(Vec::new()),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config `{}`: {e}", path.display())))?;
        Self::from_str(&text)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        let v = self.values.get(key).map(String::as_str);
        if v.is_some() {
            self.consumed.borrow_mut().push(key.to_string());
        }
        v
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        let v = self
            .raw(key)
            .ok_or_else(|| ConfigError(format!("missing required key `{key}`")))?;
        parse_f64(key, v)
    }

    pub fn opt_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            Some(v) => parse_f64(key, v),
            None => Ok(default),
        }
    }

    pub fn opt_f64_maybe(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            Some(v) => parse_f64(key, v).map(Some),
            None => Ok(None),
        }
    }

    pub fn require_usize(&self, key: &str) -> Result<usize> {
        let v = self
            .raw(key)
            .ok_or_else(|| ConfigError(format!("missing required key `{key}`")))?;
        v.parse::<usize>()
            .map_err(|_| ConfigError(format!("key `{key}`: `{v}` is not a non-negative integer")))
    }

    pub fn opt_u32(&self, key: &str, default: u32) -> Result<u32> {
        match self.raw(key) {
            Some(v) => v
                .parse::<u32>()
                .map_err(|_| ConfigError(format!("key `{key}`: `{v}` is not a positive integer"))),
            None => Ok(default),
        }
    }

    pub fn require_u32(&self, key: &str) -> Result<u32> {
        let v = self
            .raw(key)
            .ok_or_else(|| ConfigError(format!("missing required key `{key}`")))?;
        v.parse::<u32>()
            .map_err(|_| ConfigError(format!("key `{key}`: `{v}` is not a positive integer")))
    }

    pub fn opt_str(&self, key: &str) -> Option<String> {
        self.raw(key).map(str::to_string)
    }

    pub fn opt_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                let mut out = Vec::new();
                for part in v.split(',') {
                    out.push(parse_f64(key, part.trim())?);
                }
                if out.is_empty() {
                    return Err(ConfigError(format!("key `{key}`: empty list")));
                }
                Ok(Some(out))
            }
        }
    }

    /// Rejects any key that no getter touched, so typos fail loudly.
    pub fn finish(&self) -> Result<()> {
        let consumed = self.consumed.borrow();
        for key in self.values.keys() {
            if !consumed.iter().any(|c| c == key) {
                return Err(ConfigError(format!("unknown key `{key}`")));
            }
        }
        Ok(())
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| ConfigError(format!("key `{key}`: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(ConfigError(format!("key `{key}`: `{v}` is not finite")));
    }
    Ok(x)
}

/// Unit system of the config file. Internally everything becomes natural
/// units; under `si` the CODATA constants are compiled in (c exact,
/// ħ = 1.054571817e-34 J·s to 9+ significant figures) and lengths are
/// converted to light-seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Natural,
    Si,
}

impl Units {
    pub fn as_str(&self) -> &'static str {
        match self {
            Units::Natural => "natural",
            Units::Si => "si",
        }
    }
}

/// Shared physical-parameter block: mass plus unit handling.
pub struct PhysicalParams {
    pub units: Units,
    pub mass_input: f64,
    pub speed_of_light: f64,
    pub hbar: f64,
    pub params: kgcavity::FieldParams,
}

impl PhysicalParams {
    pub fn from_config(cfg: &RawConfig) -> Result<Self> {
        let units = match cfg.opt_str("units") {
            None => Units::Natural,
            Some(u) if u == "natural" => Units::Natural,
            Some(u) if u == "si" => Units::Si,
            Some(u) => {
                return Err(ConfigError(format!(
                    "key `units`: expected `natural` or `si`, got `{u}`"
                )))
            }
        };
        let mass_input = cfg.require_f64("mass")?;
        let (speed_of_light, hbar) = match units {
            Units::Natural => (cfg.opt_f64("c", 1.0)?, cfg.opt_f64("hbar", 1.0)?),
            Units::Si => {
                if cfg.has("c") || cfg.has("hbar") {
                    return Err(ConfigError(
                        "keys `c`/`hbar` are fixed to CODATA values under `units = si`".into(),
                    ));
                }
                (SPEED_OF_LIGHT_SI, HBAR_SI)
            }
        };
        let params = kgcavity::FieldParams::new(mass_input, speed_of_light, hbar)
            .map_err(|e| ConfigError(format!("key `mass`: {e}")))?;
        Ok(Self {
            units,
            mass_input,
            speed_of_light,
            hbar,
            params,
        })
    }

    /// Converts a coordinate length from config units to natural units
    /// (divides by c, so SI meters become light-seconds).
    pub fn length_to_natural(&self, length: f64) -> f64 {
        length / self.speed_of_light
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_whitespace_and_numbers() {
        let cfg = RawConfig::from_str(
            "# full-line comment\n mass = 3.5 # trailing\n\nlength=2\n tolerance = 1e-9 \n",
        )
        .unwrap();
        assert_eq!(cfg.require_f64("mass").unwrap(), 3.5);
        assert_eq!(cfg.require_f64("length").unwrap(), 2.0);
        assert_eq!(cfg.require_f64("tolerance").unwrap(), 1e-9);
        cfg.finish().unwrap();
    }

    #[test]
    fn missing_key_names_the_key() {
        let cfg = RawConfig::from_str("mass = 1\n").unwrap();
        let err = cfg.require_f64("length").unwrap_err();
        assert!(err.0.contains("`length`"), "{err}");
    }

    #[test]
    fn rejects_duplicates_unknown_keys_and_garbage() {
        assert!(RawConfig::from_str("a = 1\na = 2\n")
            .unwrap_err()
            .0
            .contains("duplicate"));
        assert!(RawConfig::from_str("just words\n")
            .unwrap_err()
            .0
            .contains("key = value"));
        let cfg = RawConfig::from_str("mass = 1\nmystery = 2\n").unwrap();
        let _ = cfg.require_f64("mass").unwrap();
        assert!(cfg.finish().unwrap_err().0.contains("`mystery`"));
    }

    #[test]
    fn si_units_convert_to_natural() {
        let cfg = RawConfig::from_str("units = si\nmass = 9.109e-31\n").unwrap();
        let p = PhysicalParams::from_config(&cfg).unwrap();
        // Electron Compton angular frequency in 1/s.
        let expect = 9.109e-31 * SPEED_OF_LIGHT_SI * SPEED_OF_LIGHT_SI / HBAR_SI;
        assert!((p.params.mass() / expect - 1.0).abs() < 1e-12);
        // One meter in light-seconds.
        assert!((p.length_to_natural(1.0) - 1.0 / SPEED_OF_LIGHT_SI).abs() < 1e-20);
    }

    #[test]
    fn si_units_reject_explicit_constants() {
        let cfg = RawConfig::from_str("units = si\nmass = 1e-30\nc = 3e8\n").unwrap();
        assert!(PhysicalParams::from_config(&cfg).is_err());
    }

    #[test]
    fn f64_lists_parse() {
        let cfg = RawConfig::from_str("coeffs = 0.5, -1.25e-1, 3\n").unwrap();
        assert_eq!(
            cfg.opt_f64_list("coeffs").unwrap().unwrap(),
            vec![0.5, -0.125, 3.0]
        );
    }
}

//! Deterministic CSV and JSON emission.
//!
//! CSV: `,` delimiter, `\n` line endings, header always present, floats in
//! Rust's shortest round-trip representation. JSON: UTF-8, pretty-printed,
//! keys in lexicographic order (serde_json's default map is a BTreeMap);
//! non-finite floats become `null`. Identical inputs therefore produce
//! byte-identical files.

use serde_json::{Map, Value};
use std::path::Path;

/// One CSV cell; floats go through shortest round-trip formatting.
pub enum Cell {
    Float(f64),
    Int(i64),
    Str(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            lines: vec![header.join(",")],
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        let line = cells
            .iter()
            .map(|c| match c {
                Cell::Float(v) => fmt_f64(*v),
                Cell::Int(v) => format!("{v}"),
                Cell::Str(s) => s.clone(),
            })
            .collect::<Vec<_>>()
            .join(",");
        self.lines.push(line);
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.render())
    }
}

/// Shortest round-trip decimal, same renderer JSON numbers use, so CSV and
/// JSON spell every float identically.
pub fn fmt_f64(v: f64) -> String {
    match serde_json::Number::from_f64(v) {
        Some(n) => n.to_string(),
        None => format!("{v}"),
    }
}

/// JSON number that degrades to `null` for non-finite values (e.g. the
/// unbounded massless Compton bound).
pub fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn json_opt_f64(v: Option<f64>) -> Value {
    v.map_or(Value::Null, json_f64)
}

/// Builder for objects; keys end up sorted by the underlying BTreeMap.
pub struct Obj(Map<String, Value>);

impl Obj {
    pub fn new() -> Self {
        Obj(Map::new())
    }

    pub fn f64(mut self, key: &str, v: f64) -> Self {
        self.0.insert(key.into(), json_f64(v));
        self
    }

    pub fn opt_f64(mut self, key: &str, v: Option<f64>) -> Self {
        self.0.insert(key.into(), json_opt_f64(v));
        self
    }

    pub fn int(mut self, key: &str, v: usize) -> Self {
        self.0.insert(key.into(), Value::from(v as u64));
        self
    }

    pub fn bool(mut self, key: &str, v: bool) -> Self {
        self.0.insert(key.into(), Value::Bool(v));
        self
    }

    pub fn str(mut self, key: &str, v: &str) -> Self {
        self.0.insert(key.into(), Value::String(v.into()));
        self
    }

    pub fn value(mut self, key: &str, v: Value) -> Self {
        self.0.insert(key.into(), v);
        self
    }

    pub fn build(self) -> Value {
        Value::Object(self.0)
    }
}

pub fn write_json(path: &Path, value: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    std::fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_shortest_round_trip_floats() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.row(vec![Cell::Float(0.1), Cell::Float(1.0)]);
        csv.row(vec![Cell::Float(1.0 / 3.0), Cell::Int(7)]);
        csv.row(vec![Cell::Float(4.0468203531098015e-21), Cell::Int(0)]);
        let text = csv.render();
        assert_eq!(
            text,
            "a,b\n0.1,1.0\n0.3333333333333333,7\n4.0468203531098015e-21,0\n"
        );
        // Round-trip exactness.
        for (token, want) in [
            ("0.1", 0.1),
            ("0.3333333333333333", 1.0 / 3.0),
            ("4.0468203531098015e-21", 4.0468203531098015e-21),
        ] {
            assert_eq!(token.parse::<f64>().unwrap(), want);
        }
    }

    #[test]
    fn json_sorts_keys_and_nulls_non_finite() {
        let v = Obj::new()
            .f64("zeta", 1.5)
            .f64("alpha", f64::INFINITY)
            .int("mid", 3)
            .build();
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(text, r#"{"alpha":null,"mid":3,"zeta":1.5}"#);
    }
}

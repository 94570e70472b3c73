//! Report tree with a human rendering and a JSON rendering.
//!
//! Numbers are kept exact; the JSON form writes each one as
//! `{"exact": "5/3", "decimal": 1.6666666666666667}`.

use std::fmt::Write as _;

use game_miner::Scalar;
use serde_json::{json, Map};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(Scalar),
    Int(i64),
    Bool(bool),
    Text(String),
    List(Vec<Value>),
    Map(Vec<(String, Value)>),
    Null,
}

impl From<Scalar> for Value {
    fn from(v: Scalar) -> Self {
        Value::Num(v)
    }
}

impl From<&Scalar> for Value {
    fn from(v: &Scalar) -> Self {
        Value::Num(v.clone())
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Int(v.into())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Null, Into::into)
    }
}

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(v: Vec<T>) -> Self {
        Value::List(v.into_iter().map(Into::into).collect())
    }
}

/// Ordered key/value builder.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Fields(Vec<(String, Value)>);

impl Fields {
    pub fn new() -> Self {
        Fields(Vec::new())
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.0.push((key.to_string(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

impl From<Fields> for Value {
    fn from(f: Fields) -> Self {
        Value::Map(f.0)
    }
}

impl Value {
    pub fn get(&self, key: &str) -> Option<&Value> {
        match self {
            Value::Map(m) => m.iter().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<&Scalar> {
        match self {
            Value::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(t) => Some(t),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Num(n) => json!({ "exact": n.to_string(), "decimal": n.to_f64() }),
            Value::Int(i) => json!(i),
            Value::Bool(b) => json!(b),
            Value::Text(t) => json!(t),
            Value::List(items) => serde_json::Value::Array(items.iter().map(Value::to_json).collect()),
            Value::Map(entries) => {
                let mut m = Map::new();
                for (k, v) in entries {
                    m.insert(k.clone(), v.to_json());
                }
                serde_json::Value::Object(m)
            }
            Value::Null => serde_json::Value::Null,
        }
    }

    fn inline(&self) -> Option<String> {
        match self {
            Value::Num(n) if n.is_integer() => Some(n.to_string()),
            Value::Num(n) => Some(format!("{n} (~{:.6})", n.to_f64())),
            Value::Int(i) => Some(i.to_string()),
            Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
            Value::Text(t) => Some(t.clone()),
            Value::Null => Some("-".into()),
            Value::List(items) if items.is_empty() => Some("(none)".into()),
            Value::List(items) if items.iter().all(|v| matches!(v, Value::Num(_) | Value::Int(_) | Value::Text(_))) => {
                let parts: Vec<String> = items.iter().map(|v| v.inline().expect("scalar item")).collect();
                let joined = parts.join(", ");
                (joined.len() <= 100 && !parts.iter().any(|p| p.contains(", "))).then_some(joined)
            }
            _ => None,
        }
    }

    fn render(&self, out: &mut String, indent: usize) {
        let pad = " ".repeat(indent);
        match self {
            Value::Map(entries) => {
                let width = entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in entries {
                    match v.inline() {
                        Some(s) => {
                            let _ = writeln!(out, "{pad}{k:<width$}  {s}");
                        }
                        None => {
                            let _ = writeln!(out, "{pad}{k}:");
                            v.render(out, indent + 2);
                        }
                    }
                }
            }
            Value::List(items) => {
                for (i, v) in items.iter().enumerate() {
                    match v.inline() {
                        Some(s) => {
                            let _ = writeln!(out, "{pad}- {s}");
                        }
                        None => {
                            let _ = writeln!(out, "{pad}[{}]", i + 1);
                            v.render(out, indent + 2);
                        }
                    }
                }
            }
            other => {
                let _ = writeln!(out, "{pad}{}", other.inline().expect("scalar"));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub sections: Vec<(String, Value)>,
    /// Failed internal checks; a nonempty list makes the command fail.
    pub violations: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_string(),
            sections: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn section(&mut self, title: &str, value: impl Into<Value>) {
        self.sections.push((title.to_string(), value.into()));
    }

    pub fn get(&self, title: &str) -> Option<&Value> {
        self.sections.iter().find(|(t, _)| t == title).map(|(_, v)| v)
    }

    /// Records a named check; failures are also listed as violations.
    pub fn check(&mut self, checks: &mut Fields, name: &str, ok: bool) {
        checks.push(name, ok);
        if !ok {
            self.violations.push(name.to_string());
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut sections = Map::new();
        for (t, v) in &self.sections {
            sections.insert(t.clone(), v.to_json());
        }
        json!({
            "command": self.command,
            "sections": sections,
            "violations": self.violations,
        })
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n"
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        for (title, value) in &self.sections {
            let _ = writeln!(out, "== {title} ==");
            match value.inline() {
                Some(s) => {
                    let _ = writeln!(out, "  {s}");
                }
                None => value.render(&mut out, 2),
            }
            out.push('\n');
        }
        if !self.violations.is_empty() {
            let _ = writeln!(out, "FAILED CHECKS: {}", self.violations.join(", "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use game_miner::q;

    #[test]
    fn numbers_render_exactly() {
        let mut r = Report::new("t");
        r.section("x", Fields::new().with("value", q("5/3")).with("n", 3usize));
        let j = r.to_json();
        assert_eq!(j["sections"]["x"]["value"]["exact"], "5/3");
        assert!((j["sections"]["x"]["value"]["decimal"].as_f64().unwrap() - 5.0 / 3.0).abs() < 1e-12);
        let h = r.render_human();
        assert!(h.contains("value  5/3 (~1.666667)"), "{h}");
    }
}

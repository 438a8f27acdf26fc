//! Deterministic text and JSON rendering of command results.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::Format;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// A solver proved or reported that no solution exists.
    Obstructed,
    /// An identity or expected verdict failed.
    Violation,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Obstructed | Status::Violation => 1,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Obstructed => "obstructed",
            Status::Violation => "violation",
        }
    }
}

/// Ordered key/value report for one command.
#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    status: Status,
    fields: Map<String, Value>,
}

const KEY_WIDTH: usize = 18;

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            status: Status::Ok,
            fields: Map::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.fields.insert(key.to_string(), v);
        self
    }

    /// Copies every field of a serializable struct into the report.
    pub fn merge(&mut self, value: impl Serialize) -> &mut Self {
        match serde_json::to_value(value).expect("report values serialize") {
            Value::Object(m) => self.fields.extend(m),
            other => panic!("merge expects a struct, got {other}"),
        }
        self
    }

    pub fn set_display(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.set(key, value.to_string())
    }

    pub fn status(&mut self, s: Status) -> &mut Self {
        self.status = s;
        self
    }

    pub fn get_status(&self) -> Status {
        self.status
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), Value::from(SCHEMA_VERSION));
        m.insert("command".into(), Value::from(self.command.clone()));
        m.insert("status".into(), Value::from(self.status.as_str()));
        for (k, v) in &self.fields {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                line(&mut out, "command", &self.command);
                line(&mut out, "status", self.status.as_str());
                for (k, v) in &self.fields {
                    text_value(&mut out, k, v, 0);
                }
                out
            }
        }
    }
}

fn line(out: &mut String, key: &str, value: &str) {
    let pad = KEY_WIDTH.max(key.chars().count() + 1);
    out.push_str(&format!("{key:<pad$}{value}\n"));
}

fn text_value(out: &mut String, key: &str, v: &Value, indent: usize) {
    let key = format!("{}{key}", "  ".repeat(indent));
    match v {
        Value::String(s) => line(out, &key, s),
        Value::Null => line(out, &key, "-"),
        Value::Object(m) if !m.is_empty() => {
            line(out, &key, "");
            for (k, v) in m {
                text_value(out, k, v, indent + 1);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object()) => {
            line(out, &key, "");
            for (i, item) in items.iter().enumerate() {
                text_value(out, &format!("[{i}]"), item, indent + 1);
            }
        }
        other => line(out, &key, &other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_carries_schema_first() {
        let mut r = Report::new("jacobi");
        r.set("certified", true);
        let j = r.render(Format::Json);
        assert!(j.starts_with("{\n  \"schema\": 1,\n  \"command\": \"jacobi\""));
    }

    #[test]
    fn text_is_fixed_width() {
        let mut r = Report::new("star");
        r.set("product", "x*y + 1/2*h").status(Status::Obstructed);
        assert_eq!(
            r.render(Format::Text),
            "command           star\nstatus            obstructed\nproduct           x*y + 1/2*h\n"
        );
        assert_eq!(r.get_status().exit_code(), 1);
    }
}

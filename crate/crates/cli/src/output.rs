use std::process::ExitCode;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use collatz_core::sufficiency::CheckConfig;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Dot => "dot",
            Format::Text => "text",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Negative = 1,
    Undetermined = 2,
    Usage = 3,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

pub enum Body {
    Json(Value),
    Text(String),
}

pub struct Rendered {
    pub format: Format,
    pub body: Body,
    pub status: Status,
}

impl Rendered {
    pub fn json(format: Format, value: Value, status: Status) -> Self {
        Rendered { format, body: Body::Json(value), status }
    }

    pub fn text(format: Format, text: String, status: Status) -> Self {
        Rendered { format, body: Body::Text(text), status }
    }

    /// The body with the metadata block in front, in whatever form the format allows.
    pub fn finish(&self, meta: &Value) -> String {
        match &self.body {
            Body::Json(v) => {
                let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "result": v }))
                    .expect("json values serialize");
                s.push('\n');
                s
            }
            Body::Text(t) => {
                let prefix = match self.format {
                    Format::Dot => "// ",
                    _ => "# ",
                };
                let mut s = String::new();
                for line in meta_lines(meta) {
                    s.push_str(prefix);
                    s.push_str(&line);
                    s.push('\n');
                }
                s.push_str(t);
                if !t.ends_with('\n') {
                    s.push('\n');
                }
                s
            }
        }
    }
}

pub fn meta<C: Serialize>(command: &C, cfg: &CheckConfig) -> Value {
    let mut args = serde_json::to_value(command).expect("arguments serialize");
    let name = args
        .as_object_mut()
        .and_then(|o| o.remove("command"))
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default();
    json!({
        "tool": "collatz",
        "version": env!("CARGO_PKG_VERSION"),
        "schema": SCHEMA,
        "command": name,
        "args": args,
        "config": cfg,
    })
}

fn meta_lines(meta: &Value) -> Vec<String> {
    let field = |k: &str| meta.get(k).map(|v| v.to_string()).unwrap_or_default();
    vec![
        format!("collatz {} schema {}", meta["version"].as_str().unwrap_or(""), field("schema")),
        format!("command {} {}", meta["command"].as_str().unwrap_or(""), field("args")),
        format!("config {}", field("config")),
    ]
}

/// Quotes a CSV field when it needs it.
pub fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

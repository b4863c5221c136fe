use std::io::Write;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// An ordered list of named values printed as `key: value` lines, one JSON
/// object, or a header plus one CSV row.
#[derive(Default)]
pub struct Record {
    fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.push((key.to_string(), value.into()));
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.fields.iter().cloned().collect::<Map<String, Value>>())
    }

    pub fn print(&self, format: Format) -> anyhow::Result<()> {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        match format {
            Format::Text => {
                for (key, value) in &self.fields {
                    writeln!(out, "{key}: {}", plain(value))?;
                }
            }
            Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&self.to_json())?)?,
            Format::Csv => {
                let mut writer = csv::Writer::from_writer(out);
                writer.write_record(self.fields.iter().map(|(k, _)| k.as_str()))?;
                writer.write_record(self.fields.iter().map(|(_, v)| plain(v)))?;
                writer.flush()?;
            }
        }
        Ok(())
    }
}

/// Strings without quotes, null as empty, everything else as JSON text.
pub fn plain(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

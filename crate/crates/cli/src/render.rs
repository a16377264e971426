use serde::Serialize;

use crate::Format;

/// One command result in all three output formats.
pub struct Rendered {
    pub json: String,
    pub csv: String,
    pub text: String,
}

impl Rendered {
    pub fn new<T: Serialize>(value: &T, csv: String, text: String) -> Self {
        let json = serde_json::to_string(value).expect("output types serialize");
        Rendered { json, csv, text }
    }

    pub fn select(self, format: Format) -> String {
        let mut out = match format {
            Format::Json => self.json,
            Format::Csv => self.csv,
            Format::Text => self.text,
        };
        if !out.ends_with('\n') {
            out.push('\n');
        }
        out
    }
}

/// `header` followed by one line per row.
pub fn csv<I, R>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: std::fmt::Display,
{
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_string());
        out.push('\n');
    }
    out
}

pub fn join<T: std::fmt::Display>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

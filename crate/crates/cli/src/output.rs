//! Rendering of command results as JSON, CSV, or aligned text.

use serde_json::Value;

use crate::config::Format;

/// How a command finished.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Some requested degree is not certified at the current bounds.
    Inconclusive,
    /// A computed result contradicts an independent check.
    Violation,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Inconclusive => 2,
            Status::Violation => 3,
        }
    }
}

/// A command result: a JSON document and a flat table view.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub status: Status,
}

impl Report {
    pub fn new(json: Value, header: &[&str], rows: Vec<Vec<String>>, status: Status) -> Self {
        Report { json, header: header.iter().map(|s| s.to_string()).collect(), rows, status }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for row in &self.rows {
                    s.push_str(&row.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                s
            }
            Format::Table => {
                let widths: Vec<usize> = (0..self.header.len())
                    .map(|i| {
                        self.rows
                            .iter()
                            .map(|r| r.get(i).map_or(0, |c| c.chars().count()))
                            .chain(std::iter::once(self.header[i].chars().count()))
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |cells: &[String]| {
                    let mut out = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ");
                    out.truncate(out.trim_end().len());
                    out.push('\n');
                    out
                };
                let mut s = line(&self.header);
                for row in &self.rows {
                    s.push_str(&line(row));
                }
                s
            }
        }
    }
}

fn csv_field(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// Rows `degree, value...` for graded data.
pub fn graded_rows(columns: &[&[String]]) -> Vec<Vec<String>> {
    let len = columns.iter().map(|c| c.len()).max().unwrap_or(0);
    (0..len)
        .map(|k| {
            let mut row = vec![k.to_string()];
            row.extend(columns.iter().map(|c| c.get(k).cloned().unwrap_or_default()));
            row
        })
        .collect()
}

pub fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

//! Rendering of command results as aligned text, CSV or JSON.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Result of a command, renderable in every format.
pub enum Report {
    /// Ordered key/value pairs.
    Record { fields: Vec<(String, String)>, json: Value },
    /// Header plus rows.
    Rows { header: Vec<String>, rows: Vec<Vec<String>>, json: Value },
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Self::Record { json, .. } | Self::Rows { json, .. }, Format::Json) => {
                let mut s = serde_json::to_string_pretty(json).expect("reports are valid JSON");
                s.push('\n');
                s
            }
            (Self::Record { fields, .. }, Format::Table) => {
                let width = fields.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
                let mut s = String::new();
                for (k, v) in fields {
                    let _ = writeln!(s, "{}", format!("{k:<width$}  {v}").trim_end());
                }
                s
            }
            (Self::Record { fields, .. }, Format::Csv) => {
                let mut rows = vec![vec!["key".to_string(), "value".to_string()]];
                rows.extend(fields.iter().map(|(k, v)| vec![k.clone(), v.clone()]));
                csv_text(&rows)
            }
            (Self::Rows { header, rows, .. }, Format::Table) => {
                let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
                for row in rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.chars().count());
                    }
                }
                let mut s = String::new();
                for row in std::iter::once(header).chain(rows) {
                    let line: Vec<String> =
                        row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                    let _ = writeln!(s, "{}", line.join("  ").trim_end());
                }
                s
            }
            (Self::Rows { header, rows, .. }, Format::Csv) => {
                let all: Vec<Vec<String>> = std::iter::once(header.clone()).chain(rows.iter().cloned()).collect();
                csv_text(&all)
            }
        }
    }
}

fn csv_text(rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("cells are UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 0.6000000000000001, 1.0, 1e-20, 2.0 / 3.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.6), "0.6");
    }

    #[test]
    fn csv_quotes_commas() {
        let r = Report::Rows {
            header: vec!["a".into(), "b".into()],
            rows: vec![vec!["x,y".into(), "1".into()]],
            json: Value::Null,
        };
        assert_eq!(r.render(Format::Csv), "a,b\n\"x,y\",1\n");
        assert_eq!(r.render(Format::Table), "a    b\nx,y  1\n");
    }
}

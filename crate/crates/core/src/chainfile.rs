//! Text format for chains.
//!
//! A chain file is a JSON document in one of two shapes:
//!
//! ```text
//! {"states": ["a", "b"],
//!  "rows": {"a": {"a": "0.5", "b": "0.5"},
//!           "b": {"a": "1/5", "b": "4/5"}}}
//!
//! {"gallery": "two-state", "params": ["0.5", "0.2"]}
//! ```
//!
//! Probabilities are decimal or `p/q` strings (JSON numbers are accepted
//! too). Missing row entries are zero.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::chain::FiniteChain;
use crate::gallery::{build, GalleryChain};
use crate::scalar::Scalar;

/// Parse or validation failure, anchored to a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainFileError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ChainFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ChainFileError {}

#[derive(Deserialize)]
#[serde(untagged)]
enum Prob {
    Text(String),
    Number(serde_json::Number),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Document {
    Explicit(Explicit),
    Named(Named),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Explicit {
    states: Vec<String>,
    rows: BTreeMap<String, BTreeMap<String, Prob>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Named {
    gallery: String,
    #[serde(default)]
    params: Vec<String>,
}

/// Line and column of the first occurrence of `needle` at or after `from`,
/// or the start of the document.
fn locate(text: &str, needle: &str, from: usize) -> (usize, usize) {
    let Some(off) = text.get(from..).and_then(|t| t.find(needle)).map(|o| o + from) else {
        return (1, 1);
    };
    let before = &text[..off];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(off, |nl| off - nl - 1) + 1;
    (line, column)
}

fn offset_of(text: &str, needle: &str, from: usize) -> usize {
    text.get(from..).and_then(|t| t.find(needle)).map_or(from, |o| o + from)
}

/// Position of `"key"` used as an object key that opens a nested object.
fn key_offset(text: &str, key: &str, from: usize) -> usize {
    let needle = format!("\"{key}\"");
    let mut pos = from;
    while let Some(off) = text.get(pos..).and_then(|t| t.find(&needle)) {
        let start = pos + off;
        let rest = text[start + needle.len()..].trim_start();
        if rest.strip_prefix(':').is_some_and(|r| r.trim_start().starts_with('{')) {
            return start;
        }
        pos = start + needle.len();
    }
    from
}

fn at(text: &str, needle: &str, from: usize, message: String) -> ChainFileError {
    let (line, column) = locate(text, needle, from);
    ChainFileError { line, column, message }
}

pub fn parse_chain<S: Scalar>(text: &str) -> Result<GalleryChain<S>, ChainFileError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ChainFileError {
        line: e.line().max(1),
        column: e.column().max(1),
        message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
    })?;
    let doc: Document = serde_json::from_value(value).map_err(|_| ChainFileError {
        line: 1,
        column: 1,
        message: "expected an object with `states` and `rows`, or with `gallery` and optional `params`"
            .into(),
    })?;
    match doc {
        Document::Named(n) => {
            let params: Vec<&str> = n.params.iter().map(String::as_str).collect();
            build(&n.gallery, &params).map_err(|e| at(text, &format!("\"{}\"", n.gallery), 0, e.to_string()))
        }
        Document::Explicit(ex) => parse_explicit(text, ex).map(GalleryChain::Finite),
    }
}

fn parse_explicit<S: Scalar>(text: &str, ex: Explicit) -> Result<FiniteChain<S>, ChainFileError> {
    let states_at = offset_of(text, "\"states\"", 0);
    let rows_at = offset_of(text, "\"rows\"", 0);
    if ex.states.is_empty() {
        return Err(at(text, "\"states\"", 0, "`states` is empty".into()));
    }
    for (i, s) in ex.states.iter().enumerate() {
        if ex.states[..i].contains(s) {
            let first = offset_of(text, &format!("\"{s}\""), states_at);
            return Err(at(text, &format!("\"{s}\""), first + 1, format!("duplicate state `{s}`")));
        }
    }
    let mut rows = Vec::with_capacity(ex.rows.len());
    for (from, entries) in &ex.rows {
        let from_at = key_offset(text, from, rows_at);
        if !ex.states.contains(from) {
            return Err(at(text, &format!("\"{from}\""), rows_at, format!("row for unknown state `{from}`")));
        }
        let mut row = Vec::with_capacity(entries.len());
        for (to, p) in entries {
            let raw = match p {
                Prob::Text(t) => t.clone(),
                Prob::Number(n) => n.to_string(),
            };
            let anchor = format!("\"{to}\"");
            if !ex.states.contains(to) {
                return Err(at(text, &anchor, from_at + 1, format!("row `{from}`: unknown target `{to}`")));
            }
            let value = S::parse_decimal(raw.trim()).ok_or_else(|| {
                at(text, &anchor, from_at + 1, format!("row `{from}`: `{raw}` is not a probability"))
            })?;
            row.push((to.clone(), value));
        }
        rows.push((from.clone(), row));
    }
    for s in &ex.states {
        if !ex.rows.contains_key(s) {
            return Err(at(text, "\"rows\"", 0, format!("missing row for state `{s}`")));
        }
    }
    FiniteChain::from_labeled(ex.states.clone(), rows).map_err(|e| {
        // Messages name the offending row first, in backticks.
        let msg = e.to_string();
        match msg.split('`').nth(1) {
            Some(row) => at(text, &format!("\"{row}\""), key_offset(text, row, rows_at), msg),
            None => at(text, "\"rows\"", 0, msg),
        }
    })
}

/// Reads and parses a chain file; I/O failures are reported at line 1.
pub fn load_chain<S: Scalar>(path: &Path) -> Result<GalleryChain<S>, ChainFileError> {
    let text = std::fs::read_to_string(path).map_err(|e| ChainFileError {
        line: 1,
        column: 1,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_chain(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BigRational;

    const CHAIN_A: &str = r#"{
  "states": ["a", "b"],
  "rows": {
    "a": {"a": "0.5", "b": "0.5"},
    "b": {"a": "1/5", "b": 0.8}
  }
}"#;

    #[test]
    fn parses_explicit() {
        let c = parse_chain::<f64>(CHAIN_A).unwrap();
        let c = c.finite().unwrap();
        assert_eq!(c.labels(), &["a".to_string(), "b".to_string()]);
        assert_eq!(c.prob(1, 0), 0.2);
        let exact = parse_chain::<BigRational>(CHAIN_A).unwrap();
        assert_eq!(exact.finite().unwrap().prob(1, 1).to_string(), "4/5");
    }

    #[test]
    fn parses_gallery_reference() {
        let c = parse_chain::<f64>(r#"{"gallery": "swap"}"#).unwrap();
        assert_eq!(c.finite().unwrap().len(), 2);
        assert!(parse_chain::<f64>(r#"{"gallery": "nope"}"#).is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse_chain::<f64>("{\n  \"states\": [\"a\",\n  ]\n}").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn bad_row_sum_points_at_row() {
        let text = CHAIN_A.replace("\"1/5\"", "\"0.3\"");
        let e = parse_chain::<f64>(&text).unwrap_err();
        assert_eq!(e.line, 5, "{e}");
    }

    #[test]
    fn unknown_target_points_at_entry() {
        let text = CHAIN_A.replace("\"b\": 0.8", "\"c\": 0.8");
        let e = parse_chain::<f64>(&text).unwrap_err();
        assert_eq!((e.line, e.message.contains("unknown target")), (5, true), "{e}");
    }

    #[test]
    fn missing_row() {
        let text = r#"{"states": ["a", "b"], "rows": {"a": {"a": "1"}}}"#;
        assert!(parse_chain::<f64>(text).unwrap_err().message.contains("missing row"));
    }
}

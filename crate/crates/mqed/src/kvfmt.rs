//! Flat key-value configuration text: INI-style sections of `key = value`
//! lines, with `#`/`;` comments, repeated keys, and nothing else. This is
//! the on-disk format of the batch-runner configuration; keeping the parser
//! here lets library tests round-trip model and structure definitions.

use crate::error::{Error, Result};

/// One `[section]` with its entries in file order. Repeated keys are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    /// Full header text between the brackets, e.g. `model lorentz`.
    pub name: String,
    pub entries: Vec<(String, String)>,
}

impl Section {
    /// The first value for `key`, if present.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Every value for `key`, in file order.
    pub fn get_all(&self, key: &str) -> Vec<&str> {
        self.entries.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()).collect()
    }

    /// The first value for `key`, or a diagnostic naming section and key.
    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| {
            Error::InvalidInput(format!("section [{}] is missing key '{key}'", self.name))
        })
    }

    /// Parses the first value for `key` as an `f64`.
    pub fn require_f64(&self, key: &str) -> Result<f64> {
        parse_f64(&self.name, key, self.require(key)?)
    }

    /// Parses the first value for `key` as a `usize`.
    pub fn require_usize(&self, key: &str) -> Result<usize> {
        let v = self.require(key)?;
        v.parse().map_err(|_| {
            Error::InvalidInput(format!(
                "section [{}] key '{key}': '{v}' is not a non-negative integer",
                self.name
            ))
        })
    }
}

fn parse_f64(section: &str, key: &str, v: &str) -> Result<f64> {
    v.parse().map_err(|_| {
        Error::InvalidInput(format!("section [{section}] key '{key}': '{v}' is not a number"))
    })
}

/// Splits a whitespace-separated value into `f64` fields.
pub fn parse_f64_fields(section: &str, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split_whitespace().map(|tok| parse_f64(section, key, tok)).collect()
}

/// Parses flat key-value text into its sections. Lines before the first
/// header must be blank or comments; headers may not repeat.
pub fn parse(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find(['#', ';']) {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let name = header
                .strip_suffix(']')
                .ok_or_else(|| {
                    Error::InvalidInput(format!("line {}: unterminated section header", lineno + 1))
                })?
                .trim();
            if name.is_empty() {
                return Err(Error::InvalidInput(format!("line {}: empty section name", lineno + 1)));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(Error::InvalidInput(format!(
                    "line {}: duplicate section [{name}]",
                    lineno + 1
                )));
            }
            sections.push(Section { name: name.to_string(), entries: Vec::new() });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!("line {}: expected 'key = value' or '[section]'", lineno + 1))
        })?;
        let section = sections.last_mut().ok_or_else(|| {
            Error::InvalidInput(format!("line {}: entry before any section header", lineno + 1))
        })?;
        section.entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(sections)
}

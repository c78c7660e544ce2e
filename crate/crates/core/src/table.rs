//! Minimal comma-separated table reading for the pipeline's flat files.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One data row with its 1-based line number, for error locations.
pub struct Row<'a> {
    pub line: usize,
    fields: Vec<&'a str>,
}

impl<'a> Row<'a> {
    pub fn str(&self, i: usize) -> Result<&'a str> {
        self.fields
            .get(i)
            .map(|f| f.trim())
            .ok_or_else(|| Error::parse(format!("line {}", self.line), format!("missing field {}", i + 1)))
    }

    pub fn parse<T: FromStr>(&self, i: usize) -> Result<T> {
        let raw = self.str(i)?;
        raw.parse()
            .map_err(|_| Error::parse(format!("line {}", self.line), format!("cannot parse field {} ({raw:?})", i + 1)))
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}

/// Splits comma-separated text into rows, skipping blank lines and a header
/// row whose first field equals `header`.
pub fn rows<'a>(input: &'a str, header: &str) -> Vec<Row<'a>> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| Row {
            line: i + 1,
            fields: l.split(',').collect(),
        })
        .filter(|r| r.fields.first().map(|f| f.trim()) != Some(header))
        .collect()
}

pub fn read(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    fs::read_to_string(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

/// Rejects identifiers that would break the comma-separated layout.
pub fn check_field(value: &str) -> Result<&str> {
    if value.contains(',') || value.contains('\n') {
        Err(Error::invalid(format!("field {value:?} contains a separator")))
    } else {
        Ok(value)
    }
}

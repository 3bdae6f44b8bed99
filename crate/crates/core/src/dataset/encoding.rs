use std::collections::HashMap;
use std::fmt::Write as _;

use super::{map_label, AttackClass, Dataset, DatasetError, RawRecord};
use crate::NUM_FEATURES;

/// How one input column is turned into a number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnCoding {
    Numeric,
    /// Distinct values in code order: `values[code]` is the string for `code`.
    Categorical {
        values: Vec<String>,
        codes: HashMap<String, usize>,
    },
}

/// Per-column string-to-code maps fitted on one set of records.
///
/// Codes are assigned in first-occurrence order starting at 0. Values never
/// seen during fitting encode to the reserved code `values.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingTable {
    columns: Vec<ColumnCoding>,
    fitted_on: String,
}

impl EncodingTable {
    pub fn columns(&self) -> &[ColumnCoding] {
        &self.columns
    }

    pub fn fitted_on(&self) -> &str {
        &self.fitted_on
    }

    pub fn set_fitted_on(&mut self, name: impl Into<String>) {
        self.fitted_on = name.into();
    }

    pub fn categorical_columns(&self) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, ColumnCoding::Categorical { .. }))
            .map(|(i, _)| i)
            .collect()
    }

    /// Code for `value` in `column`; `None` for numeric columns.
    pub fn code(&self, column: usize, value: &str) -> Option<usize> {
        match &self.columns[column] {
            ColumnCoding::Numeric => None,
            ColumnCoding::Categorical { values, codes } => {
                Some(codes.get(value).copied().unwrap_or(values.len()))
            }
        }
    }

    /// Inverse lookup; `None` for numeric columns and the reserved code.
    pub fn decode(&self, column: usize, code: usize) -> Option<&str> {
        match &self.columns[column] {
            ColumnCoding::Numeric => None,
            ColumnCoding::Categorical { values, .. } => values.get(code).map(String::as_str),
        }
    }

    /// Human-readable `key=value` dump, one entry per line.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "encoding.fitted_on={}", self.fitted_on);
        let _ = writeln!(out, "encoding.columns={}", self.columns.len());
        for (i, col) in self.columns.iter().enumerate() {
            match col {
                ColumnCoding::Numeric => {
                    let _ = writeln!(out, "column.{i}.kind=numeric");
                }
                ColumnCoding::Categorical { values, .. } => {
                    let _ = writeln!(out, "column.{i}.kind=categorical");
                    let _ = writeln!(out, "column.{i}.reserved_code={}", values.len());
                    for (code, v) in values.iter().enumerate() {
                        let _ = writeln!(out, "column.{i}.code.{code}={v}");
                    }
                }
            }
        }
        out
    }
}

/// Fits per-column codes. A column is categorical when any of its values
/// fails to parse as a number.
pub fn fit_encoding(records: &[RawRecord]) -> Result<EncodingTable, DatasetError> {
    if records.is_empty() {
        return Err(DatasetError::Empty);
    }
    let n_cols = records[0].fields.len();
    if let Some((row, r)) = records
        .iter()
        .enumerate()
        .find(|(_, r)| r.fields.len() != n_cols)
    {
        return Err(DatasetError::Shape(format!(
            "record {row} has {} fields, expected {n_cols}",
            r.fields.len()
        )));
    }
    let columns = (0..n_cols)
        .map(|c| {
            let categorical = records.iter().any(|r| r.fields[c].parse::<f64>().is_err());
            if !categorical {
                return ColumnCoding::Numeric;
            }
            let mut values = Vec::new();
            let mut codes = HashMap::new();
            for r in records {
                let v = &r.fields[c];
                if !codes.contains_key(v) {
                    codes.insert(v.clone(), values.len());
                    values.push(v.clone());
                }
            }
            ColumnCoding::Categorical { values, codes }
        })
        .collect();
    Ok(EncodingTable {
        columns,
        fitted_on: format!("{} records", records.len()),
    })
}

/// Encodes records into an (unnormalized) dataset over the five traffic classes.
pub fn encode(records: &[RawRecord], table: &EncodingTable) -> Result<Dataset, DatasetError> {
    let n_cols = table.columns.len();
    let mut values = Vec::with_capacity(records.len() * n_cols);
    let mut labels = Vec::with_capacity(records.len());
    for (row, r) in records.iter().enumerate() {
        if r.fields.len() != n_cols {
            return Err(DatasetError::Shape(format!(
                "record {row} has {} fields, table expects {n_cols}",
                r.fields.len()
            )));
        }
        for (column, (raw, coding)) in r.fields.iter().zip(&table.columns).enumerate() {
            let v = match coding {
                ColumnCoding::Numeric => {
                    raw.parse::<f64>().map_err(|_| DatasetError::NonNumeric {
                        row,
                        column,
                        value: raw.clone(),
                    })?
                }
                ColumnCoding::Categorical { values, codes } => {
                    codes.get(raw).copied().unwrap_or(values.len()) as f64
                }
            };
            values.push(v);
        }
        labels.push(map_label(&r.label)?.index());
    }
    if n_cols != NUM_FEATURES {
        log::debug!("encoding {n_cols} columns instead of the NSL-KDD {NUM_FEATURES}");
    }
    Dataset::new(values, n_cols, labels, AttackClass::names())
}

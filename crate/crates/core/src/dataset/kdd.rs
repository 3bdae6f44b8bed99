use std::io::BufRead;

use super::DatasetError;
use crate::NUM_FEATURES;

/// Column names of the 41 NSL-KDD connection features, in file order.
pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
];

/// One connection record as read from the file, before any encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    pub fields: Vec<String>,
    pub label: String,
    pub difficulty: Option<i64>,
}

impl RawRecord {
    /// Renders the record back into NSL-KDD line form (no trailing newline).
    pub fn to_line(&self) -> String {
        let mut line = self.fields.join(",");
        line.push(',');
        line.push_str(&self.label);
        if let Some(d) = self.difficulty {
            line.push(',');
            line.push_str(&d.to_string());
        }
        line
    }
}

/// Parses NSL-KDD lines (42 or 43 comma-separated fields, no header).
///
/// Blank lines and lines starting with `#` are skipped. Line numbers in
/// errors are 1-based.
pub fn parse_kdd<R: BufRead>(reader: R) -> Result<Vec<RawRecord>, DatasetError> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| DatasetError::Io(format!("line {line_no}: {e}")))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        records.push(parse_line(line, line_no)?);
    }
    Ok(records)
}

/// Convenience wrapper over [`parse_kdd`] for in-memory text.
pub fn parse_kdd_str(text: &str) -> Result<Vec<RawRecord>, DatasetError> {
    parse_kdd(text.as_bytes())
}

fn parse_line(line: &str, line_no: usize) -> Result<RawRecord, DatasetError> {
    let parts: Vec<&str> = line.split(',').map(str::trim).collect();
    let difficulty = match parts.len() {
        n if n == NUM_FEATURES + 1 => None,
        n if n == NUM_FEATURES + 2 => {
            let raw = parts[NUM_FEATURES + 1];
            Some(raw.parse::<i64>().map_err(|_| DatasetError::Parse {
                line: line_no,
                message: format!("difficulty column {raw:?} is not an integer"),
            })?)
        }
        n => {
            return Err(DatasetError::Parse {
                line: line_no,
                message: format!(
                    "expected {} or {} fields, found {n}",
                    NUM_FEATURES + 1,
                    NUM_FEATURES + 2
                ),
            })
        }
    };
    Ok(RawRecord {
        fields: parts[..NUM_FEATURES]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        label: parts[NUM_FEATURES].to_string(),
        difficulty,
    })
}

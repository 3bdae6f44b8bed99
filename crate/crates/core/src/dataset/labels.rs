use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::DatasetError;

const CATEGORY_TABLE: &str = include_str!("../../data/attack_categories.v1.txt");

/// The five traffic classes, in the fixed order used for tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AttackClass {
    Normal,
    Dos,
    Probe,
    U2r,
    R2l,
}

impl AttackClass {
    pub const ALL: [AttackClass; 5] = [
        AttackClass::Normal,
        AttackClass::Dos,
        AttackClass::Probe,
        AttackClass::U2r,
        AttackClass::R2l,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            AttackClass::Normal => "Normal",
            AttackClass::Dos => "DoS",
            AttackClass::Probe => "Probe",
            AttackClass::U2r => "U2R",
            AttackClass::R2l => "R2L",
        }
    }

    pub fn names() -> Vec<String> {
        Self::ALL.iter().map(|c| c.name().to_string()).collect()
    }

    fn from_table_token(token: &str) -> Option<Self> {
        match token {
            "normal" => Some(AttackClass::Normal),
            "dos" => Some(AttackClass::Dos),
            "probe" => Some(AttackClass::Probe),
            "u2r" => Some(AttackClass::U2r),
            "r2l" => Some(AttackClass::R2l),
            _ => None,
        }
    }
}

impl fmt::Display for AttackClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

struct CategoryTable {
    version: u32,
    map: HashMap<String, AttackClass>,
}

fn table() -> &'static CategoryTable {
    static TABLE: OnceLock<CategoryTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut version = 0;
        let mut map = HashMap::new();
        for line in CATEGORY_TABLE.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(name), Some(value)) = (parts.next(), parts.next()) else {
                panic!("malformed attack category line: {line}");
            };
            if name == "version" {
                version = value.parse().expect("category table version");
                continue;
            }
            let class = AttackClass::from_table_token(value)
                .unwrap_or_else(|| panic!("unknown category {value} in attack table"));
            map.insert(name.to_string(), class);
        }
        CategoryTable { version, map }
    })
}

/// Version of the shipped attack-name table.
pub fn category_table_version() -> u32 {
    table().version
}

/// Maps an NSL-KDD attack name (or `normal`) to its traffic class.
pub fn map_label(name: &str) -> Result<AttackClass, DatasetError> {
    table()
        .map
        .get(name.trim())
        .copied()
        .ok_or_else(|| DatasetError::UnknownLabel(name.to_string()))
}

/// All attack names known to the shipped table, sorted.
pub fn known_labels() -> Vec<&'static str> {
    let mut names: Vec<&'static str> = table().map.keys().map(String::as_str).collect();
    names.sort_unstable();
    names
}

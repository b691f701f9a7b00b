//! Tab-separated table of reference curves with their expected verdicts.
//!
//! One record per line: label, variant (`jzero`, `j1728`, `cm`), coefficient
//! or fundamental discriminant, conductor (`-` unless `cm`), level, expected
//! structure (`trivial`, comma-separated invariant factors, `S3`, `D4`,
//! `D4xC2`, `nonabelian`) and expected cyclotomic verdict. Lines starting
//! with `#` and blank lines are ignored.

use thiserror::Error;

use crate::classifier::{ClassifierError, CurveInput};

/// The reference table shipped with the crate.
pub const BUILTIN_FIXTURES: &str = include_str!("../data/fixtures.tsv");

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FixtureError {
    #[error("line {line}: expected 7 tab-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: invalid {field} {value:?}")]
    InvalidField {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("line {line}: {source}")]
    Curve {
        line: usize,
        source: ClassifierError,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureRow {
    pub label: String,
    pub curve: CurveInput,
    pub n: u64,
    /// Structure code as produced by `GroupStructure::code`.
    pub expected_structure: String,
    pub expected_cyclotomic: bool,
}

fn field<T: std::str::FromStr>(
    line: usize,
    name: &'static str,
    value: &str,
) -> Result<T, FixtureError> {
    value.parse().map_err(|_| FixtureError::InvalidField {
        line,
        field: name,
        value: value.to_string(),
    })
}

fn valid_structure(code: &str) -> bool {
    matches!(code, "trivial" | "S3" | "D4" | "D4xC2" | "nonabelian")
        || code
            .split(',')
            .all(|f| f.parse::<u64>().is_ok_and(|v| v >= 2))
}

pub fn parse_fixtures(text: &str) -> Result<Vec<FixtureRow>, FixtureError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
        let [label, variant, coeff, conductor, n, structure, cyclotomic] = fields[..] else {
            return Err(FixtureError::FieldCount {
                line,
                found: fields.len(),
            });
        };
        let coeff: i64 = field(line, "coefficient", coeff)?;
        let curve = match variant {
            "jzero" => CurveInput::jzero(coeff),
            "j1728" => CurveInput::j1728(coeff),
            "cm" => CurveInput::general_cm(coeff, field(line, "conductor", conductor)?),
            other => {
                return Err(FixtureError::InvalidField {
                    line,
                    field: "variant",
                    value: other.to_string(),
                })
            }
        }
        .map_err(|source| FixtureError::Curve { line, source })?;
        if !valid_structure(structure) {
            return Err(FixtureError::InvalidField {
                line,
                field: "structure",
                value: structure.to_string(),
            });
        }
        rows.push(FixtureRow {
            label: label.to_string(),
            curve,
            n: field(line, "level", n)?,
            expected_structure: structure.to_string(),
            expected_cyclotomic: field(line, "cyclotomic flag", cyclotomic)?,
        });
    }
    Ok(rows)
}

pub fn builtin_fixtures() -> Vec<FixtureRow> {
    parse_fixtures(BUILTIN_FIXTURES).expect("shipped fixture table parses")
}

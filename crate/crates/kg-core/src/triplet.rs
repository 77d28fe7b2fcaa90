//! Triplet facts and the tab-separated ingestion format.

use std::io::BufRead;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::error::CoreError;

/// A single fact: head entity, relation, tail entity, and an optional
/// day-precision date for temporal facts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triplet {
    pub head: String,
    pub relation: String,
    pub tail: String,
    pub timestamp: Option<NaiveDate>,
}

impl Triplet {
    pub fn new(
        head: impl Into<String>,
        relation: impl Into<String>,
        tail: impl Into<String>,
    ) -> Self {
        Triplet {
            head: head.into(),
            relation: relation.into(),
            tail: tail.into(),
            timestamp: None,
        }
    }

    pub fn with_timestamp(mut self, date: NaiveDate) -> Self {
        self.timestamp = Some(date);
        self
    }

    /// The (head, relation, tail) part without the timestamp.
    pub fn key(&self) -> (&str, &str, &str) {
        (&self.head, &self.relation, &self.tail)
    }
}

/// Order of the three mandatory columns in a triplet file. The optional
/// timestamp is always the fourth column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColumnOrder {
    /// `head \t relation \t tail` (the usual layout).
    #[default]
    HeadRelationTail,
    /// `head \t tail \t relation`.
    HeadTailRelation,
}

impl FromStr for ColumnOrder {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, CoreError> {
        match s {
            "hrt" => Ok(ColumnOrder::HeadRelationTail),
            "htr" => Ok(ColumnOrder::HeadTailRelation),
            other => Err(CoreError::InvalidParameter(format!(
                "unknown column order {other:?} (expected \"hrt\" or \"htr\")"
            ))),
        }
    }
}

/// Parses a tab-separated triplet stream.
///
/// Lines are `head \t relation \t tail [\t YYYY-MM-DD]` (in the given column
/// order). Blank lines and lines whose first non-space character is `#` are
/// skipped. Duplicate lines are kept: the triplet list is a multiset. Fields
/// are trimmed of surrounding whitespace only.
pub fn parse_triplets<R: BufRead>(input: R, order: ColumnOrder) -> Result<Vec<Triplet>, CoreError> {
    let mut triplets = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(CoreError::Parse {
                line: line_no,
                message: format!("expected 3 or 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let (head, relation, tail) = match order {
            ColumnOrder::HeadRelationTail => (fields[0], fields[1], fields[2]),
            ColumnOrder::HeadTailRelation => (fields[0], fields[2], fields[1]),
        };
        let head = head.trim();
        let relation = relation.trim();
        let tail = tail.trim();
        if head.is_empty() || relation.is_empty() || tail.is_empty() {
            return Err(CoreError::Parse {
                line: line_no,
                message: "head, relation, and tail must be non-empty".into(),
            });
        }
        let timestamp = match fields.get(3) {
            None => None,
            Some(raw) => {
                let raw = raw.trim();
                Some(NaiveDate::parse_from_str(raw, "%Y-%m-%d").map_err(|e| {
                    CoreError::Parse {
                        line: line_no,
                        message: format!("bad timestamp {raw:?}: {e}"),
                    }
                })?)
            }
        };
        triplets.push(Triplet {
            head: head.to_string(),
            relation: relation.to_string(),
            tail: tail.to_string(),
            timestamp,
        });
    }
    Ok(triplets)
}

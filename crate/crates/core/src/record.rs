//! Bibliographic record schema, corpus file reading and value normalization.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use flate2::read::GzDecoder;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Inclusive bounds for a plausible publication year.
pub const MIN_YEAR: i32 = 1000;
pub const MAX_YEAR: i32 = 3000;

/// Values treated as placeholders and dropped from categorical fields.
pub const DEFAULT_JUNK_VALUES: &[&str] = &["no entry", "n/a", "-", "unknown"];

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: record has no id")]
    MissingId { line: usize },
    #[error("line {line}: record {id}: year {year} outside [{MIN_YEAR}, {MAX_YEAR}]")]
    YearOutOfRange { line: usize, id: String, year: i64 },
    #[error("line {line}: record {id}: invalid language code {code:?}")]
    InvalidLanguage {
        line: usize,
        id: String,
        code: String,
    },
    #[error("{path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Kind of information item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoType {
    Literature,
    Journal,
    ResearchProject,
    Event,
    Institution,
    Study,
}

impl InfoType {
    pub const ALL: [InfoType; 6] = [
        InfoType::Literature,
        InfoType::Journal,
        InfoType::ResearchProject,
        InfoType::Event,
        InfoType::Institution,
        InfoType::Study,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InfoType::Literature => "literature",
            InfoType::Journal => "journal",
            InfoType::ResearchProject => "research_project",
            InfoType::Event => "event",
            InfoType::Institution => "institution",
            InfoType::Study => "study",
        }
    }
}

impl fmt::Display for InfoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InfoType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded = s.trim().to_lowercase();
        InfoType::ALL
            .into_iter()
            .find(|t| t.as_str() == folded)
            .ok_or_else(|| format!("unknown information type {s:?}"))
    }
}

/// One bibliographic information item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub title: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub persons: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subjects: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub locations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub info_type: Option<InfoType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub database: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub institutions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
}

impl Record {
    /// A record with only an id; everything else absent.
    pub fn new(id: impl Into<String>) -> Self {
        Record {
            id: id.into(),
            title: String::new(),
            persons: Vec::new(),
            subjects: Vec::new(),
            year: None,
            locations: Vec::new(),
            info_type: None,
            database: None,
            source: None,
            institutions: Vec::new(),
            language: None,
        }
    }

    /// One corpus-file line (no trailing newline).
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serialization is infallible")
    }
}

/// How a field's values are treated during normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Free text (title, source): whitespace cleanup only.
    Text,
    /// Controlled or list values (persons, subjects, ...): placeholder values are dropped.
    Categorical,
}

/// Case-folded matching key for a display value.
pub fn fold(value: &str) -> String {
    value.to_lowercase()
}

/// Lower-cased word tokens split on non-alphanumeric characters.
///
/// Folding happens before splitting: lowercasing can emit combining marks
/// (`İ` becomes `i` + U+0307), which must not survive into a token.
pub fn tokenize(text: &str) -> Vec<String> {
    fold(text)
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone)]
pub struct Normalizer {
    junk: Vec<String>,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer::with_junk_values(DEFAULT_JUNK_VALUES.iter().copied())
    }
}

impl Normalizer {
    pub fn with_junk_values<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let junk = values
            .into_iter()
            .map(|v| fold(&collapse_whitespace(v.as_ref())))
            .collect();
        Normalizer { junk }
    }

    /// Trims and collapses whitespace; returns `None` when the value should be dropped.
    pub fn normalize_value(&self, raw: &str, kind: FieldKind) -> Option<String> {
        let value = collapse_whitespace(raw);
        if value.is_empty() {
            return None;
        }
        if kind == FieldKind::Categorical && self.is_junk(&value) {
            return None;
        }
        Some(value)
    }

    pub fn is_junk(&self, value: &str) -> bool {
        let folded = fold(value);
        self.junk.contains(&folded)
    }

    fn normalize_list(&self, values: Vec<String>) -> Vec<String> {
        values
            .into_iter()
            .filter_map(|v| self.normalize_value(&v, FieldKind::Categorical))
            .collect()
    }

    fn normalize_opt(&self, value: Option<String>, kind: FieldKind) -> Option<String> {
        value.and_then(|v| self.normalize_value(&v, kind))
    }

    /// Parses and normalizes one corpus line. `line_no` is 1-based and only used in errors.
    pub fn parse_record(&self, line: &str, line_no: usize) -> Result<Record, RecordError> {
        let raw: RawRecord = serde_json::from_str(line).map_err(|e| RecordError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        self.normalize_record(raw, line_no)
    }

    fn normalize_record(&self, raw: RawRecord, line: usize) -> Result<Record, RecordError> {
        let id = raw
            .id
            .map(|id| collapse_whitespace(&id))
            .filter(|id| !id.is_empty())
            .ok_or(RecordError::MissingId { line })?;

        let year = match raw.year {
            None => None,
            Some(y) if (MIN_YEAR as i64..=MAX_YEAR as i64).contains(&y) => Some(y as i32),
            Some(year) => return Err(RecordError::YearOutOfRange { line, id, year }),
        };

        let info_type = match raw.info_type.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(t) => Some(
                t.parse::<InfoType>()
                    .map_err(|message| RecordError::Malformed { line, message })?,
            ),
        };

        let language = match self.normalize_opt(raw.language, FieldKind::Categorical) {
            None => None,
            Some(code) if code.len() == 2 && code.chars().all(|c| c.is_ascii_alphabetic()) => {
                Some(code.to_ascii_lowercase())
            }
            Some(code) => return Err(RecordError::InvalidLanguage { line, id, code }),
        };

        Ok(Record {
            id,
            title: self
                .normalize_opt(raw.title, FieldKind::Text)
                .unwrap_or_default(),
            persons: self.normalize_list(raw.persons),
            subjects: self.normalize_list(raw.subjects),
            year,
            locations: self.normalize_list(raw.locations),
            info_type,
            database: self.normalize_opt(raw.database, FieldKind::Categorical),
            source: self.normalize_opt(raw.source, FieldKind::Text),
            institutions: self.normalize_list(raw.institutions),
            language,
        })
    }

    /// Reads every record of a corpus stream. Blank lines are skipped.
    pub fn read_corpus<R: BufRead>(&self, reader: R) -> Result<Vec<Record>, RecordError> {
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| RecordError::Malformed {
                line: i + 1,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(self.parse_record(&line, i + 1)?);
        }
        Ok(records)
    }

    /// Reads a corpus file, transparently decompressing names ending in `.gz`.
    pub fn read_corpus_file(&self, path: &Path) -> Result<Vec<Record>, RecordError> {
        let io_err = |source| RecordError::Io {
            path: path.display().to_string(),
            source,
        };
        let file = File::open(path).map_err(io_err)?;
        let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
            Box::new(GzDecoder::new(file))
        } else {
            Box::new(file)
        };
        self.read_corpus(BufReader::new(reader))
    }
}

/// Parses one corpus line with the default junk list.
pub fn parse_record(line: &str) -> Result<Record, RecordError> {
    Normalizer::default().parse_record(line, 1)
}

/// Normalizes a single value with the default junk list.
pub fn normalize_value(raw: &str, kind: FieldKind) -> Option<String> {
    Normalizer::default().normalize_value(raw, kind)
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

// Lenient wire shape: every field optional so a missing id becomes a
// rejection rather than a generic decode failure.
#[derive(Deserialize)]
struct RawRecord {
    id: Option<String>,
    title: Option<String>,
    #[serde(default)]
    persons: Vec<String>,
    #[serde(default)]
    subjects: Vec<String>,
    year: Option<i64>,
    #[serde(default)]
    locations: Vec<String>,
    info_type: Option<String>,
    database: Option<String>,
    source: Option<String>,
    #[serde(default)]
    institutions: Vec<String>,
    language: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_line() {
        let r = parse_record(
            r#"{"id":"d1","title":"X","persons":["A"],"subjects":["internet"],"year":2001,"locations":["Germany"],"info_type":"literature","database":"db1"}"#,
        )
        .unwrap();
        assert_eq!(r.id, "d1");
        assert_eq!(r.title, "X");
        assert_eq!(r.persons, vec!["A"]);
        assert_eq!(r.subjects, vec!["internet"]);
        assert_eq!(r.year, Some(2001));
        assert_eq!(r.locations, vec!["Germany"]);
        assert_eq!(r.info_type, Some(InfoType::Literature));
        assert_eq!(r.database.as_deref(), Some("db1"));
        assert_eq!(r.source, None);
        assert!(r.institutions.is_empty());
    }

    #[test]
    fn missing_id_is_rejected() {
        assert!(matches!(
            parse_record(r#"{"title":"X"}"#),
            Err(RecordError::MissingId { line: 1 })
        ));
        assert!(matches!(
            parse_record(r#"{"id":"   "}"#),
            Err(RecordError::MissingId { .. })
        ));
    }

    #[test]
    fn junk_person_is_dropped() {
        let r = parse_record(r#"{"id":"d2","persons":["no entry","A"],"year":2001}"#).unwrap();
        assert_eq!(r.persons, vec!["A"]);
    }

    #[test]
    fn malformed_line_carries_line_number() {
        let input = "{\"id\":\"a\"}\n\n{\"id\": \n";
        let err = Normalizer::default()
            .read_corpus(input.as_bytes())
            .unwrap_err();
        assert!(
            matches!(err, RecordError::Malformed { line: 3, .. }),
            "{err}"
        );
    }

    #[test]
    fn unknown_fields_are_ignored() {
        let r = parse_record(r#"{"id":"a","extra":{"x":1},"year":1999}"#).unwrap();
        assert_eq!(r.year, Some(1999));
    }

    #[test]
    fn year_and_language_validation() {
        assert!(matches!(
            parse_record(r#"{"id":"a","year":999}"#),
            Err(RecordError::YearOutOfRange { year: 999, .. })
        ));
        assert!(parse_record(r#"{"id":"a","year":3000}"#).is_ok());
        assert!(matches!(
            parse_record(r#"{"id":"a","language":"eng"}"#),
            Err(RecordError::InvalidLanguage { .. })
        ));
        let r = parse_record(r#"{"id":"a","language":"DE"}"#).unwrap();
        assert_eq!(r.language.as_deref(), Some("de"));
        assert!(matches!(
            parse_record(r#"{"id":"a","info_type":"podcast"}"#),
            Err(RecordError::Malformed { .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize_value("  Rudi  Schmiede ", FieldKind::Categorical).as_deref(),
            Some("Rudi Schmiede")
        );
        assert_eq!(normalize_value("No Entry", FieldKind::Categorical), None);
        assert_eq!(normalize_value(" N/A", FieldKind::Categorical), None);
        assert_eq!(normalize_value("\t", FieldKind::Categorical), None);
        assert_eq!(
            normalize_value("internet", FieldKind::Categorical).as_deref(),
            Some("internet")
        );
        // free text keeps placeholder-looking words
        assert_eq!(
            normalize_value("Unknown", FieldKind::Text).as_deref(),
            Some("Unknown")
        );
    }

    #[test]
    fn custom_junk_list() {
        let n = Normalizer::with_junk_values(["anonymous"]);
        assert_eq!(n.normalize_value("Anonymous", FieldKind::Categorical), None);
        assert!(n
            .normalize_value("no entry", FieldKind::Categorical)
            .is_some());
    }

    #[test]
    fn tokenizer_splits_on_non_alphanumerics() {
        assert_eq!(
            tokenize("E-Government and the Information-Society, 2.0"),
            vec![
                "e",
                "government",
                "and",
                "the",
                "information",
                "society",
                "2",
                "0"
            ]
        );
        assert!(tokenize("--").is_empty());
        assert_eq!(tokenize("İstanbul"), vec!["i", "stanbul"]);
        for t in tokenize("İSTANBUL ΟΔΟΣ-Α") {
            assert_eq!(tokenize(&t), vec![t.clone()]);
        }
    }

    #[test]
    fn gzip_corpus_is_read() {
        use flate2::write::GzEncoder;
        use std::io::Write;

        let dir = std::env::temp_dir().join(format!("dlviz-gz-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("corpus.jsonl.gz");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), flate2::Compression::fast());
        writeln!(enc, r#"{{"id":"a"}}"#).unwrap();
        writeln!(enc, r#"{{"id":"b","year":2000}}"#).unwrap();
        enc.finish().unwrap();
        let records = Normalizer::default().read_corpus_file(&path).unwrap();
        assert_eq!(records.len(), 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}

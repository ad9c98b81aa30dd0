//! Immutable inverted index over records: postings, forward store and facet counting.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::record::{fold, tokenize, Normalizer, Record, RecordError};

pub const FORMAT_VERSION: u32 = 1;
const MANIFEST_FILE: &str = "manifest.json";
const RECORDS_FILE: &str = "records.jsonl";

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("field {0} is tokenized text and cannot be faceted")]
    UnsupportedField(Field),
    #[error("facet size must be at least 1")]
    InvalidFacetSize,
    #[error("index format version {found} is not supported (expected {FORMAT_VERSION})")]
    VersionMismatch { found: u32 },
    #[error("index manifest says {expected} documents but the store holds {found}")]
    DocCountMismatch { expected: usize, found: usize },
    #[error("{path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid manifest")]
    Manifest {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Record(#[from] RecordError),
}

/// An indexed record field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Title,
    Source,
    Persons,
    Subjects,
    Locations,
    InfoType,
    Database,
    Institutions,
    Year,
}

impl Field {
    pub const ALL: [Field; 9] = [
        Field::Title,
        Field::Source,
        Field::Persons,
        Field::Subjects,
        Field::Locations,
        Field::InfoType,
        Field::Database,
        Field::Institutions,
        Field::Year,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Title => "title",
            Field::Source => "source",
            Field::Persons => "persons",
            Field::Subjects => "subjects",
            Field::Locations => "locations",
            Field::InfoType => "info_type",
            Field::Database => "database",
            Field::Institutions => "institutions",
            Field::Year => "year",
        }
    }

    /// Title and source are split into word tokens; everything else is a whole value.
    pub fn is_tokenized(self) -> bool {
        matches!(self, Field::Title | Field::Source)
    }

    fn slot(self) -> usize {
        self as usize
    }

    /// Raw display values of this field in `record`, in record order.
    pub fn values(self, record: &Record) -> Vec<String> {
        match self {
            Field::Title => tokenize(&record.title),
            Field::Source => record.source.as_deref().map(tokenize).unwrap_or_default(),
            Field::Persons => record.persons.clone(),
            Field::Subjects => record.subjects.clone(),
            Field::Locations => record.locations.clone(),
            Field::Institutions => record.institutions.clone(),
            Field::InfoType => record
                .info_type
                .map(|t| t.to_string())
                .into_iter()
                .collect(),
            Field::Database => record.database.clone().into_iter().collect(),
            Field::Year => record.year.map(|y| y.to_string()).into_iter().collect(),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Field {
    type Err = String;

    /// Accepts the record field names plus the singular query-language aliases.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "title" => Field::Title,
            "source" => Field::Source,
            "persons" | "person" => Field::Persons,
            "subjects" | "subject" | "keyword" | "keywords" => Field::Subjects,
            "locations" | "location" => Field::Locations,
            "info_type" | "type" => Field::InfoType,
            "database" => Field::Database,
            "institutions" | "institution" => Field::Institutions,
            "year" => Field::Year,
            other => return Err(format!("unknown field {other:?}")),
        })
    }
}

/// Matching documents as ascending, duplicate-free ordinals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ResultSet {
    ordinals: Vec<u32>,
}

impl ResultSet {
    pub fn empty() -> Self {
        ResultSet::default()
    }

    pub fn all(doc_count: usize) -> Self {
        ResultSet {
            ordinals: (0..doc_count as u32).collect(),
        }
    }

    /// Sorts and deduplicates arbitrary ordinals.
    pub fn from_unsorted(mut ordinals: Vec<u32>) -> Self {
        ordinals.sort_unstable();
        ordinals.dedup();
        ResultSet { ordinals }
    }

    fn from_sorted(ordinals: Vec<u32>) -> Self {
        debug_assert!(ordinals.windows(2).all(|w| w[0] < w[1]));
        ResultSet { ordinals }
    }

    pub fn ordinals(&self) -> &[u32] {
        &self.ordinals
    }

    pub fn total(&self) -> usize {
        self.ordinals.len()
    }

    pub fn len(&self) -> usize {
        self.ordinals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinals.is_empty()
    }

    pub fn contains(&self, ordinal: u32) -> bool {
        self.ordinals.binary_search(&ordinal).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.ordinals.iter().copied()
    }

    pub fn intersect(&self, other: &ResultSet) -> ResultSet {
        let (a, b) = (&self.ordinals, &other.ordinals);
        let mut out = Vec::with_capacity(a.len().min(b.len()));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        ResultSet::from_sorted(out)
    }

    pub fn union(&self, other: &ResultSet) -> ResultSet {
        let (a, b) = (&self.ordinals, &other.ordinals);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        ResultSet::from_sorted(out)
    }

    /// Elements of `self` not in `other`.
    pub fn difference(&self, other: &ResultSet) -> ResultSet {
        let mut j = 0;
        let b = &other.ordinals;
        let out = self
            .ordinals
            .iter()
            .copied()
            .filter(|&x| {
                while j < b.len() && b[j] < x {
                    j += 1;
                }
                !(j < b.len() && b[j] == x)
            })
            .collect();
        ResultSet::from_sorted(out)
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a ResultSet>>(sets: I) -> ResultSet {
        let mut all: Vec<u32> = sets.into_iter().flat_map(|s| s.iter()).collect();
        all.sort_unstable();
        all.dedup();
        ResultSet::from_sorted(all)
    }
}

impl FromIterator<u32> for ResultSet {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        ResultSet::from_unsorted(iter.into_iter().collect())
    }
}

impl Serialize for ResultSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("ResultSet", 2)?;
        s.serialize_field("ordinals", &self.ordinals)?;
        s.serialize_field("total", &self.total())?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetCount {
    pub value: String,
    pub count: usize,
}

/// Term dictionary and postings for one field.
#[derive(Debug, Default)]
struct FieldIndex {
    keys: Vec<String>,
    displays: Vec<String>,
    lookup: HashMap<String, u32>,
    postings: Vec<Vec<u32>>,
    // per document: distinct term ids in first-appearance order
    doc_terms: Vec<Vec<u32>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    doc_count: usize,
    fields: Vec<Field>,
}

#[derive(Debug)]
pub struct Index {
    records: Vec<Record>,
    fields: Vec<FieldIndex>,
    ids: HashMap<String, u32>,
    // position of each ordinal in result-list order: year desc (undated last), then id
    rank: Vec<u32>,
}

impl Index {
    /// Builds the index; record ordinals follow input order.
    pub fn build<I: IntoIterator<Item = Record>>(records: I) -> Result<Index, IndexError> {
        let records: Vec<Record> = records.into_iter().collect();
        let mut ids = HashMap::with_capacity(records.len());
        for (ord, r) in records.iter().enumerate() {
            if ids.insert(r.id.clone(), ord as u32).is_some() {
                return Err(IndexError::DuplicateId(r.id.clone()));
            }
        }

        let fields = Field::ALL
            .iter()
            .map(|&field| build_field(field, &records))
            .collect();
        let mut by_display: Vec<u32> = (0..records.len() as u32).collect();
        by_display.sort_by(|&a, &b| {
            let (ra, rb) = (&records[a as usize], &records[b as usize]);
            std::cmp::Reverse(ra.year)
                .cmp(&std::cmp::Reverse(rb.year))
                .then_with(|| ra.id.cmp(&rb.id))
        });
        let mut rank = vec![0u32; records.len()];
        for (pos, &ord) in by_display.iter().enumerate() {
            rank[ord as usize] = pos as u32;
        }
        Ok(Index {
            records,
            fields,
            ids,
            rank,
        })
    }

    pub fn doc_count(&self) -> usize {
        self.records.len()
    }

    pub fn fields(&self) -> &'static [Field] {
        &Field::ALL
    }

    /// Position of `ordinal` in result-list order.
    pub fn display_rank(&self, ordinal: u32) -> u32 {
        self.rank[ordinal as usize]
    }

    pub fn record(&self, ordinal: u32) -> &Record {
        &self.records[ordinal as usize]
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn ordinal_of(&self, id: &str) -> Option<u32> {
        self.ids.get(id).copied()
    }

    pub fn all(&self) -> ResultSet {
        ResultSet::all(self.doc_count())
    }

    fn field(&self, field: Field) -> &FieldIndex {
        &self.fields[field.slot()]
    }

    /// Exact postings for a value, case-folded before lookup.
    pub fn postings_lookup(&self, field: Field, value: &str) -> ResultSet {
        let f = self.field(field);
        match f.lookup.get(&fold(value)) {
            Some(&id) => ResultSet::from_sorted(f.postings[id as usize].clone()),
            None => ResultSet::empty(),
        }
    }

    /// Postings as a borrowed slice; empty for unknown values. `key` must already be folded.
    pub fn postings_slice(&self, field: Field, key: &str) -> &[u32] {
        let f = self.field(field);
        f.lookup
            .get(key)
            .map(|&id| f.postings[id as usize].as_slice())
            .unwrap_or(&[])
    }

    /// Every (folded key, postings) pair of a field, in dictionary order.
    pub fn terms(&self, field: Field) -> impl Iterator<Item = (&str, &[u32])> + '_ {
        let f = self.field(field);
        f.keys
            .iter()
            .zip(&f.postings)
            .map(|(k, p)| (k.as_str(), p.as_slice()))
    }

    /// Display spelling for a folded key: the most frequent original casing.
    pub fn display(&self, field: Field, key: &str) -> Option<&str> {
        let f = self.field(field);
        f.lookup
            .get(key)
            .map(|&id| f.displays[id as usize].as_str())
    }

    /// Distinct folded keys a document holds in `field`.
    pub fn doc_keys(&self, field: Field, ordinal: u32) -> impl Iterator<Item = &str> + '_ {
        let f = self.field(field);
        f.doc_terms[ordinal as usize]
            .iter()
            .map(|&id| f.keys[id as usize].as_str())
    }

    /// Top-`k` values of a categorical field among `rs`, by count then folded key.
    pub fn facet_counts(
        &self,
        rs: &ResultSet,
        field: Field,
        k: usize,
    ) -> Result<Vec<FacetCount>, IndexError> {
        if field.is_tokenized() {
            return Err(IndexError::UnsupportedField(field));
        }
        if k == 0 {
            return Err(IndexError::InvalidFacetSize);
        }
        let f = self.field(field);
        let mut counts = vec![0usize; f.keys.len()];
        for ord in rs.iter() {
            for &id in &f.doc_terms[ord as usize] {
                counts[id as usize] += 1;
            }
        }
        let mut ranked: Vec<(u32, usize)> = counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(id, c)| (id as u32, c))
            .collect();
        ranked.sort_unstable_by(|a, b| {
            b.1.cmp(&a.1)
                .then_with(|| f.keys[a.0 as usize].cmp(&f.keys[b.0 as usize]))
        });
        ranked.truncate(k);
        Ok(ranked
            .into_iter()
            .map(|(id, count)| FacetCount {
                value: f.displays[id as usize].clone(),
                count,
            })
            .collect())
    }

    /// Writes the index directory: a manifest plus the forward store.
    pub fn save(&self, dir: &Path) -> Result<(), IndexError> {
        let io_err = |path: &Path| {
            let path = path.display().to_string();
            move |source| IndexError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io_err(dir))?;

        let records_path = dir.join(RECORDS_FILE);
        let file = fs::File::create(&records_path).map_err(io_err(&records_path))?;
        let mut out = BufWriter::new(file);
        for r in &self.records {
            writeln!(out, "{}", r.to_line()).map_err(io_err(&records_path))?;
        }
        out.flush().map_err(io_err(&records_path))?;

        let manifest = Manifest {
            format_version: FORMAT_VERSION,
            doc_count: self.doc_count(),
            fields: Field::ALL.to_vec(),
        };
        let manifest_path = dir.join(MANIFEST_FILE);
        let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        json.push('\n');
        fs::write(&manifest_path, json).map_err(io_err(&manifest_path))?;
        Ok(())
    }

    /// Loads an index directory written by [`Index::save`], checking the format version.
    pub fn load(dir: &Path) -> Result<Index, IndexError> {
        let manifest_path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&manifest_path).map_err(|source| IndexError::Io {
            path: manifest_path.display().to_string(),
            source,
        })?;
        let manifest = parse_manifest(&text).map_err(|e| match e {
            ManifestError::Json(source) => IndexError::Manifest {
                path: manifest_path.display().to_string(),
                source,
            },
            ManifestError::Version(found) => IndexError::VersionMismatch { found },
        })?;

        let records = Normalizer::default().read_corpus_file(&dir.join(RECORDS_FILE))?;
        if records.len() != manifest.doc_count {
            return Err(IndexError::DocCountMismatch {
                expected: manifest.doc_count,
                found: records.len(),
            });
        }
        Index::build(records)
    }
}

enum ManifestError {
    Json(serde_json::Error),
    Version(u32),
}

fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let manifest: Manifest = serde_json::from_str(text).map_err(ManifestError::Json)?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(ManifestError::Version(manifest.format_version));
    }
    Ok(manifest)
}

/// Validates an index manifest document. Exposed for fuzzing.
pub fn check_manifest(text: &str) -> Result<(usize, Vec<Field>), String> {
    match parse_manifest(text) {
        Ok(m) => Ok((m.doc_count, m.fields)),
        Err(ManifestError::Json(e)) => Err(e.to_string()),
        Err(ManifestError::Version(v)) => Err(format!("unsupported version {v}")),
    }
}

fn build_field(field: Field, records: &[Record]) -> FieldIndex {
    let mut fi = FieldIndex {
        doc_terms: Vec::with_capacity(records.len()),
        ..FieldIndex::default()
    };
    // spelling frequencies per term id
    let mut spellings: Vec<BTreeMap<String, usize>> = Vec::new();

    for (ord, record) in records.iter().enumerate() {
        let mut terms: Vec<u32> = Vec::new();
        for value in field.values(record) {
            if value.is_empty() {
                continue;
            }
            let key = fold(&value);
            let id = match fi.lookup.get(&key) {
                Some(&id) => id,
                None => {
                    let id = fi.keys.len() as u32;
                    fi.lookup.insert(key.clone(), id);
                    fi.keys.push(key);
                    fi.postings.push(Vec::new());
                    spellings.push(BTreeMap::new());
                    id
                }
            };
            if terms.contains(&id) {
                continue;
            }
            terms.push(id);
            fi.postings[id as usize].push(ord as u32);
            *spellings[id as usize].entry(value).or_default() += 1;
        }
        fi.doc_terms.push(terms);
    }

    fi.displays = spellings
        .into_iter()
        .map(|s| {
            // BTreeMap iterates ascending, so the first maximum is the lexicographic tie-break
            let mut best: Option<(&String, usize)> = None;
            for (spelling, &n) in &s {
                if best.is_none_or(|(_, m)| n > m) {
                    best = Some((spelling, n));
                }
            }
            best.map(|(s, _)| s.clone()).unwrap_or_default()
        })
        .collect();
    fi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, subjects: &[&str]) -> Record {
        let mut r = Record::new(id);
        r.subjects = subjects.iter().map(|s| s.to_string()).collect();
        r
    }

    #[test]
    fn empty_index() {
        let idx = Index::build(Vec::new()).unwrap();
        assert_eq!(idx.doc_count(), 0);
        for f in Field::ALL {
            assert_eq!(idx.terms(f).count(), 0);
        }
        assert!(idx
            .facet_counts(&idx.all(), Field::Subjects, 5)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn shared_subject_postings() {
        let idx = Index::build(vec![
            rec("a", &["internet"]),
            rec("b", &["society"]),
            rec("c", &["Internet", "society"]),
        ])
        .unwrap();
        assert_eq!(idx.postings_slice(Field::Subjects, "internet"), &[0, 2]);
        assert_eq!(
            idx.postings_lookup(Field::Subjects, "INTERNET").ordinals(),
            &[0, 2]
        );
        assert!(idx.postings_lookup(Field::Subjects, "nothing").is_empty());
        assert_eq!(idx.postings_lookup(Field::Subjects, "society").total(), 2);
    }

    #[test]
    fn duplicate_id_is_named() {
        let err = Index::build(vec![rec("x", &[]), rec("x", &[])]).unwrap_err();
        assert!(matches!(err, IndexError::DuplicateId(ref id) if id == "x"));
    }

    #[test]
    fn facet_counts_hand_example() {
        let idx = Index::build(vec![
            rec("1", &["a"]),
            rec("2", &["a"]),
            rec("3", &["b"]),
            rec("4", &["a", "b"]),
        ])
        .unwrap();
        let top = idx.facet_counts(&idx.all(), Field::Subjects, 2).unwrap();
        assert_eq!(
            top,
            vec![
                FacetCount {
                    value: "a".into(),
                    count: 3
                },
                FacetCount {
                    value: "b".into(),
                    count: 2
                },
            ]
        );
        assert!(idx
            .facet_counts(&ResultSet::empty(), Field::Subjects, 2)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn facet_counts_rejects_text_and_zero_k() {
        let idx = Index::build(vec![rec("1", &["a"])]).unwrap();
        assert!(matches!(
            idx.facet_counts(&idx.all(), Field::Title, 3),
            Err(IndexError::UnsupportedField(Field::Title))
        ));
        assert!(matches!(
            idx.facet_counts(&idx.all(), Field::Subjects, 0),
            Err(IndexError::InvalidFacetSize)
        ));
    }

    #[test]
    fn ties_break_on_folded_value_and_display_is_majority_spelling() {
        let idx = Index::build(vec![
            rec("1", &["Zeta", "alpha"]),
            rec("2", &["zeta", "Alpha"]),
            rec("3", &["ZETA"]),
            rec("4", &["alpha"]),
        ])
        .unwrap();
        let top = idx.facet_counts(&idx.all(), Field::Subjects, 10).unwrap();
        assert_eq!(top[0].value, "alpha");
        assert_eq!(top[1].value, "ZETA"); // three spellings tie; ASCII order puts "ZETA" first
        assert_eq!(top[0].count, 3);
        assert_eq!(top[1].count, 3);
    }

    #[test]
    fn duplicate_values_in_a_record_count_once() {
        let idx = Index::build(vec![rec("1", &["a", "A", "a"])]).unwrap();
        assert_eq!(idx.postings_slice(Field::Subjects, "a"), &[0]);
        assert_eq!(
            idx.facet_counts(&idx.all(), Field::Subjects, 1).unwrap()[0].count,
            1
        );
    }

    #[test]
    fn set_operations() {
        let a = ResultSet::from_unsorted(vec![5, 1, 3, 3, 9]);
        let b = ResultSet::from_unsorted(vec![3, 4, 9, 10]);
        assert_eq!(a.ordinals(), &[1, 3, 5, 9]);
        assert_eq!(a.intersect(&b).ordinals(), &[3, 9]);
        assert_eq!(a.union(&b).ordinals(), &[1, 3, 4, 5, 9, 10]);
        assert_eq!(a.difference(&b).ordinals(), &[1, 5]);
        assert_eq!(ResultSet::union_all([&a, &b]), a.union(&b));
    }

    #[test]
    fn manifest_version_is_checked() {
        assert!(check_manifest(r#"{"format_version":1,"doc_count":0,"fields":["year"]}"#).is_ok());
        assert!(check_manifest(r#"{"format_version":2,"doc_count":0,"fields":[]}"#).is_err());
        assert!(check_manifest("{").is_err());
    }

    #[test]
    fn field_names_parse() {
        assert_eq!("keyword".parse::<Field>().unwrap(), Field::Subjects);
        assert_eq!("type".parse::<Field>().unwrap(), Field::InfoType);
        for f in Field::ALL {
            assert_eq!(f.as_str().parse::<Field>().unwrap(), f);
        }
        assert!("colour".parse::<Field>().is_err());
    }
}

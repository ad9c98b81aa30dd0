//! Weighted brushing: co-occurrence intensities among the current query's
//! top persons, top keywords, locations and years.
//!
//! The computation runs in three steps:
//!
//! 1. Restrict the result set to documents holding at least one of the ten
//!    most frequent persons *and* at least one of the ten most frequent
//!    keywords (`query AND (p1 OR .. OR p10) AND (k1 OR .. OR k10)`).
//! 2. For every document of that subset take its candidate values per field
//!    (anchor persons, anchor keywords, all locations, the year) and count,
//!    for each cross-field value pair, how many documents contain both.
//! 3. Scale counts to intensities `max(1, round_half_up(5 * count / max))`.
//!    Intensity 0 is reserved for pairs that never co-occur.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::index::{FacetCount, Field, Index, ResultSet};
use crate::query::{evaluate, EvalError, FacetFilters, QueryAst};
use crate::record::fold;

/// Anchor values kept per person and keyword field.
pub const ANCHOR_LIMIT: usize = 10;
pub const MAX_INTENSITY: u8 = 5;

/// Fields taking part in brushing, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkField {
    Person,
    Keyword,
    Location,
    Time,
}

impl LinkField {
    pub const ALL: [LinkField; 4] = [
        LinkField::Person,
        LinkField::Keyword,
        LinkField::Location,
        LinkField::Time,
    ];

    pub fn index_field(self) -> Field {
        match self {
            LinkField::Person => Field::Persons,
            LinkField::Keyword => Field::Subjects,
            LinkField::Location => Field::Locations,
            LinkField::Time => Field::Year,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LinkField::Person => "person",
            LinkField::Keyword => "keyword",
            LinkField::Location => "location",
            LinkField::Time => "time",
        }
    }
}

impl fmt::Display for LinkField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LinkField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LinkField::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown linking field {s:?}"))
    }
}

/// Unordered pair of field values, stored canonically: `(field_a, value_a) < (field_b, value_b)`.
/// Values are case-folded keys.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkingKey {
    field_a: LinkField,
    value_a: String,
    field_b: LinkField,
    value_b: String,
}

impl LinkingKey {
    /// Builds the canonical key; `None` when both sides share a field.
    pub fn new(
        field_x: LinkField,
        value_x: &str,
        field_y: LinkField,
        value_y: &str,
    ) -> Option<LinkingKey> {
        if field_x == field_y {
            return None;
        }
        let (x, y) = ((field_x, fold(value_x)), (field_y, fold(value_y)));
        let ((field_a, value_a), (field_b, value_b)) = if x < y { (x, y) } else { (y, x) };
        Some(LinkingKey {
            field_a,
            value_a,
            field_b,
            value_b,
        })
    }

    pub fn a(&self) -> (LinkField, &str) {
        (self.field_a, &self.value_a)
    }

    pub fn b(&self) -> (LinkField, &str) {
        (self.field_b, &self.value_b)
    }

    /// The other side of the pair when `(field, key)` is one of its members.
    pub fn other(&self, field: LinkField, key: &str) -> Option<(LinkField, &str)> {
        if self.field_a == field && self.value_a == key {
            Some(self.b())
        } else if self.field_b == field && self.value_b == key {
            Some(self.a())
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkEntry {
    pub count: usize,
    pub intensity: u8,
}

/// The linking subset with the anchors that bound it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkingSubset {
    pub subset: ResultSet,
    pub top_persons: Vec<FacetCount>,
    pub top_keywords: Vec<FacetCount>,
}

impl LinkingSubset {
    fn anchor_keys(&self, field: LinkField) -> Vec<String> {
        let anchors = match field {
            LinkField::Person => &self.top_persons,
            LinkField::Keyword => &self.top_keywords,
            _ => return Vec::new(),
        };
        anchors.iter().map(|a| fold(&a.value)).collect()
    }
}

/// Documents of the query's result set holding an anchor person and an anchor keyword.
pub fn linking_subset(
    index: &Index,
    query: &QueryAst,
    filters: &FacetFilters,
) -> Result<LinkingSubset, EvalError> {
    let rs = evaluate(query, filters, index)?;
    Ok(subset_of(index, &rs))
}

/// Same as [`linking_subset`] for an already evaluated result set.
pub fn subset_of(index: &Index, rs: &ResultSet) -> LinkingSubset {
    let top = |field| {
        index
            .facet_counts(rs, field, ANCHOR_LIMIT)
            .expect("anchor fields are categorical")
    };
    let top_persons = top(Field::Persons);
    let top_keywords = top(Field::Subjects);
    let docs_with_any = |field: Field, anchors: &[FacetCount]| {
        ResultSet::from_unsorted(
            anchors
                .iter()
                .flat_map(|a| index.postings_slice(field, &fold(&a.value)).iter().copied())
                .collect(),
        )
    };
    let subset = rs
        .intersect(&docs_with_any(Field::Persons, &top_persons))
        .intersect(&docs_with_any(Field::Subjects, &top_keywords));
    LinkingSubset {
        subset,
        top_persons,
        top_keywords,
    }
}

/// Shared-document count for every cross-field value pair in the subset.
pub fn pair_counts(index: &Index, anchors: &LinkingSubset) -> BTreeMap<LinkingKey, usize> {
    let person_keys = anchors.anchor_keys(LinkField::Person);
    let keyword_keys = anchors.anchor_keys(LinkField::Keyword);

    let mut counts: HashMap<[(LinkField, &str); 2], usize> = HashMap::new();
    let mut candidates: Vec<(LinkField, &str)> = Vec::new();
    for ord in anchors.subset.iter() {
        candidates.clear();
        for field in LinkField::ALL {
            let restrict = match field {
                LinkField::Person => Some(&person_keys),
                LinkField::Keyword => Some(&keyword_keys),
                _ => None,
            };
            candidates.extend(
                index
                    .doc_keys(field.index_field(), ord)
                    .filter(|k| restrict.is_none_or(|allowed| allowed.iter().any(|a| a == k)))
                    .map(|k| (field, k)),
            );
        }
        // doc_keys are distinct per field and fields are distinct, so each pair occurs once per doc
        for (i, &x) in candidates.iter().enumerate() {
            for &y in &candidates[i + 1..] {
                if x.0 != y.0 {
                    let pair = if x < y { [x, y] } else { [y, x] };
                    *counts.entry(pair).or_default() += 1;
                }
            }
        }
    }

    counts
        .into_iter()
        .map(|([(fa, va), (fb, vb)], n)| {
            (
                LinkingKey {
                    field_a: fa,
                    value_a: va.to_string(),
                    field_b: fb,
                    value_b: vb.to_string(),
                },
                n,
            )
        })
        .collect()
}

/// `max(1, round_half_up(5 * count / max_count))`, for `1 <= count <= max_count`.
pub fn intensity(count: usize, max_count: usize) -> u8 {
    debug_assert!(count >= 1 && count <= max_count);
    let (c, m) = (count as u128, max_count as u128);
    let scaled = (2 * MAX_INTENSITY as u128 * c + m) / (2 * m);
    scaled.clamp(1, MAX_INTENSITY as u128) as u8
}

/// Scales counts relative to the largest one.
pub fn normalize_intensity<K: Ord + Clone>(counts: &BTreeMap<K, usize>) -> BTreeMap<K, LinkEntry> {
    let max = counts.values().copied().max().unwrap_or(0);
    counts
        .iter()
        .map(|(k, &count)| {
            (
                k.clone(),
                LinkEntry {
                    count,
                    intensity: intensity(count, max),
                },
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkingTable {
    pub entries: BTreeMap<LinkingKey, LinkEntry>,
    pub top_persons: Vec<FacetCount>,
    pub top_keywords: Vec<FacetCount>,
    pub subset_size: usize,
    displays: HashMap<(LinkField, String), String>,
}

impl LinkingTable {
    /// Display spelling of a folded key appearing in the table.
    pub fn display<'a>(&'a self, field: LinkField, key: &'a str) -> &'a str {
        self.displays
            .get(&(field, key.to_string()))
            .map(String::as_str)
            .unwrap_or(key)
    }

    pub fn get(&self, key: &LinkingKey) -> Option<LinkEntry> {
        self.entries.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Full pipeline: subset, pair counts, intensities.
pub fn build_linking_table(
    index: &Index,
    query: &QueryAst,
    filters: &FacetFilters,
) -> Result<LinkingTable, EvalError> {
    let rs = evaluate(query, filters, index)?;
    Ok(linking_table_for(index, &rs))
}

/// Builds the table for an already evaluated result set.
pub fn linking_table_for(index: &Index, rs: &ResultSet) -> LinkingTable {
    let anchors = subset_of(index, rs);
    let counts = pair_counts(index, &anchors);
    let entries = normalize_intensity(&counts);
    let mut displays = HashMap::new();
    for key in entries.keys() {
        for (field, value) in [key.a(), key.b()] {
            displays
                .entry((field, value.to_string()))
                .or_insert_with(|| {
                    index
                        .display(field.index_field(), value)
                        .unwrap_or(value)
                        .to_string()
                });
        }
    }
    LinkingTable {
        entries,
        subset_size: anchors.subset.len(),
        top_persons: anchors.top_persons,
        top_keywords: anchors.top_keywords,
        displays,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkNeighbor {
    pub field: LinkField,
    pub value: String,
    pub intensity: u8,
}

/// Entries touching `(field, value)`, projected onto their other member,
/// ordered by field then folded value.
pub fn neighbors_of(table: &LinkingTable, field: LinkField, value: &str) -> Vec<LinkNeighbor> {
    let key = fold(value.trim());
    let mut out: Vec<(LinkField, &str, u8)> = table
        .entries
        .iter()
        .filter_map(|(k, e)| k.other(field, &key).map(|(f, v)| (f, v, e.intensity)))
        .collect();
    out.sort_unstable();
    out.into_iter()
        .map(|(f, v, intensity)| LinkNeighbor {
            field: f,
            value: table.display(f, v).to_string(),
            intensity,
        })
        .collect()
}

/// One serialized linking entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkRow {
    pub field_a: LinkField,
    pub value_a: String,
    pub field_b: LinkField,
    pub value_b: String,
    pub count: usize,
    pub intensity: u8,
}

impl fmt::Display for LinkRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{{}, {}|intensity:{}}}",
            self.value_a, self.value_b, self.count
        )
    }
}

impl LinkingTable {
    /// Entries in key order with display values.
    pub fn rows(&self) -> Vec<LinkRow> {
        self.entries
            .iter()
            .map(|(k, e)| LinkRow {
                field_a: k.field_a,
                value_a: self.display(k.field_a, &k.value_a).to_string(),
                field_b: k.field_b,
                value_b: self.display(k.field_b, &k.value_b).to_string(),
                count: e.count,
                intensity: e.intensity,
            })
            .collect()
    }
}

impl Serialize for LinkingTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("LinkingTable", 4)?;
        s.serialize_field("entries", &self.rows())?;
        s.serialize_field("top_persons", &self.top_persons)?;
        s.serialize_field("top_keywords", &self.top_keywords)?;
        s.serialize_field("subset_size", &self.subset_size)?;
        s.end()
    }
}

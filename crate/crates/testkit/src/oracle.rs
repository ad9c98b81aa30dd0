//! Brute-force reference computations.
//!
//! Everything here scans `Record`s directly: no postings, no term
//! dictionaries, no shared helpers from the engine beyond the data types.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use dlviz_core::query::{FacetFilters, QueryAst, QueryField};
use dlviz_core::{Field, Record};

pub fn fold(s: &str) -> String {
    s.to_lowercase()
}

pub fn tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in fold(s).chars() {
        if c.is_alphanumeric() {
            cur.push(c);
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn squash(s: &str) -> String {
    fold(&s.split_whitespace().collect::<Vec<_>>().join(" "))
}

/// Raw values of a field, display spelling, record order.
pub fn field_values(r: &Record, field: Field) -> Vec<String> {
    match field {
        Field::Title => tokens(&r.title),
        Field::Source => r.source.iter().flat_map(|s| tokens(s)).collect(),
        Field::Persons => r.persons.clone(),
        Field::Subjects => r.subjects.clone(),
        Field::Locations => r.locations.clone(),
        Field::Institutions => r.institutions.clone(),
        Field::InfoType => r.info_type.iter().map(|t| t.as_str().to_string()).collect(),
        Field::Database => r.database.iter().cloned().collect(),
        Field::Year => r.year.iter().map(|y| y.to_string()).collect(),
    }
}

fn has_key(r: &Record, field: Field, key: &str) -> bool {
    field_values(r, field).iter().any(|v| fold(v) == key)
}

/// Naive postings: every (field, folded value) with the ordinals holding it.
pub fn postings(records: &[Record]) -> BTreeMap<(Field, String), Vec<u32>> {
    let mut out: BTreeMap<(Field, String), Vec<u32>> = BTreeMap::new();
    for field in Field::ALL {
        for (ord, r) in records.iter().enumerate() {
            let keys: BTreeSet<String> = field_values(r, field).iter().map(|v| fold(v)).collect();
            for k in keys {
                out.entry((field, k)).or_default().push(ord as u32);
            }
        }
    }
    out
}

/// Majority display spelling per folded key over the whole corpus, counting
/// the first spelling of each key once per document; ties go to the smallest string.
pub fn displays(records: &[Record], field: Field) -> HashMap<String, String> {
    let mut spellings: HashMap<String, HashMap<String, usize>> = HashMap::new();
    for r in records {
        let mut seen = BTreeSet::new();
        for v in field_values(r, field) {
            if seen.insert(fold(&v)) {
                *spellings.entry(fold(&v)).or_default().entry(v).or_default() += 1;
            }
        }
    }
    spellings
        .into_iter()
        .map(|(k, m)| {
            let best = m
                .into_iter()
                .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
                .unwrap()
                .0;
            (k, best)
        })
        .collect()
}

/// Top-k (display, count) for a field over `ords`.
pub fn facet_counts(
    records: &[Record],
    ords: &[u32],
    field: Field,
    k: usize,
) -> Vec<(String, usize)> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for &o in ords {
        let keys: BTreeSet<String> = field_values(&records[o as usize], field)
            .iter()
            .map(|v| fold(v))
            .collect();
        for key in keys {
            *counts.entry(key).or_default() += 1;
        }
    }
    let mut v: Vec<(String, usize)> = counts.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v.truncate(k);
    let disp = displays(records, field);
    v.into_iter()
        .map(|(key, c)| (disp[&key].clone(), c))
        .collect()
}

fn contains_run(hay: &[String], needle: &[String]) -> bool {
    if needle.is_empty() || needle.len() > hay.len() {
        return false;
    }
    (0..=hay.len() - needle.len()).any(|i| hay[i..i + needle.len()] == *needle)
}

fn categorical(field: QueryField) -> Field {
    match field {
        QueryField::Keyword => Field::Subjects,
        QueryField::Person => Field::Persons,
        QueryField::Institution => Field::Institutions,
        QueryField::Location => Field::Locations,
        QueryField::Type => Field::InfoType,
        QueryField::Database => Field::Database,
        QueryField::Year => Field::Year,
        QueryField::Title => Field::Title,
        QueryField::Source => Field::Source,
        QueryField::All => unreachable!("all is not a single field"),
    }
}

/// Per-document predicate; `Not` is plain negation.
pub fn matches(r: &Record, ast: &QueryAst) -> bool {
    let title = tokens(&r.title);
    let source = r.source.as_deref().map(tokens).unwrap_or_default();
    match ast {
        QueryAst::MatchAll => true,
        QueryAst::And { children } => children.iter().all(|c| matches(r, c)),
        QueryAst::Or { children } => children.iter().any(|c| matches(r, c)),
        QueryAst::Not { child } => !matches(r, child),
        QueryAst::YearRange { from, to } => r.year.is_some_and(|y| *from <= y && y <= *to),
        QueryAst::FieldTerm {
            field: QueryField::All,
            value,
        } => {
            title.contains(value)
                || source.contains(value)
                || r.subjects.iter().any(|s| fold(s) == *value)
                || r.persons.iter().any(|p| fold(p) == *value)
        }
        QueryAst::FieldTerm { field, value } => has_key(r, categorical(*field), value),
        QueryAst::Phrase { field, words } => {
            let joined = words.join(" ");
            match field {
                QueryField::Title => contains_run(&title, words),
                QueryField::Source => contains_run(&source, words),
                QueryField::All => {
                    contains_run(&title, words)
                        || contains_run(&source, words)
                        || r.subjects.iter().any(|s| fold(s) == joined)
                        || r.persons.iter().any(|p| fold(p) == joined)
                }
                other => has_key(r, categorical(*other), &joined),
            }
        }
    }
}

pub fn passes_filters(r: &Record, f: &FacetFilters) -> bool {
    let check = |want: &Option<String>, field: Field| {
        want.as_ref().is_none_or(|w| has_key(r, field, &squash(w)))
    };
    let time_ok = if f.from.is_none() && f.to.is_none() {
        true
    } else {
        r.year
            .is_some_and(|y| f.from.is_none_or(|from| y >= from) && f.to.is_none_or(|to| y <= to))
    };
    check(&f.info_type, Field::InfoType)
        && check(&f.database, Field::Database)
        && check(&f.person, Field::Persons)
        && check(&f.subject, Field::Subjects)
        && time_ok
}

pub fn evaluate(records: &[Record], ast: &QueryAst, filters: &FacetFilters) -> Vec<u32> {
    (0..records.len() as u32)
        .filter(|&o| {
            let r = &records[o as usize];
            matches(r, ast) && passes_filters(r, filters)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Temporal {
    pub bins: Vec<(i32, usize)>,
    pub covered: usize,
    pub uncovered: usize,
    pub bar: bool,
}

pub fn temporal(records: &[Record], ords: &[u32], reference_year: i32) -> Temporal {
    let years: Vec<i32> = (reference_year - 49..=reference_year).collect();
    let bins: Vec<(i32, usize)> = years
        .iter()
        .map(|&y| {
            (
                y,
                ords.iter()
                    .filter(|&&o| records[o as usize].year == Some(y))
                    .count(),
            )
        })
        .collect();
    let covered: usize = bins.iter().map(|b| b.1).sum();
    let nonzero: Vec<i32> = bins.iter().filter(|b| b.1 > 0).map(|b| b.0).collect();
    let span = match (nonzero.first(), nonzero.last()) {
        (Some(a), Some(b)) => b - a + 1,
        _ => 0,
    };
    Temporal {
        bins,
        covered,
        uncovered: ords.len() - covered,
        bar: span < 15,
    }
}

pub type Tally = Vec<(String, usize)>;

/// (resolved, unresolved) location tallies, both sorted by count desc then key.
pub fn spatial(records: &[Record], ords: &[u32], known: &BTreeSet<String>) -> (Tally, Tally) {
    let all = facet_counts(records, ords, Field::Locations, usize::MAX);
    all.into_iter()
        .partition(|(name, _)| known.contains(&fold(name)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoAuthors {
    pub nodes: Vec<(String, usize)>,
    /// (folded a, folded b) with a < b -> shared documents
    pub edges: BTreeMap<(String, String), usize>,
}

pub fn coauthors(records: &[Record], ords: &[u32]) -> CoAuthors {
    let nodes = facet_counts(records, ords, Field::Persons, 50);
    let top: BTreeSet<String> = nodes.iter().map(|n| fold(&n.0)).collect();
    let mut edges = BTreeMap::new();
    for a in &top {
        for b in &top {
            if a < b {
                let n = ords
                    .iter()
                    .filter(|&&o| {
                        let r = &records[o as usize];
                        has_key(r, Field::Persons, a) && has_key(r, Field::Persons, b)
                    })
                    .count();
                if n > 0 {
                    edges.insert((a.clone(), b.clone()), n);
                }
            }
        }
    }
    CoAuthors { nodes, edges }
}

/// (display, co-count) of subjects co-occurring with `term` across the corpus.
pub fn coword(records: &[Record], term: &str, k: usize) -> Vec<(String, usize)> {
    let key = fold(term.trim());
    let docs: Vec<u32> = (0..records.len() as u32)
        .filter(|&o| has_key(&records[o as usize], Field::Subjects, &key))
        .collect();
    facet_counts(records, &docs, Field::Subjects, usize::MAX)
        .into_iter()
        .filter(|(d, _)| fold(d) != key)
        .take(k)
        .collect()
}

/// Half-up rounding of `5 * count / max`, floored at 1, in floating point.
pub fn intensity(count: usize, max: usize) -> u8 {
    let x = 5.0 * count as f64 / max as f64;
    ((x + 0.5).floor() as u8).clamp(1, 5)
}

pub const LINK_FIELDS: [&str; 4] = ["person", "keyword", "location", "time"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linking {
    pub top_persons: Vec<(String, usize)>,
    pub top_keywords: Vec<(String, usize)>,
    pub subset: Vec<u32>,
    /// (field_a, folded value_a, field_b, folded value_b) -> (count, intensity)
    pub entries: BTreeMap<(usize, String, usize, String), (usize, u8)>,
}

/// Weighted-brushing table by direct enumeration.
pub fn linking(records: &[Record], ords: &[u32]) -> Linking {
    let top_persons = facet_counts(records, ords, Field::Persons, 10);
    let top_keywords = facet_counts(records, ords, Field::Subjects, 10);
    let ap: BTreeSet<String> = top_persons.iter().map(|p| fold(&p.0)).collect();
    let ak: BTreeSet<String> = top_keywords.iter().map(|p| fold(&p.0)).collect();

    let subset: Vec<u32> = ords
        .iter()
        .copied()
        .filter(|&o| {
            let r = &records[o as usize];
            r.persons.iter().any(|p| ap.contains(&fold(p)))
                && r.subjects.iter().any(|s| ak.contains(&fold(s)))
        })
        .collect();

    let mut counts: BTreeMap<(usize, String, usize, String), usize> = BTreeMap::new();
    for &o in &subset {
        let r = &records[o as usize];
        let per_field: [BTreeSet<String>; 4] = [
            r.persons
                .iter()
                .map(|p| fold(p))
                .filter(|p| ap.contains(p))
                .collect(),
            r.subjects
                .iter()
                .map(|s| fold(s))
                .filter(|s| ak.contains(s))
                .collect(),
            r.locations.iter().map(|l| fold(l)).collect(),
            r.year.iter().map(|y| y.to_string()).collect(),
        ];
        for fa in 0..4 {
            for fb in fa + 1..4 {
                for va in &per_field[fa] {
                    for vb in &per_field[fb] {
                        *counts.entry((fa, va.clone(), fb, vb.clone())).or_default() += 1;
                    }
                }
            }
        }
    }
    let max = counts.values().copied().max().unwrap_or(1);
    Linking {
        top_persons,
        top_keywords,
        subset,
        entries: counts
            .into_iter()
            .map(|(k, c)| (k, (c, intensity(c, max))))
            .collect(),
    }
}

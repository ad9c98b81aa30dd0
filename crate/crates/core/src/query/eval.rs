use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{QueryAst, QueryField};
use crate::index::{Field, Index, ResultSet};
use crate::record::{fold, tokenize};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(
        "query has no positive term: negation must appear inside AND next to a positive operand"
    )]
    PureNegation,
    #[error("invalid filters: time range starts at {from} but ends at {to}")]
    InvertedTimeRange { from: i32, to: i32 },
}

/// Conjunctive facet filters applied after the query.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetFilters {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub info_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub database: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub person: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<i32>,
}

impl FacetFilters {
    pub fn validate(&self) -> Result<(), EvalError> {
        match (self.from, self.to) {
            (Some(from), Some(to)) if from > to => Err(EvalError::InvertedTimeRange { from, to }),
            _ => Ok(()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self == &FacetFilters::default()
    }

    fn categorical(&self) -> [(Field, Option<&String>); 4] {
        [
            (Field::InfoType, self.info_type.as_ref()),
            (Field::Database, self.database.as_ref()),
            (Field::Persons, self.person.as_ref()),
            (Field::Subjects, self.subject.as_ref()),
        ]
    }

    /// Narrows `rs` to the documents satisfying every filter.
    pub fn apply(&self, index: &Index, mut rs: ResultSet) -> Result<ResultSet, EvalError> {
        self.validate()?;
        for (field, value) in self.categorical() {
            if let Some(v) = value {
                rs = rs.intersect(&index.postings_lookup(field, &normalize_key(v)));
            }
        }
        if self.from.is_some() || self.to.is_some() {
            let from = self.from.unwrap_or(i32::MIN);
            let to = self.to.unwrap_or(i32::MAX);
            rs = rs.intersect(&year_range(index, from, to));
        }
        Ok(rs)
    }
}

fn normalize_key(v: &str) -> String {
    fold(&v.split_whitespace().collect::<Vec<_>>().join(" "))
}

// A negative result stands for the complement of its set.
enum Partial {
    Pos(ResultSet),
    Neg(ResultSet),
}

fn eval_node(ast: &QueryAst, index: &Index) -> Result<Partial, EvalError> {
    Ok(match ast {
        QueryAst::MatchAll => Partial::Pos(index.all()),
        QueryAst::FieldTerm { field, value } => Partial::Pos(field_term(index, *field, value)),
        QueryAst::Phrase { field, words } => Partial::Pos(phrase(index, *field, words)),
        QueryAst::YearRange { from, to } => Partial::Pos(year_range(index, *from, *to)),
        QueryAst::Not { child } => match eval_node(child, index)? {
            Partial::Pos(s) => Partial::Neg(s),
            Partial::Neg(s) => Partial::Pos(s),
        },
        QueryAst::And { children } => {
            let mut positive: Option<ResultSet> = None;
            let mut negative: Vec<ResultSet> = Vec::new();
            for child in children {
                match eval_node(child, index)? {
                    Partial::Pos(s) => {
                        positive = Some(match positive {
                            Some(p) => p.intersect(&s),
                            None => s,
                        })
                    }
                    Partial::Neg(s) => negative.push(s),
                }
            }
            let excluded = ResultSet::union_all(&negative);
            match positive {
                Some(p) => Partial::Pos(p.difference(&excluded)),
                None if negative.is_empty() => Partial::Pos(index.all()),
                None => Partial::Neg(excluded),
            }
        }
        QueryAst::Or { children } => {
            let mut sets = Vec::with_capacity(children.len());
            for child in children {
                match eval_node(child, index)? {
                    Partial::Pos(s) => sets.push(s),
                    Partial::Neg(_) => return Err(EvalError::PureNegation),
                }
            }
            Partial::Pos(ResultSet::union_all(&sets))
        }
    })
}

fn field_term(index: &Index, field: QueryField, value: &str) -> ResultSet {
    match field.index_field() {
        Some(f) => ResultSet::from_unsorted(index.postings_slice(f, value).to_vec()),
        None => ResultSet::from_unsorted(
            [Field::Title, Field::Subjects, Field::Persons, Field::Source]
                .iter()
                .flat_map(|&f| index.postings_slice(f, value).iter().copied())
                .collect(),
        ),
    }
}

fn phrase(index: &Index, field: QueryField, words: &[String]) -> ResultSet {
    let text_phrase = |f: Field| {
        let mut candidates: Option<ResultSet> = None;
        for w in words {
            let p = ResultSet::from_unsorted(index.postings_slice(f, w).to_vec());
            candidates = Some(match candidates {
                Some(c) => c.intersect(&p),
                None => p,
            });
        }
        candidates
            .unwrap_or_default()
            .iter()
            .filter(|&ord| {
                let r = index.record(ord);
                let text = match f {
                    Field::Title => r.title.as_str(),
                    _ => r.source.as_deref().unwrap_or(""),
                };
                tokenize(text).windows(words.len()).any(|w| w == words)
            })
            .collect::<ResultSet>()
    };
    let joined = words.join(" ");
    match field {
        QueryField::Title => text_phrase(Field::Title),
        QueryField::Source => text_phrase(Field::Source),
        QueryField::All => ResultSet::union_all(&[
            text_phrase(Field::Title),
            text_phrase(Field::Source),
            field_term(index, QueryField::Keyword, &joined),
            field_term(index, QueryField::Person, &joined),
        ]),
        other => field_term(index, other, &joined),
    }
}

fn year_range(index: &Index, from: i32, to: i32) -> ResultSet {
    let mut hits: Vec<u32> = Vec::new();
    for (key, postings) in index.terms(Field::Year) {
        if key.parse::<i32>().is_ok_and(|y| (from..=to).contains(&y)) {
            hits.extend_from_slice(postings);
        }
    }
    ResultSet::from_unsorted(hits)
}

/// Evaluates a query and its filters to ascending ordinals.
pub fn evaluate(
    ast: &QueryAst,
    filters: &FacetFilters,
    index: &Index,
) -> Result<ResultSet, EvalError> {
    filters.validate()?;
    match eval_node(ast, index)? {
        Partial::Pos(rs) => filters.apply(index, rs),
        Partial::Neg(_) => Err(EvalError::PureNegation),
    }
}

/// Result-list order: newest year first, undated last, then id ascending.
pub fn display_order(index: &Index, rs: &ResultSet) -> Vec<u32> {
    let mut ords: Vec<u32> = rs.ordinals().to_vec();
    ords.sort_unstable_by_key(|&o| index.display_rank(o));
    ords
}

/// The slice `[offset, offset + len)` of [`display_order`] without sorting the rest.
pub fn display_page(index: &Index, rs: &ResultSet, offset: usize, len: usize) -> Vec<u32> {
    let mut ords: Vec<u32> = rs.ordinals().to_vec();
    let end = offset.saturating_add(len).min(ords.len());
    if offset >= end {
        return Vec::new();
    }
    if end < ords.len() {
        ords.select_nth_unstable_by_key(end, |&o| index.display_rank(o));
        ords.truncate(end);
    }
    ords.sort_unstable_by_key(|&o| index.display_rank(o));
    ords.drain(..offset);
    ords
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;
    use crate::record::{InfoType, Record};

    fn corpus() -> Index {
        let mut a = Record::new("a");
        a.title = "The Information Society".into();
        a.persons = vec!["Rainer Kuhlen".into()];
        a.subjects = vec!["internet".into()];
        a.year = Some(2001);
        a.info_type = Some(InfoType::Literature);
        a.database = Some("db1".into());

        let mut b = Record::new("b");
        b.title = "Society and information".into();
        b.persons = vec!["Ullrich Bauer".into()];
        b.subjects = vec!["information society".into()];
        b.year = Some(1995);
        b.info_type = Some(InfoType::Journal);

        let mut c = Record::new("c");
        c.title = "Internet".into();
        c.source = Some("Journal of Internet Studies".into());
        c.persons = vec!["Rainer Kuhlen".into(), "Ullrich Bauer".into()];

        Index::build(vec![a, b, c]).unwrap()
    }

    fn run(q: &str) -> Vec<u32> {
        run_with(q, &FacetFilters::default())
    }

    fn run_with(q: &str, f: &FacetFilters) -> Vec<u32> {
        let idx = corpus();
        evaluate(&parse_query(q).unwrap(), f, &idx)
            .unwrap()
            .ordinals()
            .to_vec()
    }

    #[test]
    fn match_all_returns_everything() {
        assert_eq!(run(""), vec![0, 1, 2]);
    }

    #[test]
    fn contradiction_is_empty() {
        assert!(run("person:bauer AND NOT person:bauer").is_empty());
        assert!(run("internet NOT internet").is_empty());
    }

    #[test]
    fn all_field_spans_title_subjects_persons_source() {
        assert_eq!(run("internet"), vec![0, 2]);
        assert_eq!(run("studies"), vec![2]);
        assert_eq!(run("\"rainer kuhlen\""), vec![0, 2]);
        assert_eq!(run("\"information society\""), vec![0, 1]);
    }

    #[test]
    fn phrases_need_consecutive_tokens() {
        assert_eq!(run("title:\"information society\""), vec![0]);
        assert_eq!(run("title:information title:society"), vec![0, 1]);
        assert_eq!(run("source:\"internet studies\""), vec![2]);
    }

    #[test]
    fn categorical_fields_match_whole_values() {
        assert_eq!(run("person:\"Rainer Kuhlen\""), vec![0, 2]);
        assert!(run("person:kuhlen").is_empty());
        assert_eq!(run("keyword:\"information society\""), vec![1]);
        assert_eq!(run("type:journal"), vec![1]);
        assert_eq!(run("year:[1990 TO 2000]"), vec![1]);
        assert_eq!(run("year:2001"), vec![0]);
    }

    #[test]
    fn negation_rules() {
        let idx = corpus();
        let f = FacetFilters::default();
        for q in ["NOT internet", "NOT a NOT b", "a OR NOT b"] {
            assert_eq!(
                evaluate(&parse_query(q).unwrap(), &f, &idx),
                Err(EvalError::PureNegation),
                "{q}"
            );
        }
        assert_eq!(run("NOT NOT internet"), vec![0, 2]);
        // a negated conjunction of negations nests under a positive sibling
        assert_eq!(
            run("society (NOT internet NOT \"ullrich bauer\")"),
            Vec::<u32>::new()
        );
        assert_eq!(
            run("society AND NOT (internet OR person:\"ullrich bauer\")"),
            Vec::<u32>::new()
        );
        assert_eq!(run("person:\"ullrich bauer\" NOT internet"), vec![1]);
    }

    #[test]
    fn filters_intersect() {
        let f = FacetFilters {
            person: Some("RAINER  kuhlen".into()),
            ..Default::default()
        };
        assert_eq!(run_with("", &f), vec![0, 2]);
        let f = FacetFilters {
            from: Some(2000),
            ..Default::default()
        };
        assert_eq!(run_with("", &f), vec![0]);
        let f = FacetFilters {
            info_type: Some("journal".into()),
            subject: Some("information society".into()),
            to: Some(1995),
            ..Default::default()
        };
        assert_eq!(run_with("", &f), vec![1]);
        let f = FacetFilters {
            database: Some("nope".into()),
            ..Default::default()
        };
        assert!(run_with("", &f).is_empty());
    }

    #[test]
    fn inverted_time_range_is_rejected() {
        let idx = corpus();
        let f = FacetFilters {
            from: Some(2010),
            to: Some(2000),
            ..Default::default()
        };
        assert!(matches!(
            evaluate(&QueryAst::MatchAll, &f, &idx),
            Err(EvalError::InvertedTimeRange { .. })
        ));
    }

    #[test]
    fn display_order_is_recency_then_id() {
        let idx = corpus();
        assert_eq!(display_order(&idx, &idx.all()), vec![0, 1, 2]);
        let mut recs = idx.records().to_vec();
        recs[0].year = Some(1995);
        let idx = Index::build(recs).unwrap();
        assert_eq!(display_order(&idx, &idx.all()), vec![0, 1, 2]);
        let mut recs = idx.records().to_vec();
        recs[2].year = Some(2020);
        let idx = Index::build(recs).unwrap();
        assert_eq!(display_order(&idx, &idx.all()), vec![2, 0, 1]);
    }
}

//! Controlled vocabularies and related-term lookup.
//!
//! A vocabulary file holds `from<TAB>relation<TAB>to` lines. Loading closes
//! the relation set: `broader`/`narrower` are added as inverse pairs and
//! `related`, `translation` and `synonym` in both directions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::graph::coword_recommend;
use crate::index::Index;
use crate::record::fold;

/// Pseudo-vocabulary id selecting the co-word recommender.
pub const RECOMMENDER_ID: &str = "recommender";
/// Suggestions returned by the recommender.
pub const RECOMMENDER_SIZE: usize = 10;

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("vocabulary line {line}: unknown relation {name:?}")]
    UnknownRelation { line: usize, name: String },
    #[error("vocabulary line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unknown vocabulary {0:?}")]
    NotFound(String),
    #[error("{path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Broader,
    Narrower,
    Related,
    Translation,
    Synonym,
}

impl Relation {
    pub const ALL: [Relation; 5] = [
        Relation::Broader,
        Relation::Narrower,
        Relation::Related,
        Relation::Translation,
        Relation::Synonym,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Broader => "broader",
            Relation::Narrower => "narrower",
            Relation::Related => "related",
            Relation::Translation => "translation",
            Relation::Synonym => "synonym",
        }
    }

    pub fn inverse(self) -> Relation {
        match self {
            Relation::Broader => Relation::Narrower,
            Relation::Narrower => Relation::Broader,
            symmetric => symmetric,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Relation::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or(())
    }
}

/// Label on a term-graph edge: a vocabulary relation or a recommender suggestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermRelation {
    Broader,
    Narrower,
    Related,
    Translation,
    Synonym,
    Suggested,
}

impl From<Relation> for TermRelation {
    fn from(r: Relation) -> Self {
        match r {
            Relation::Broader => TermRelation::Broader,
            Relation::Narrower => TermRelation::Narrower,
            Relation::Related => TermRelation::Related,
            Relation::Translation => TermRelation::Translation,
            Relation::Synonym => TermRelation::Synonym,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    id: String,
    // folded key -> display spelling (first seen)
    terms: BTreeMap<String, String>,
    relations: BTreeMap<String, BTreeSet<(Relation, String)>>,
}

impl Vocabulary {
    pub fn new(id: impl Into<String>) -> Self {
        Vocabulary {
            id: id.into(),
            ..Default::default()
        }
    }

    pub fn parse(id: impl Into<String>, text: &str) -> Result<Vocabulary, VocabError> {
        let mut vocab = Vocabulary::new(id);
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [from, relation, to] = cols[..] else {
                return Err(VocabError::Malformed {
                    line: line_no,
                    message: format!("expected 3 tab-separated columns, found {}", cols.len()),
                });
            };
            let relation: Relation =
                relation
                    .trim()
                    .parse()
                    .map_err(|_| VocabError::UnknownRelation {
                        line: line_no,
                        name: relation.to_string(),
                    })?;
            let (from, to) = (clean(from), clean(to));
            if from.is_empty() || to.is_empty() {
                return Err(VocabError::Malformed {
                    line: line_no,
                    message: "empty term".into(),
                });
            }
            vocab.add(&from, relation, &to);
        }
        Ok(vocab)
    }

    pub fn load(id: impl Into<String>, path: &Path) -> Result<Vocabulary, VocabError> {
        let text = fs::read_to_string(path).map_err(|source| VocabError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Vocabulary::parse(id, &text)
    }

    /// Adds a relation together with its inverse. Self-relations are ignored.
    pub fn add(&mut self, from: &str, relation: Relation, to: &str) {
        let (fk, tk) = (fold(from), fold(to));
        self.terms
            .entry(fk.clone())
            .or_insert_with(|| from.to_string());
        self.terms
            .entry(tk.clone())
            .or_insert_with(|| to.to_string());
        if fk == tk {
            return;
        }
        self.relations
            .entry(fk.clone())
            .or_default()
            .insert((relation, tk.clone()));
        self.relations
            .entry(tk)
            .or_default()
            .insert((relation.inverse(), fk));
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn display(&self, term: &str) -> Option<&str> {
        self.terms.get(&fold(term)).map(String::as_str)
    }

    /// Every stored (from, relation, to) triple over folded terms.
    pub fn triples(&self) -> impl Iterator<Item = (&str, Relation, &str)> + '_ {
        self.relations.iter().flat_map(|(from, set)| {
            set.iter()
                .map(move |(r, to)| (from.as_str(), *r, to.as_str()))
        })
    }

    pub fn contains(&self, from: &str, relation: Relation, to: &str) -> bool {
        self.relations
            .get(&fold(from))
            .is_some_and(|s| s.contains(&(relation, fold(to))))
    }

    /// Direct neighbours of a term, ordered by relation then term.
    pub fn neighbors(&self, term: &str) -> Vec<(Relation, &str)> {
        self.relations
            .get(&fold(term.trim()))
            .map(|set| {
                set.iter()
                    .map(|(r, t)| (*r, self.terms[t].as_str()))
                    .collect()
            })
            .unwrap_or_default()
    }
}

fn clean(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermNeighbor {
    pub term: String,
    pub relation: TermRelation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermGraph {
    pub center: String,
    pub neighbors: Vec<TermNeighbor>,
    pub vocabulary: String,
}

/// Loaded vocabularies by id.
#[derive(Debug, Default)]
pub struct Vocabularies {
    by_id: BTreeMap<String, Vocabulary>,
}

impl Vocabularies {
    pub fn new() -> Self {
        Vocabularies::default()
    }

    pub fn insert(&mut self, vocab: Vocabulary) {
        self.by_id.insert(vocab.id.clone(), vocab);
    }

    pub fn get(&self, id: &str) -> Option<&Vocabulary> {
        self.by_id.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.by_id.keys().map(String::as_str)
    }

    /// One-hop related terms. With `recommender` set the neighbours are the
    /// top co-word suggestions from `index` instead of a vocabulary.
    pub fn related_terms(
        &self,
        term: &str,
        vocab_id: &str,
        recommender: bool,
        index: &Index,
    ) -> Result<TermGraph, VocabError> {
        let term = clean(term);
        if recommender {
            let neighbors = coword_recommend(index, &term, RECOMMENDER_SIZE)
                .into_iter()
                .map(|c| TermNeighbor {
                    term: c.keyword,
                    relation: TermRelation::Suggested,
                })
                .collect();
            return Ok(TermGraph {
                center: term,
                neighbors,
                vocabulary: RECOMMENDER_ID.to_string(),
            });
        }
        let vocab = self
            .get(vocab_id)
            .ok_or_else(|| VocabError::NotFound(vocab_id.to_string()))?;
        Ok(TermGraph {
            center: vocab.display(&term).unwrap_or(&term).to_string(),
            neighbors: vocab
                .neighbors(&term)
                .into_iter()
                .map(|(r, t)| TermNeighbor {
                    term: t.to_string(),
                    relation: r.into(),
                })
                .collect(),
            vocabulary: vocab.id.clone(),
        })
    }
}

//! Co-author network and co-word keyword recommendations.

use std::collections::HashMap;

use serde::Serialize;

use crate::index::{Field, Index, ResultSet};
use crate::record::fold;

/// Authors shown in the co-author network.
pub const COAUTHOR_NODE_LIMIT: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuthorNode {
    pub name: String,
    pub count: usize,
}

/// Undirected edge; `a` sorts before `b` case-folded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoAuthorEdge {
    pub a: String,
    pub b: String,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoAuthorGraph {
    pub nodes: Vec<AuthorNode>,
    pub edges: Vec<CoAuthorEdge>,
}

/// Co-authorship among the 50 most frequent authors of `rs`.
///
/// Edges are ordered by shared-document count, then by endpoint names.
pub fn coauthor_graph(index: &Index, rs: &ResultSet) -> CoAuthorGraph {
    let top = index
        .facet_counts(rs, Field::Persons, COAUTHOR_NODE_LIMIT)
        .expect("persons is a categorical field");
    let keys: Vec<String> = top.iter().map(|n| fold(&n.value)).collect();
    let slot: HashMap<&str, usize> = keys
        .iter()
        .enumerate()
        .map(|(i, k)| (k.as_str(), i))
        .collect();

    let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
    let mut present: Vec<usize> = Vec::new();
    for ord in rs.iter() {
        present.clear();
        present.extend(
            index
                .doc_keys(Field::Persons, ord)
                .filter_map(|k| slot.get(k).copied()),
        );
        present.sort_unstable_by(|&x, &y| keys[x].cmp(&keys[y]));
        for (i, &x) in present.iter().enumerate() {
            for &y in &present[i + 1..] {
                *pairs.entry((x, y)).or_default() += 1;
            }
        }
    }

    let mut edges: Vec<((usize, usize), usize)> = pairs.into_iter().collect();
    edges.sort_unstable_by(|((a1, b1), c1), ((a2, b2), c2)| {
        c2.cmp(c1)
            .then_with(|| keys[*a1].cmp(&keys[*a2]))
            .then_with(|| keys[*b1].cmp(&keys[*b2]))
    });
    CoAuthorGraph {
        edges: edges
            .into_iter()
            .map(|((a, b), count)| CoAuthorEdge {
                a: top[a].value.clone(),
                b: top[b].value.clone(),
                count,
            })
            .collect(),
        nodes: top
            .into_iter()
            .map(|f| AuthorNode {
                name: f.value,
                count: f.count,
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoWord {
    pub keyword: String,
    pub count: usize,
}

/// Keywords that co-occur with `term` across the whole corpus, by document co-count.
pub fn coword_recommend(index: &Index, term: &str, k: usize) -> Vec<CoWord> {
    let key = fold(term.trim());
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for &ord in index.postings_slice(Field::Subjects, &key) {
        for other in index.doc_keys(Field::Subjects, ord) {
            if other != key {
                *counts.entry(other).or_default() += 1;
            }
        }
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(k);
    ranked
        .into_iter()
        .map(|(kw, count)| CoWord {
            keyword: index.display(Field::Subjects, kw).unwrap_or(kw).to_string(),
            count,
        })
        .collect()
}

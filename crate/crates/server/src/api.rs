//! Request dispatch shared by the HTTP server and the `query` subcommand.
//!
//! Every endpoint takes a flat string map of parameters and returns a JSON
//! body. Bodies depend only on the index, the parameters and the reference
//! year, so identical requests produce identical bytes.

use std::collections::BTreeMap;
use std::fmt;

use anyhow::Result;
use serde::Serialize;

use dlviz_core::analytics::{spatial_distribution, temporal_distribution};
use dlviz_core::gazetteer::{Gazetteer, GazetteerError};
use dlviz_core::graph::coauthor_graph;
use dlviz_core::linking::linking_table_for;
use dlviz_core::query::{display_page, evaluate, parse_query, FacetFilters, QueryAst};
use dlviz_core::vocab::{VocabError, Vocabularies, Vocabulary, RECOMMENDER_ID};
use dlviz_core::{FacetCount, Field, Index, Record, ResultSet};

use crate::config::{ServiceConfig, MAX_PAGE_SIZE};

pub type Params = BTreeMap<String, String>;

pub const ENDPOINTS: [&str; 7] = [
    "search",
    "facets",
    "temporal",
    "spatial",
    "coauthors",
    "linking",
    "terms",
];

pub const DEFAULT_FACET_SIZE: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
}

impl ApiError {
    fn bad_request(error: impl Into<String>) -> Self {
        ApiError {
            status: 400,
            error: error.into(),
            offset: None,
        }
    }

    fn not_found(error: impl Into<String>) -> Self {
        ApiError {
            status: 404,
            error: error.into(),
            offset: None,
        }
    }

    pub fn body(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset {
            Some(offset) => write!(f, "{} (at offset {offset})", self.error),
            None => f.write_str(&self.error),
        }
    }
}

impl std::error::Error for ApiError {}

#[derive(Serialize)]
struct SearchPage<'a> {
    query: String,
    filters: &'a FacetFilters,
    total: usize,
    page: usize,
    size: usize,
    records: Vec<&'a Record>,
}

#[derive(Serialize)]
struct FacetsPayload {
    field: &'static str,
    k: usize,
    total: usize,
    counts: Vec<FacetCount>,
}

/// Loaded state behind the API. Immutable after construction.
pub struct Service {
    index: Index,
    gazetteer: Gazetteer,
    vocabularies: Vocabularies,
    reference_year: i32,
    page_size: usize,
}

impl Service {
    pub fn new(index: Index, reference_year: i32) -> Self {
        Service {
            index,
            gazetteer: Gazetteer::default(),
            vocabularies: Vocabularies::new(),
            reference_year,
            page_size: crate::config::DEFAULT_PAGE_SIZE,
        }
    }

    pub fn with_gazetteer(mut self, gazetteer: Gazetteer) -> Self {
        self.gazetteer = gazetteer;
        self
    }

    pub fn with_vocabulary(mut self, vocab: Vocabulary) -> Self {
        self.vocabularies.insert(vocab);
        self
    }

    pub fn with_page_size(mut self, page_size: usize) -> Self {
        self.page_size = page_size;
        self
    }

    pub fn from_config(cfg: &ServiceConfig) -> Result<Service> {
        cfg.validate()?;
        let index = Index::load(&cfg.index_dir)?;
        let mut service = Service::new(index, cfg.reference_year.unwrap_or_else(current_year))
            .with_page_size(cfg.page_size);
        if let Some(path) = &cfg.gazetteer {
            service.gazetteer = load_gazetteer(path)?;
        }
        for (id, path) in &cfg.vocabularies {
            service
                .vocabularies
                .insert(Vocabulary::load(id.as_str(), path)?);
        }
        Ok(service)
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    pub fn reference_year(&self) -> i32 {
        self.reference_year
    }

    /// Runs endpoint `kind` and returns its JSON body.
    pub fn handle(&self, kind: &str, params: &Params) -> Result<String, ApiError> {
        match kind {
            "search" => self.search(params),
            "facets" => {
                let field: Field = required(params, "field")?.parse().map_err(|_| {
                    ApiError::bad_request(format!("unknown field {:?}", params["field"]))
                })?;
                let k = number(params, "k")?.unwrap_or(DEFAULT_FACET_SIZE);
                let rs = self.result_set(params)?;
                let counts = self
                    .index
                    .facet_counts(&rs, field, k)
                    .map_err(|e| ApiError::bad_request(e.to_string()))?;
                json(&FacetsPayload {
                    field: field.as_str(),
                    k,
                    total: rs.total(),
                    counts,
                })
            }
            "temporal" => {
                let year = number(params, "ref_year")?.unwrap_or(self.reference_year);
                json(&temporal_distribution(
                    &self.index,
                    &self.result_set(params)?,
                    year,
                ))
            }
            "spatial" => json(&spatial_distribution(
                &self.index,
                &self.result_set(params)?,
                &self.gazetteer,
            )),
            "coauthors" => json(&coauthor_graph(&self.index, &self.result_set(params)?)),
            "linking" => json(&linking_table_for(&self.index, &self.result_set(params)?)),
            "terms" => {
                let term = required(params, "term")?;
                let vocab = params.get("vocab").map_or(RECOMMENDER_ID, String::as_str);
                let graph = self
                    .vocabularies
                    .related_terms(term, vocab, vocab == RECOMMENDER_ID, &self.index)
                    .map_err(|e| match e {
                        VocabError::NotFound(_) => ApiError::not_found(e.to_string()),
                        other => ApiError::bad_request(other.to_string()),
                    })?;
                json(&graph)
            }
            other => Err(ApiError::not_found(format!("unknown endpoint {other:?}"))),
        }
    }

    fn search(&self, params: &Params) -> Result<String, ApiError> {
        let page = number(params, "page")?.unwrap_or(0usize);
        let size = number(params, "size")?.unwrap_or(self.page_size);
        if !(1..=MAX_PAGE_SIZE).contains(&size) {
            return Err(ApiError::bad_request(format!(
                "size {size} outside 1..={MAX_PAGE_SIZE}"
            )));
        }
        let ast = query(params)?;
        let filters = filters(params)?;
        let rs = run(&ast, &filters, &self.index)?;
        let ords = display_page(&self.index, &rs, page.saturating_mul(size), size);
        json(&SearchPage {
            query: ast.to_string(),
            filters: &filters,
            total: rs.total(),
            page,
            size,
            records: ords.into_iter().map(|o| self.index.record(o)).collect(),
        })
    }

    fn result_set(&self, params: &Params) -> Result<ResultSet, ApiError> {
        run(&query(params)?, &filters(params)?, &self.index)
    }
}

fn run(ast: &QueryAst, filters: &FacetFilters, index: &Index) -> Result<ResultSet, ApiError> {
    evaluate(ast, filters, index).map_err(|e| ApiError::bad_request(e.to_string()))
}

fn json<T: Serialize>(value: &T) -> Result<String, ApiError> {
    Ok(serde_json::to_string(value).expect("payload serializes"))
}

/// A parameter counts as absent when missing or blank.
fn param<'a>(params: &'a Params, name: &str) -> Option<&'a str> {
    params.get(name).map(|v| v.trim()).filter(|v| !v.is_empty())
}

fn required<'a>(params: &'a Params, name: &str) -> Result<&'a str, ApiError> {
    param(params, name).ok_or_else(|| ApiError::bad_request(format!("missing parameter {name}")))
}

fn number<T: std::str::FromStr>(params: &Params, name: &str) -> Result<Option<T>, ApiError> {
    param(params, name)
        .map(|v| {
            v.parse()
                .map_err(|_| ApiError::bad_request(format!("invalid {name}: {v:?}")))
        })
        .transpose()
}

fn query(params: &Params) -> Result<QueryAst, ApiError> {
    parse_query(params.get("q").map_or("", String::as_str)).map_err(|e| ApiError {
        status: 400,
        error: e.message.clone(),
        offset: Some(e.offset),
    })
}

pub fn filters(params: &Params) -> Result<FacetFilters, ApiError> {
    let text = |name| param(params, name).map(str::to_string);
    Ok(FacetFilters {
        info_type: text("type"),
        database: text("database"),
        person: text("person"),
        subject: text("subject"),
        from: number(params, "from")?,
        to: number(params, "to")?,
    })
}

/// Loads a gazetteer; parse errors are prefixed with the file path.
pub fn load_gazetteer(path: &std::path::Path) -> Result<Gazetteer> {
    Gazetteer::load(path).map_err(|e| match e {
        GazetteerError::Io { .. } => anyhow::anyhow!(e),
        other => anyhow::anyhow!(other).context(path.display().to_string()),
    })
}

pub fn current_year() -> i32 {
    time::OffsetDateTime::now_utc().year()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn service() -> Service {
        let records = (0..5).map(|i| {
            let mut r = Record::new(format!("r{i}"));
            r.title = format!("paper {i}");
            r.persons = vec![if i % 2 == 0 {
                "Rainer Kuhlen"
            } else {
                "Ullrich Bauer"
            }
            .into()];
            r.year = Some(2000 + i);
            r
        });
        Service::new(Index::build(records).unwrap(), 2010)
    }

    fn params(pairs: &[(&str, &str)]) -> Params {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn search_pages_in_display_order() {
        let s = service();
        let body: serde_json::Value = serde_json::from_str(
            &s.handle("search", &params(&[("size", "2"), ("page", "1")]))
                .unwrap(),
        )
        .unwrap();
        assert_eq!(body["total"], 5);
        let ids: Vec<&str> = body["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["id"].as_str().unwrap())
            .collect();
        assert_eq!(ids, ["r2", "r1"]);
    }

    #[test]
    fn errors_map_to_statuses() {
        let s = service();
        let e = s
            .handle("search", &params(&[("q", "title:(")]))
            .unwrap_err();
        assert_eq!((e.status, e.offset), (400, Some(6)));
        assert_eq!(
            s.handle("search", &params(&[("size", "101")]))
                .unwrap_err()
                .status,
            400
        );
        assert_eq!(
            s.handle("search", &params(&[("size", "0")]))
                .unwrap_err()
                .status,
            400
        );
        assert_eq!(
            s.handle("search", &params(&[("from", "x")]))
                .unwrap_err()
                .status,
            400
        );
        assert_eq!(
            s.handle("search", &params(&[("q", "NOT a")]))
                .unwrap_err()
                .status,
            400
        );
        assert_eq!(s.handle("histogram", &params(&[])).unwrap_err().status, 404);
        assert_eq!(
            s.handle("facets", &params(&[("field", "title")]))
                .unwrap_err()
                .status,
            400
        );
        assert_eq!(
            s.handle("facets", &params(&[("field", "persons"), ("k", "0")]))
                .unwrap_err()
                .status,
            400
        );
        assert_eq!(
            s.handle("terms", &params(&[("term", "x"), ("vocab", "nope")]))
                .unwrap_err()
                .status,
            404
        );
        assert_eq!(
            s.handle("terms", &params(&[("term", " ")]))
                .unwrap_err()
                .status,
            400
        );
    }

    #[test]
    fn blank_filters_are_ignored() {
        let s = service();
        let a = s
            .handle("search", &params(&[("person", ""), ("type", " ")]))
            .unwrap();
        assert_eq!(a, s.handle("search", &params(&[])).unwrap());
        let b: serde_json::Value = serde_json::from_str(
            &s.handle("search", &params(&[("person", "rainer kuhlen")]))
                .unwrap(),
        )
        .unwrap();
        assert_eq!(b["total"], 3);
        assert_eq!(b["filters"]["person"], "rainer kuhlen");
    }
}

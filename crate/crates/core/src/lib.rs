//! Faceted search over bibliographic metadata with the aggregates behind a
//! coordinated-views interface: temporal and spatial distributions, top-K
//! facets, co-author and related-term graphs, and weighted-brushing linking
//! tables.
//!
//! ```
//! use dlviz_core::{index::Index, query::{evaluate, parse_query, FacetFilters}, record::parse_record};
//!
//! let rec = parse_record(r#"{"id":"d1","title":"The information society","persons":["A"]}"#).unwrap();
//! let index = Index::build(vec![rec]).unwrap();
//! let ast = parse_query("information society").unwrap();
//! let hits = evaluate(&ast, &FacetFilters::default(), &index).unwrap();
//! assert_eq!(hits.total(), 1);
//! ```

pub mod analytics;
pub mod gazetteer;
pub mod graph;
pub mod index;
pub mod linking;
pub mod query;
pub mod record;
pub mod vocab;

pub use index::{FacetCount, Field, Index, ResultSet};
pub use record::Record;

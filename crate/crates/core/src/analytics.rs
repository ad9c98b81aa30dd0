//! Chart-ready aggregates for the temporal, spatial and top-K facet views.

use serde::Serialize;

use crate::gazetteer::Gazetteer;
use crate::index::{FacetCount, Field, Index, IndexError, ResultSet};

/// Width of the temporal window, in years, ending at the reference year.
pub const TEMPORAL_WINDOW_YEARS: i32 = 50;
/// Data spans shorter than this many years are drawn as bars, longer as lines.
pub const LINE_CHART_MIN_SPAN: i32 = 15;
/// Bars shown in a facet chart.
pub const TOP_FACET_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Bar,
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct YearBin {
    pub year: i32,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemporalHistogram {
    pub bins: Vec<YearBin>,
    pub chart_kind: ChartKind,
    pub covered: usize,
    pub uncovered: usize,
}

impl TemporalHistogram {
    /// Years from the first to the last non-empty bin, inclusive; 0 when empty.
    pub fn nonzero_span(&self) -> i32 {
        let mut nonzero = self.bins.iter().filter(|b| b.count > 0).map(|b| b.year);
        match nonzero.next() {
            None => 0,
            Some(first) => nonzero.next_back().unwrap_or(first) - first + 1,
        }
    }
}

/// Chart style for a data span.
pub fn chart_kind_for_span(span: i32) -> ChartKind {
    if span < LINE_CHART_MIN_SPAN {
        ChartKind::Bar
    } else {
        ChartKind::Line
    }
}

/// Per-year document counts over `[reference_year - 49, reference_year]`.
pub fn temporal_distribution(
    index: &Index,
    rs: &ResultSet,
    reference_year: i32,
) -> TemporalHistogram {
    let first = reference_year - (TEMPORAL_WINDOW_YEARS - 1);
    let mut bins: Vec<YearBin> = (first..=reference_year)
        .map(|year| YearBin { year, count: 0 })
        .collect();
    let mut covered = 0;
    for ord in rs.iter() {
        if let Some(year) = index.record(ord).year {
            if (first..=reference_year).contains(&year) {
                bins[(year - first) as usize].count += 1;
                covered += 1;
            }
        }
    }
    let mut hist = TemporalHistogram {
        bins,
        chart_kind: ChartKind::Bar,
        covered,
        uncovered: rs.len() - covered,
    };
    hist.chart_kind = chart_kind_for_span(hist.nonzero_span());
    hist
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialBucket {
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnresolvedLocation {
    pub name: String,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundingBox {
    pub min_lat: f64,
    pub max_lat: f64,
    pub min_lon: f64,
    pub max_lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialBuckets {
    pub buckets: Vec<SpatialBucket>,
    pub unresolved: Vec<UnresolvedLocation>,
    pub bbox: Option<BoundingBox>,
}

/// One bucket per distinct resolvable location among `rs`, ordered by count then name.
pub fn spatial_distribution(
    index: &Index,
    rs: &ResultSet,
    gazetteer: &Gazetteer,
) -> SpatialBuckets {
    let counts = index
        .facet_counts(rs, Field::Locations, usize::MAX)
        .expect("locations is a categorical field");
    let mut buckets = Vec::new();
    let mut unresolved = Vec::new();
    for FacetCount { value, count } in counts {
        match gazetteer.resolve(&value) {
            Some(c) => buckets.push(SpatialBucket {
                name: value,
                lat: c.lat,
                lon: c.lon,
                count,
            }),
            None => unresolved.push(UnresolvedLocation { name: value, count }),
        }
    }
    let bbox = buckets.iter().fold(None, |acc: Option<BoundingBox>, b| {
        Some(match acc {
            None => BoundingBox {
                min_lat: b.lat,
                max_lat: b.lat,
                min_lon: b.lon,
                max_lon: b.lon,
            },
            Some(bb) => BoundingBox {
                min_lat: bb.min_lat.min(b.lat),
                max_lat: bb.max_lat.max(b.lat),
                min_lon: bb.min_lon.min(b.lon),
                max_lon: bb.max_lon.max(b.lon),
            },
        })
    });
    SpatialBuckets {
        buckets,
        unresolved,
        bbox,
    }
}

/// Top 50 values of a categorical field.
pub fn top_facet_chart(
    index: &Index,
    rs: &ResultSet,
    field: Field,
) -> Result<Vec<FacetCount>, IndexError> {
    index.facet_counts(rs, field, TOP_FACET_LIMIT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gazetteer::Coordinates;
    use crate::record::Record;

    fn dated(years: &[i32]) -> Index {
        Index::build(years.iter().enumerate().map(|(i, &y)| {
            let mut r = Record::new(format!("d{i}"));
            r.year = Some(y);
            r
        }))
        .unwrap()
    }

    #[test]
    fn empty_histogram() {
        let idx = dated(&[]);
        let h = temporal_distribution(&idx, &ResultSet::empty(), 2010);
        assert_eq!(h.bins.len(), 50);
        assert!(h.bins.iter().all(|b| b.count == 0));
        assert_eq!(h.chart_kind, ChartKind::Bar);
        assert_eq!((h.covered, h.uncovered), (0, 0));
        assert_eq!(h.bins[0].year, 1961);
        assert_eq!(h.bins[49].year, 2010);
    }

    #[test]
    fn short_span_is_bar() {
        let idx = dated(&[2000, 2000, 2000, 2005]);
        let h = temporal_distribution(&idx, &idx.all(), 2010);
        assert_eq!(h.nonzero_span(), 6);
        assert_eq!(h.chart_kind, ChartKind::Bar);
        assert_eq!(h.bins.iter().find(|b| b.year == 2000).unwrap().count, 3);
        assert_eq!(h.bins.iter().find(|b| b.year == 2005).unwrap().count, 1);
        assert_eq!(h.covered, 4);
    }

    #[test]
    fn span_boundary() {
        let idx = dated(&[1990, 2003]);
        let h = temporal_distribution(&idx, &idx.all(), 2010);
        assert_eq!(h.nonzero_span(), 14);
        assert_eq!(h.chart_kind, ChartKind::Bar);
        let idx = dated(&[1990, 2004]);
        let h = temporal_distribution(&idx, &idx.all(), 2010);
        assert_eq!(h.nonzero_span(), 15);
        assert_eq!(h.chart_kind, ChartKind::Line);
    }

    #[test]
    fn out_of_window_and_undated_are_uncovered() {
        let mut recs: Vec<Record> = (0..3).map(|i| Record::new(format!("r{i}"))).collect();
        recs[0].year = Some(1950);
        recs[1].year = Some(2011);
        let idx = Index::build(recs).unwrap();
        let h = temporal_distribution(&idx, &idx.all(), 2010);
        assert_eq!((h.covered, h.uncovered), (0, 3));
    }

    #[test]
    fn spatial_hand_example() {
        let mut recs: Vec<Record> = (0..4).map(|i| Record::new(format!("r{i}"))).collect();
        recs[0].locations = vec!["Germany".into()];
        recs[1].locations = vec!["germany".into(), "Atlantis".into()];
        recs[2].locations = vec!["Spain".into()];
        let idx = Index::build(recs).unwrap();
        let mut g = Gazetteer::default();
        g.insert(
            "Germany",
            Coordinates {
                lat: 51.0,
                lon: 10.0,
            },
        );
        g.insert(
            "Spain",
            Coordinates {
                lat: 40.4,
                lon: -3.7,
            },
        );

        let s = spatial_distribution(&idx, &idx.all(), &g);
        let names: Vec<_> = s
            .buckets
            .iter()
            .map(|b| (b.name.as_str(), b.count))
            .collect();
        assert_eq!(names, vec![("Germany", 2), ("Spain", 1)]);
        assert_eq!(
            s.unresolved,
            vec![UnresolvedLocation {
                name: "Atlantis".into(),
                count: 1
            }]
        );
        assert_eq!(
            s.bbox,
            Some(BoundingBox {
                min_lat: 40.4,
                max_lat: 51.0,
                min_lon: -3.7,
                max_lon: 10.0
            })
        );

        let empty = spatial_distribution(&idx, &ResultSet::empty(), &g);
        assert!(empty.buckets.is_empty() && empty.bbox.is_none());
    }

    #[test]
    fn top_facet_chart_caps_at_fifty() {
        let recs = (0..80).map(|i| {
            let mut r = Record::new(format!("r{i}"));
            r.subjects = vec![format!("subject {i:02}")];
            r
        });
        let idx = Index::build(recs).unwrap();
        assert_eq!(
            top_facet_chart(&idx, &idx.all(), Field::Subjects)
                .unwrap()
                .len(),
            50
        );
        let small = idx.all().iter().take(3).collect::<ResultSet>();
        assert_eq!(
            top_facet_chart(&idx, &small, Field::Subjects)
                .unwrap()
                .len(),
            3
        );
    }
}

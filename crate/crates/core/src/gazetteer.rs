//! Location name to coordinate lookup, loaded from a tab-separated file.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::record::fold;

#[derive(Debug, Error)]
pub enum GazetteerError {
    #[error("gazetteer line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("{path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coordinates {
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    places: HashMap<String, Coordinates>,
}

impl Gazetteer {
    /// Parses `name<TAB>lat<TAB>lon` lines. Blank lines and `#` comments are
    /// skipped; a later entry for the same (case-folded) name replaces the earlier one.
    pub fn parse(text: &str) -> Result<Gazetteer, GazetteerError> {
        let mut places = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let malformed = |message: String| GazetteerError::Malformed {
                line: line_no,
                message,
            };
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [name, lat, lon] = cols[..] else {
                return Err(malformed(format!(
                    "expected 3 tab-separated columns, found {}",
                    cols.len()
                )));
            };
            let name = name.split_whitespace().collect::<Vec<_>>().join(" ");
            if name.is_empty() {
                return Err(malformed("empty place name".into()));
            }
            let lat: f64 = lat
                .trim()
                .parse()
                .map_err(|_| malformed(format!("invalid latitude {lat:?}")))?;
            let lon: f64 = lon
                .trim()
                .parse()
                .map_err(|_| malformed(format!("invalid longitude {lon:?}")))?;
            if !(-90.0..=90.0).contains(&lat) {
                return Err(malformed(format!("latitude {lat} outside [-90, 90]")));
            }
            if !(-180.0..=180.0).contains(&lon) {
                return Err(malformed(format!("longitude {lon} outside [-180, 180]")));
            }
            places.insert(fold(&name), Coordinates { lat, lon });
        }
        Ok(Gazetteer { places })
    }

    pub fn load(path: &Path) -> Result<Gazetteer, GazetteerError> {
        let text = fs::read_to_string(path).map_err(|source| GazetteerError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Gazetteer::parse(&text)
    }

    pub fn insert(&mut self, name: &str, coords: Coordinates) {
        self.places.insert(fold(name), coords);
    }

    pub fn resolve(&self, name: &str) -> Option<Coordinates> {
        self.places.get(&fold(name)).copied()
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let g = Gazetteer::parse(
            "Germany\t51.0\t10.0\n\n# comment\nSpain\t40.4\t-3.7\ngermany\t52.5\t13.4\n",
        )
        .unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(
            g.resolve("GERMANY"),
            Some(Coordinates {
                lat: 52.5,
                lon: 13.4
            })
        );
        assert_eq!(g.resolve("Atlantis"), None);
    }

    #[test]
    fn rejects_bad_lines_with_line_numbers() {
        for (text, line) in [
            ("A\t1\t2\nB\t1\n", 2),
            ("A\tx\t2\n", 1),
            ("A\t1\t2\nB\t91\t0\n", 2),
            ("A\t0\t-180.5\n", 1),
            ("\t0\t0\n", 1),
        ] {
            match Gazetteer::parse(text) {
                Err(GazetteerError::Malformed { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn nan_coordinates_are_rejected() {
        assert!(Gazetteer::parse("A\tNaN\t0\n").is_err());
    }
}

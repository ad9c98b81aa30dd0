//! Service configuration, loaded from TOML or assembled from CLI flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use dlviz_core::vocab::RECOMMENDER_ID;

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_PAGE_SIZE: usize = 20;
/// Largest page a search request may ask for.
pub const MAX_PAGE_SIZE: usize = 100;

/// ```toml
/// port = 8080
/// index_dir = "index"
/// gazetteer = "places.tsv"
/// static_dir = "ui/dist"
/// reference_year = 2014
/// page_size = 20
/// cors_origin = "http://localhost:5173"
///
/// [vocabularies]
/// thesaurus = "thesaurus.tsv"
/// ```
///
/// Relative paths resolve against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_port")]
    pub port: u32,
    pub index_dir: PathBuf,
    #[serde(default)]
    pub gazetteer: Option<PathBuf>,
    #[serde(default)]
    pub vocabularies: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub static_dir: Option<PathBuf>,
    #[serde(default)]
    pub reference_year: Option<i32>,
    #[serde(default = "default_page_size")]
    pub page_size: usize,
    /// `"*"` allows any origin; unset sends no CORS headers.
    #[serde(default)]
    pub cors_origin: Option<String>,
}

fn default_port() -> u32 {
    DEFAULT_PORT as u32
}

fn default_page_size() -> usize {
    DEFAULT_PAGE_SIZE
}

impl ServiceConfig {
    pub fn new(index_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            port: default_port(),
            index_dir: index_dir.into(),
            gazetteer: None,
            vocabularies: BTreeMap::new(),
            static_dir: None,
            reference_year: None,
            page_size: DEFAULT_PAGE_SIZE,
            cors_origin: None,
        }
    }

    pub fn parse(text: &str, base: &Path) -> Result<ServiceConfig> {
        let mut cfg: ServiceConfig = toml::from_str(text)?;
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut cfg.index_dir);
        cfg.gazetteer.as_mut().map(fix);
        cfg.static_dir.as_mut().map(fix);
        cfg.vocabularies.values_mut().for_each(fix);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ServiceConfig> {
        let text = fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        ServiceConfig::parse(&text, base).with_context(|| format!("{}", path.display()))
    }

    pub fn port(&self) -> u16 {
        self.port as u16
    }

    /// Checks the port range, the page size and that every path can be read.
    pub fn validate(&self) -> Result<()> {
        if !(1..=65535).contains(&self.port) {
            bail!("port {} outside 1..=65535", self.port);
        }
        if !(1..=MAX_PAGE_SIZE).contains(&self.page_size) {
            bail!("page_size {} outside 1..={MAX_PAGE_SIZE}", self.page_size);
        }
        if self.vocabularies.contains_key(RECOMMENDER_ID) {
            bail!("vocabulary id {RECOMMENDER_ID:?} is reserved for the co-word recommender");
        }
        readable_dir(&self.index_dir)?;
        if let Some(dir) = &self.static_dir {
            readable_dir(dir)?;
        }
        for path in self.gazetteer.iter().chain(self.vocabularies.values()) {
            fs::File::open(path).with_context(|| format!("{}", path.display()))?;
        }
        Ok(())
    }
}

fn readable_dir(path: &Path) -> Result<()> {
    fs::read_dir(path)
        .map(drop)
        .with_context(|| format!("{}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_resolves_relative_paths() {
        let cfg = ServiceConfig::parse(
            "port = 9000\nindex_dir = \"idx\"\ngazetteer = \"/abs/places.tsv\"\n[vocabularies]\nthes = \"t.tsv\"\n",
            Path::new("/etc/dlviz"),
        )
        .unwrap();
        assert_eq!(cfg.port(), 9000);
        assert_eq!(cfg.index_dir, PathBuf::from("/etc/dlviz/idx"));
        assert_eq!(cfg.gazetteer, Some(PathBuf::from("/abs/places.tsv")));
        assert_eq!(cfg.vocabularies["thes"], PathBuf::from("/etc/dlviz/t.tsv"));
        assert_eq!(cfg.page_size, DEFAULT_PAGE_SIZE);
    }

    #[test]
    fn rejects_bad_ports_and_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ServiceConfig::new(dir.path());
        cfg.validate().unwrap();
        for port in [0, 65536] {
            cfg.port = port;
            assert!(cfg.validate().unwrap_err().to_string().contains("port"));
        }
        assert!(ServiceConfig::parse("index_dir = \"x\"\nbogus = 1\n", Path::new(".")).is_err());
    }

    #[test]
    fn unreadable_paths_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ServiceConfig::new(dir.path());
        cfg.gazetteer = Some(dir.path().join("nope.tsv"));
        let err = format!("{:#}", cfg.validate().unwrap_err());
        assert!(err.contains("nope.tsv"), "{err}");
    }
}

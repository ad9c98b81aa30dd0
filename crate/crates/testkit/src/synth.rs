//! Seeded synthetic corpora and random query trees.

use dlviz_core::query::{QueryAst, QueryField};
use dlviz_core::record::{InfoType, Record};
use rand::seq::SliceRandom;
use rand::Rng;

const WORDS: &[&str] = &[
    "information",
    "society",
    "internet",
    "digital",
    "library",
    "social",
    "science",
    "network",
    "media",
    "policy",
    "education",
    "labour",
    "market",
    "migration",
    "youth",
    "health",
];

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub docs: usize,
    pub persons: usize,
    pub keywords: usize,
    pub locations: usize,
    pub first_year: i32,
    pub last_year: i32,
}

impl SynthConfig {
    pub fn new(docs: usize, vocabulary: usize) -> Self {
        SynthConfig {
            docs,
            persons: vocabulary,
            keywords: vocabulary,
            locations: vocabulary,
            first_year: 1960,
            last_year: 2010,
        }
    }

    /// Random sizes in the ranges used by the acceptance suite.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        SynthConfig {
            docs: rng.gen_range(100..=1000),
            persons: rng.gen_range(3..=30),
            keywords: rng.gen_range(3..=30),
            locations: rng.gen_range(3..=30),
            first_year: 1960,
            last_year: 2010,
        }
    }
}

pub fn person_name(i: usize) -> String {
    format!("Author {i:03}")
}

pub fn keyword_name(i: usize) -> String {
    format!("keyword {i:03}")
}

pub fn location_name(i: usize) -> String {
    format!("Place {i:03}")
}

// Skewed toward low indices so top-K lists are meaningful.
fn skewed<R: Rng>(rng: &mut R, n: usize) -> usize {
    let u: f64 = rng.gen();
    ((u * u) * n as f64) as usize % n.max(1)
}

fn vary_case<R: Rng>(rng: &mut R, s: String) -> String {
    match rng.gen_range(0..10) {
        0 => s.to_uppercase(),
        1 => s.to_lowercase(),
        _ => s,
    }
}

fn pick_values<R: Rng>(
    rng: &mut R,
    pool: usize,
    max: usize,
    name: fn(usize) -> String,
) -> Vec<String> {
    if pool == 0 {
        return Vec::new();
    }
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| {
            let v = name(skewed(rng, pool));
            vary_case(rng, v)
        })
        .collect()
}

fn words<R: Rng>(rng: &mut R, n: usize) -> String {
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Generates `cfg.docs` normalized records with ids `doc-00000..`.
pub fn corpus<R: Rng>(rng: &mut R, cfg: &SynthConfig) -> Vec<Record> {
    (0..cfg.docs)
        .map(|i| {
            let mut r = Record::new(format!("doc-{i:05}"));
            r.title = {
                let n = rng.gen_range(1..=6);
                let t = words(rng, n);
                if rng.gen_bool(0.2) {
                    t.to_uppercase()
                } else {
                    t
                }
            };
            r.persons = pick_values(rng, cfg.persons, 3, person_name);
            r.subjects = pick_values(rng, cfg.keywords, 4, keyword_name);
            r.locations = pick_values(rng, cfg.locations, 2, location_name);
            if rng.gen_bool(0.9) {
                r.year = Some(rng.gen_range(cfg.first_year..=cfg.last_year));
            }
            if rng.gen_bool(0.8) {
                r.info_type = Some(*InfoType::ALL.choose(rng).unwrap());
            }
            if rng.gen_bool(0.9) {
                r.database = Some(format!("db{}", rng.gen_range(1..=4)));
            }
            if rng.gen_bool(0.5) {
                let n = rng.gen_range(1..=3);
                r.source = Some(words(rng, n));
            }
            if rng.gen_bool(0.3) {
                r.institutions = vec![format!("Institute {}", rng.gen_range(0..5))];
            }
            r
        })
        .collect()
}

/// Random leaf drawn from values that actually occur in `cfg`-generated corpora.
pub fn random_leaf<R: Rng>(rng: &mut R, cfg: &SynthConfig) -> QueryAst {
    let fold = |s: String| s.to_lowercase();
    match rng.gen_range(0..11) {
        0 => QueryAst::term(QueryField::All, *WORDS.choose(rng).unwrap()),
        1 => QueryAst::term(QueryField::Title, *WORDS.choose(rng).unwrap()),
        2 => QueryAst::phrase(
            if rng.gen_bool(0.5) {
                QueryField::Title
            } else {
                QueryField::All
            },
            [*WORDS.choose(rng).unwrap(), *WORDS.choose(rng).unwrap()],
        ),
        3 => QueryAst::term(
            QueryField::Person,
            fold(person_name(skewed(rng, cfg.persons))),
        ),
        4 => QueryAst::term(
            QueryField::Keyword,
            fold(keyword_name(skewed(rng, cfg.keywords))),
        ),
        5 => QueryAst::term(
            QueryField::Location,
            fold(location_name(skewed(rng, cfg.locations))),
        ),
        6 => {
            let from = rng.gen_range(cfg.first_year..=cfg.last_year);
            let to = rng.gen_range(from..=cfg.last_year);
            QueryAst::YearRange { from, to }
        }
        7 => QueryAst::term(
            QueryField::Year,
            rng.gen_range(cfg.first_year..=cfg.last_year).to_string(),
        ),
        8 => QueryAst::term(
            QueryField::Type,
            InfoType::ALL.choose(rng).unwrap().as_str(),
        ),
        9 => QueryAst::term(QueryField::Database, format!("db{}", rng.gen_range(1..=4))),
        _ => QueryAst::term(
            QueryField::All,
            fold(keyword_name(skewed(rng, cfg.keywords))),
        ),
    }
}

/// Random query tree with no pure negation: every `Not` sits in an `And`
/// that also has a positive operand.
pub fn random_query<R: Rng>(rng: &mut R, cfg: &SynthConfig, depth: u32) -> QueryAst {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_leaf(rng, cfg);
    }
    let n = rng.gen_range(2..=3);
    if rng.gen_bool(0.5) {
        let mut children = vec![random_query(rng, cfg, depth - 1)];
        for _ in 1..n {
            let child = random_query(rng, cfg, depth - 1);
            children.push(if rng.gen_bool(0.3) {
                QueryAst::not(child)
            } else {
                child
            });
        }
        children.shuffle(rng);
        QueryAst::and(children)
    } else {
        QueryAst::or((0..n).map(|_| random_query(rng, cfg, depth - 1)).collect())
    }
}

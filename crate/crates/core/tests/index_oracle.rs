use std::collections::BTreeMap;

use dlviz_core::index::{Field, Index};
use dlviz_core::record::{parse_record, Normalizer, Record, DEFAULT_JUNK_VALUES};
use dlviz_core::ResultSet;
use dlviz_testkit::{oracle, synth};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn random_index(seed: u64, docs: usize) -> (Vec<Record>, Index) {
    let mut rng = StdRng::seed_from_u64(seed);
    let cfg = synth::SynthConfig::new(docs, 25);
    let records = synth::corpus(&mut rng, &cfg);
    let index = Index::build(records.clone()).unwrap();
    (records, index)
}

#[test]
fn postings_match_naive_scan_on_1000_docs() {
    let (records, index) = random_index(7, 1000);
    assert_eq!(index.doc_count(), 1000);

    let mut built: BTreeMap<(Field, String), Vec<u32>> = BTreeMap::new();
    for field in Field::ALL {
        for (key, postings) in index.terms(field) {
            assert!(
                postings.windows(2).all(|w| w[0] < w[1]),
                "{field}:{key} not ascending"
            );
            assert!(postings.iter().all(|&o| (o as usize) < index.doc_count()));
            built.insert((field, key.to_string()), postings.to_vec());
        }
    }
    assert_eq!(built, oracle::postings(&records));

    for (ord, r) in records.iter().enumerate() {
        assert_eq!(index.record(ord as u32), r);
    }
}

#[test]
fn facet_counts_match_naive_tally() {
    let (records, index) = random_index(11, 500);
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..20 {
        let rs: ResultSet = (0..500u32).filter(|_| rng.gen_bool(0.4)).collect();
        for field in [
            Field::Persons,
            Field::Subjects,
            Field::Locations,
            Field::InfoType,
            Field::Database,
            Field::Institutions,
            Field::Year,
        ] {
            let k = rng.gen_range(1..=15);
            let got: Vec<(String, usize)> = index
                .facet_counts(&rs, field, k)
                .unwrap()
                .into_iter()
                .map(|f| (f.value, f.count))
                .collect();
            assert_eq!(
                got,
                oracle::facet_counts(&records, rs.ordinals(), field, k),
                "{field}"
            );
        }
    }
}

#[test]
fn lookup_matches_scan_and_full_facet_count() {
    let (records, index) = random_index(3, 400);
    let all = index.all();
    let full = index
        .facet_counts(&all, Field::Persons, usize::MAX)
        .unwrap();
    for fc in &full {
        let hits = index.postings_lookup(Field::Persons, &fc.value.to_uppercase());
        let scan: Vec<u32> = (0..records.len() as u32)
            .filter(|&o| {
                records[o as usize]
                    .persons
                    .iter()
                    .any(|p| p.to_lowercase() == fc.value.to_lowercase())
            })
            .collect();
        assert_eq!(hits.ordinals(), scan.as_slice());
        assert_eq!(hits.total(), fc.count);
    }
    assert!(index
        .postings_lookup(Field::Persons, "nobody at all")
        .is_empty());
}

#[test]
fn single_valued_facet_sum_equals_docs_with_field() {
    let (records, index) = random_index(5, 600);
    let all = index.all();
    let sum: usize = index
        .facet_counts(&all, Field::InfoType, usize::MAX)
        .unwrap()
        .iter()
        .map(|f| f.count)
        .sum();
    let lacking = records.iter().filter(|r| r.info_type.is_none()).count();
    assert_eq!(sum, records.len() - lacking);
}

#[test]
fn facet_counts_ignore_input_order() {
    let (_, index) = random_index(8, 300);
    let mut rng = StdRng::seed_from_u64(1);
    let mut ords: Vec<u32> = (0..300).filter(|_| rng.gen_bool(0.5)).collect();
    let a = index
        .facet_counts(&ResultSet::from_unsorted(ords.clone()), Field::Subjects, 20)
        .unwrap();
    ords.shuffle(&mut rng);
    ords.extend(ords.clone());
    let b = index
        .facet_counts(&ResultSet::from_unsorted(ords), Field::Subjects, 20)
        .unwrap();
    assert_eq!(a, b);
}

#[test]
fn saved_index_is_deterministic_and_reloads() {
    let (records, index) = random_index(21, 200);
    let dir = tempfile::tempdir().unwrap();
    let (d1, d2) = (dir.path().join("one"), dir.path().join("two"));
    index.save(&d1).unwrap();
    Index::build(records.clone()).unwrap().save(&d2).unwrap();
    for f in ["manifest.json", "records.jsonl"] {
        assert_eq!(
            std::fs::read(d1.join(f)).unwrap(),
            std::fs::read(d2.join(f)).unwrap(),
            "{f}"
        );
    }
    let loaded = Index::load(&d1).unwrap();
    assert_eq!(loaded.records(), index.records());
    for field in Field::ALL {
        assert!(loaded.terms(field).eq(index.terms(field)));
    }
}

#[test]
fn load_rejects_other_versions_and_truncated_stores() {
    let (_, index) = random_index(2, 10);
    let dir = tempfile::tempdir().unwrap();
    index.save(dir.path()).unwrap();

    let manifest = dir.path().join("manifest.json");
    let text = std::fs::read_to_string(&manifest).unwrap();
    std::fs::write(
        &manifest,
        text.replace("\"format_version\": 1", "\"format_version\": 9"),
    )
    .unwrap();
    let err = Index::load(dir.path()).unwrap_err();
    assert!(err.to_string().contains("version 9"), "{err}");

    std::fs::write(&manifest, text).unwrap();
    let store = dir.path().join("records.jsonl");
    let lines = std::fs::read_to_string(&store).unwrap();
    let first: String = lines.lines().take(3).map(|l| format!("{l}\n")).collect();
    std::fs::write(&store, first).unwrap();
    let err = Index::load(dir.path()).unwrap_err();
    assert!(err.to_string().contains("10 documents"), "{err}");
}

#[test]
fn ingestion_never_keeps_junk_values() {
    let line = r#"{"id":"x","persons":["No Entry","  ","A"],"subjects":["n/a","-","Unknown","ok"],"locations":["UNKNOWN"]}"#;
    let r = parse_record(line).unwrap();
    for v in r.persons.iter().chain(&r.subjects).chain(&r.locations) {
        assert!(!DEFAULT_JUNK_VALUES.contains(&v.to_lowercase().as_str()));
        assert!(!v.is_empty());
    }
    assert_eq!(r.subjects, vec!["ok"]);
    assert!(r.locations.is_empty());
}

fn value_strategy() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9 ,.'-]{0,12}[A-Za-z0-9]"
        .prop_map(|s| s.split_whitespace().collect::<Vec<_>>().join(" "))
}

fn record_strategy() -> impl Strategy<Value = Record> {
    (
        "[a-z0-9-]{1,10}",
        proptest::option::of(value_strategy()),
        proptest::collection::vec(value_strategy(), 0..4),
        proptest::collection::vec(value_strategy(), 0..4),
        proptest::option::of(1000i32..=3000),
        proptest::collection::vec(value_strategy(), 0..3),
        proptest::option::of(0usize..6),
        proptest::option::of(value_strategy()),
        proptest::option::of("[a-z]{2}"),
    )
        .prop_map(
            |(id, title, persons, subjects, year, locations, ty, database, language)| {
                let junk = Normalizer::default();
                let keep = |v: Vec<String>| v.into_iter().filter(|s| !junk.is_junk(s)).collect();
                let mut r = Record::new(id);
                r.title = title.unwrap_or_default();
                r.persons = keep(persons);
                r.subjects = keep(subjects);
                r.year = year;
                r.locations = keep(locations);
                r.info_type = ty.map(|i| dlviz_core::record::InfoType::ALL[i]);
                r.database = database.filter(|d| !junk.is_junk(d));
                r.language = language;
                r
            },
        )
}

proptest! {
    #[test]
    fn corpus_line_round_trips(r in record_strategy()) {
        let back = parse_record(&r.to_line()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn whitespace_normalization_is_idempotent(raw in "\\PC{0,30}") {
        use dlviz_core::record::{normalize_value, FieldKind};
        if let Some(once) = normalize_value(&raw, FieldKind::Categorical) {
            prop_assert_eq!(normalize_value(&once, FieldKind::Categorical), Some(once.clone()));
            prop_assert_eq!(once.trim(), once.as_str());
            prop_assert!(!once.contains("  "));
        }
    }
}

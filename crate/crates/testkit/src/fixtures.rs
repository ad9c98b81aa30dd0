//! Hand-built corpora with known answers.

use dlviz_core::record::{InfoType, Record};

pub const SHARED_PERSON: &str = "Rainer Kuhlen";
pub const SHARED_KEYWORD: &str = "information society";
/// Documents carrying both [`SHARED_PERSON`] and [`SHARED_KEYWORD`].
pub const SHARED_DOCS: usize = 123;

/// 123 documents share one person and one keyword; every other pair is rarer.
pub fn shared_pair_corpus() -> Vec<Record> {
    let mut out = Vec::new();
    let mut push = |persons: &[&str], subjects: &[&str], year: i32, location: Option<&str>| {
        let mut r = Record::new(format!("fx-{:04}", out.len()));
        r.title = format!("{} and {}", subjects[0], persons[0]);
        r.persons = persons.iter().map(|s| s.to_string()).collect();
        r.subjects = subjects.iter().map(|s| s.to_string()).collect();
        r.year = Some(year);
        r.locations = location.into_iter().map(str::to_string).collect();
        r.info_type = Some(InfoType::Literature);
        out.push(r);
    };
    for i in 0..SHARED_DOCS {
        let place = ["Berlin", "Konstanz", "Cologne"][i % 3];
        push(
            &[SHARED_PERSON],
            &[SHARED_KEYWORD],
            1990 + (i % 20) as i32,
            Some(place),
        );
    }
    for i in 0..60 {
        push(
            &[SHARED_PERSON, "Ullrich Bauer"],
            &["internet"],
            2000 + (i % 10),
            None,
        );
    }
    for i in 0..30 {
        push(
            &["Ullrich Bauer"],
            &[SHARED_KEYWORD, "digital library"],
            1995 + (i % 5),
            Some("Mannheim"),
        );
    }
    out
}

/// Three small records used by CLI round trips.
pub fn tiny_corpus() -> Vec<Record> {
    let mut a = Record::new("a");
    a.title = "The Information Society".into();
    a.persons = vec![SHARED_PERSON.into()];
    a.subjects = vec![SHARED_KEYWORD.into(), "internet".into()];
    a.year = Some(2001);
    a.locations = vec!["Konstanz".into()];
    let mut b = Record::new("b");
    b.title = "Digital Libraries".into();
    b.persons = vec![SHARED_PERSON.into(), "Ullrich Bauer".into()];
    b.subjects = vec!["digital library".into()];
    b.year = Some(1998);
    let mut c = Record::new("c");
    c.title = "Undated working paper".into();
    c.subjects = vec![SHARED_KEYWORD.into()];
    vec![a, b, c]
}

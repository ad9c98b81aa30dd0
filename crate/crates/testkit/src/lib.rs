//! Test support: seeded synthetic corpora, random queries, and brute-force
//! reference implementations that work directly on `Record` values.

pub mod fixtures;
pub mod oracle;
pub mod synth;

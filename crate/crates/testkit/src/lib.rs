//! Test support for mindforge.
//!
//! [`oracle`] holds slow, obviously-correct reimplementations of the core
//! algorithms. They deliberately share no code with `mindforge-core` beyond
//! its data types. [`gen`] builds random instances from a seeded RNG so the
//! same cases can drive proptest properties and the acceptance runner.

pub mod gen;
pub mod oracle;

use std::path::PathBuf;

/// Workspace root, for locating `fixtures/`.
pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .expect("workspace root")
}

pub fn fixtures_dir() -> PathBuf {
    workspace_root().join("fixtures")
}

//! Shared fixtures for the integration and acceptance suites.

use std::path::PathBuf;
use std::sync::OnceLock;

use zmeso::ZeroCorpus;

pub fn zeros_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/zeros_100k.txt")
}

/// The tabulated first 1e5 zero ordinates, loaded once per test binary.
pub fn corpus_100k() -> &'static ZeroCorpus {
    static CORPUS: OnceLock<ZeroCorpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        ZeroCorpus::load_text(zeros_path()).expect("data/zeros_100k.txt present and well-formed")
    })
}

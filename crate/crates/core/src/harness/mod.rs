//! Datasets, retrieval evaluation, cross-dataset classification and the
//! procedural stand-in datasets.

pub mod config;
pub mod dataset;
pub mod eval;
pub mod synth;

pub use config::{Config, DatasetSection};
pub use dataset::{load_dataset, Dataset, Layout, Sample};
pub use eval::{
    build_gallery, cost_matrix, cross_classify, evaluate, report_from_costs, retrieve, CrossReport, Entry, Ranked,
    RetrievalReport,
};

/// Animal classes of the 14-class set that count as a correct answer for a
/// generic quadruped.
pub const QUADRUPED_KINDS: [&str; 4] = ["horse", "cattle", "cat", "dog"];

/// Whether a prototype label is an acceptable answer for a query label
/// coming from the other dataset.
pub fn semantic_match(query: &str, prototype: &str) -> bool {
    query == prototype || (query == "quadruped" && QUADRUPED_KINDS.contains(&prototype))
}

//! Archive parsing, tokenization and term/document matrix construction.

mod archive;
mod config;
mod date;
mod matrix;
mod tokenize;

pub use archive::{chronology_violations, parse_archive, Document};
pub use config::AnalysisConfig;
pub use date::PartialDate;
pub use matrix::{
    build_matrix, extract_subcorpus, near_misses, BuildReport, DocMeta, SubcorpusReport, TermDocMatrix,
};
pub use tokenize::{tokenize, AliasMap, TokenCounts};

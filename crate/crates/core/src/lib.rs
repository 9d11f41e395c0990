//! Geometric data analysis of dated narrative archives.
//!
//! The pipeline runs from a plain-text archive of dated records to a
//! frequency-thresholded term/document matrix ([`corpus`]), a correspondence
//! analysis factor space with active and supplementary words ([`ca`]),
//! queries on that space ([`query`]), and chronologically constrained
//! hierarchical clustering of the documents ([`cluster`]).

pub mod ca;
pub mod cluster;
pub mod corpus;
pub mod error;
pub mod json;
mod linalg;
pub mod normality;
pub mod plot;
pub mod query;
pub mod table;

pub use error::{Error, ErrorKind, Result};

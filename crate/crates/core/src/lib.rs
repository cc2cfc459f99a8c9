//! Claims, citation networks and author blocks for bibliographic corpora.
//!
//! The pipeline reads article metadata and pre-parsed abstract hyperedges,
//! labels EKC-validation claims and environmental topics, builds the
//! author citation network, partitions it with a degree-corrected
//! stochastic block model and aggregates the results into report tables.

pub mod hypergraph;
pub mod rules;
pub mod corpus;
pub mod citenet;
pub mod report;
pub mod blockmodel;
pub mod config;
pub mod pipeline;

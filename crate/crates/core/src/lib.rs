//! Pairwise text-complexity assessment.
//!
//! Articles annotated with constituency trees and discourse relations are
//! turned into sixteen-dimensional feature vectors (coherence, cohesion,
//! surface, lexical and syntactic classes). Pairs of articles become
//! difference vectors labelled `Same` or `Different` complexity, which a
//! from-scratch random forest learns to classify.

pub mod cli;
pub mod corpus_io;
pub mod datasets;
pub mod discourse_stats;
pub mod features;
pub mod learn;

//! Core engine for lattice-based transcript scoring.
//!
//! The crate is organized around one pipeline: a verbatim reference document
//! ([`doc::ReferenceDocument`]) plus a set of synonym transforms
//! ([`transforms::TransformRuleSet`]) compile into an acyclic reference
//! lattice ([`lattice::Lattice`]) whose paths enumerate every acceptable
//! realization of the reference. A hypothesis token sequence is aligned
//! against that lattice ([`align::align`]) at minimum edit cost, and the
//! resulting edit operations are tallied into WER summaries with per-entity
//! attribution ([`score`]) and corpus-level stratified reports ([`report`]).
//!
//! Everything here is pure computation over immutable values; file formats
//! and I/O live in the companion `weralign` crate. The crate is `no_std`
//! (with `alloc`) so the scoring engine can be embedded anywhere.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod align;
pub mod doc;
pub mod lattice;
pub mod report;
pub mod score;
pub mod text;
pub mod transforms;

// Rational count types appear throughout the public API; re-export the
// crates so downstream users name the same versions.
pub use num_bigint;
pub use num_rational;

pub use align::{align, levenshtein_align, Alignment, EditOp, OpKind};
pub use doc::{
    Casing, CorpusManifest, DocError, EntitySpanRef, ManifestRow, NlpToken, ReferenceDocument,
    Timestamp, TokenSequence, TokenSource,
};
pub use lattice::{
    build_lattice, AltKind, Lattice, LatticeArc, LatticeError, LatticeStats, PathCount,
    ProvenanceTag,
};
pub use report::{
    aggregate, entity_distribution, EntityHistogram, FileResult, GroupMeans, GroupSummary,
    ReportError, StratifiedReport,
};
pub use score::{
    entity_breakdown, merge_summaries, percent_1dp, summarize, Count, EntityBreakdown,
    ScoreError, WerSummary,
};
pub use transforms::{
    coverage_stats, CoverageStats, RuleError, RuleMatch, RuleSide, TransformRule,
    TransformRuleSet,
};

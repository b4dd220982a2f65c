//! Transcript scoring against reference lattices: file formats, report
//! rendering, and the single-file / batch / survey pipelines behind the
//! `weralign` binary.
//!
//! The scoring engine itself lives in `weralign-core`; this crate owns
//! everything that touches bytes on disk.

pub mod formats;
pub mod render;
pub mod run;

pub use formats::FormatError;
pub use render::FileFailure;
pub use run::{cmd_batch, cmd_score, cmd_stats, HypFormat, Mode, RunConfig, RunError};

//! On-disk formats: pipe-separated reference transcripts, normalization
//! sidecars, synonym rule files, hypothesis text, CTM, and the corpus
//! manifest.

pub mod hyp;
pub mod manifest;
pub mod nlp;
pub mod synonyms;

pub use hyp::{parse_ctm, parse_hypothesis_text};
pub use manifest::{parse_manifest, MANIFEST_HEADER};
pub use nlp::{attach_norm_sidecar, parse_nlp, serialize_nlp, NLP_HEADER};
pub use synonyms::{parse_synonyms, serialize_synonyms};

/// A parse failure, with a one-based line number whenever one exists.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    AtLine { line: usize, message: String },
    #[error("{message}")]
    Whole { message: String },
}

impl FormatError {
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        Self::AtLine {
            line,
            message: message.into(),
        }
    }

    pub fn whole(message: impl Into<String>) -> Self {
        Self::Whole {
            message: message.into(),
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            Self::AtLine { line, .. } => Some(*line),
            Self::Whole { .. } => None,
        }
    }
}

fn utf8(bytes: &[u8]) -> Result<&str, FormatError> {
    std::str::from_utf8(bytes).map_err(|e| FormatError::whole(format!("invalid UTF-8: {e}")))
}

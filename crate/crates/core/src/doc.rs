//! Reference documents, token metadata, and corpus manifests.
//!
//! A [`ReferenceDocument`] is the in-memory form of a verbatim reference
//! transcript: ordered tokens with speaker, timing, casing, punctuation,
//! entity, and normalization metadata. Construction is unvalidated so
//! parsers can build first and report precise locations; [`ReferenceDocument::validate`]
//! enforces the structural invariants and returns the offending token index.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::text::fold_token;

/// A non-negative timestamp in seconds that remembers exactly how it was
/// written, so documents can be re-serialized byte for byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timestamp {
    raw: String,
}

impl Timestamp {
    /// Accepts any decimal string that parses to a finite, non-negative
    /// number of seconds.
    pub fn parse(raw: &str) -> Result<Self, DocError> {
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(Self { raw: raw.to_string() }),
            _ => Err(DocError::BadTimestamp { raw: raw.to_string() }),
        }
    }

    pub fn seconds(&self) -> f64 {
        self.raw.parse().expect("validated at construction")
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }
}

/// Surface-casing code carried by each token: `LC`, `UC`, or `CA`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Casing {
    Lower,
    Upper,
    Capitalized,
}

impl Casing {
    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "LC" => Some(Self::Lower),
            "UC" => Some(Self::Upper),
            "CA" => Some(Self::Capitalized),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Self::Lower => "LC",
            Self::Upper => "UC",
            Self::Capitalized => "CA",
        }
    }
}

/// Membership of a token in a named-entity mention. Tokens sharing a
/// `span_id` form one contiguous mention of class `class_label`. Class
/// labels are an open vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitySpanRef {
    pub class_label: String,
    pub span_id: u32,
}

/// One reference token with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct NlpToken {
    /// Verbatim surface form. Never empty; never contains `|` or newlines.
    pub text: String,
    pub speaker: String,
    pub start: Option<Timestamp>,
    pub end: Option<Timestamp>,
    /// Trailing punctuation (possibly empty). Excluded from scoring.
    pub punct: String,
    pub casing: Casing,
    pub entity: Option<EntitySpanRef>,
    /// Key into [`ReferenceDocument::norms`].
    pub norm_id: Option<String>,
}

impl NlpToken {
    /// Minimal well-formed token: just a surface form and a speaker.
    pub fn new(text: impl Into<String>, speaker: impl Into<String>, casing: Casing) -> Self {
        Self {
            text: text.into(),
            speaker: speaker.into(),
            start: None,
            end: None,
            punct: String::new(),
            casing,
            entity: None,
            norm_id: None,
        }
    }

    fn validate(&self, index: usize) -> Result<(), DocError> {
        if self.text.is_empty() {
            return Err(DocError::EmptyTokenText { index });
        }
        if self.text.contains(['|', '\n', '\r']) {
            return Err(DocError::ForbiddenCharInText { index });
        }
        // Casing consistency is checked in the one direction the data model
        // pins down: an all-caps token must not contain lowercase letters.
        // LC and CA stay permissive because real transcripts carry
        // mixed-case tokens (product names, tickers) under those codes.
        if self.casing == Casing::Upper && self.text.chars().any(char::is_lowercase) {
            return Err(DocError::CasingMismatch { index });
        }
        if let (Some(s), Some(e)) = (&self.start, &self.end) {
            if s.seconds() > e.seconds() {
                return Err(DocError::TimestampOrder { index });
            }
        }
        Ok(())
    }
}

/// Candidate spellings for one normalization key: each candidate is a
/// non-empty comparison-form token sequence.
pub type NormTable = BTreeMap<String, Vec<Vec<String>>>;

/// An ordered verbatim reference transcript plus its normalization table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReferenceDocument {
    pub file_id: String,
    pub tokens: Vec<NlpToken>,
    pub norms: NormTable,
}

impl ReferenceDocument {
    pub fn new(tokens: Vec<NlpToken>) -> Self {
        Self {
            file_id: String::new(),
            tokens,
            norms: NormTable::new(),
        }
    }

    pub fn with_file_id(mut self, file_id: impl Into<String>) -> Self {
        self.file_id = file_id.into();
        self
    }

    /// Structural validation: per-token checks plus entity-span contiguity.
    /// Normalization references are checked separately by
    /// [`ReferenceDocument::validate_norm_refs`] since norms attach after
    /// parsing.
    pub fn validate(&self) -> Result<(), DocError> {
        let mut last_span: Option<(u32, String, usize)> = None;
        let mut closed_spans: BTreeSet<u32> = BTreeSet::new();
        for (index, token) in self.tokens.iter().enumerate() {
            token.validate(index)?;
            match &token.entity {
                Some(entity) => {
                    match &last_span {
                        Some((span_id, class, last_idx)) if *span_id == entity.span_id => {
                            if class != &entity.class_label {
                                return Err(DocError::SpanClassMismatch {
                                    span_id: entity.span_id,
                                    index,
                                });
                            }
                            debug_assert_eq!(*last_idx, index - 1);
                        }
                        _ => {
                            if closed_spans.contains(&entity.span_id) {
                                return Err(DocError::NonContiguousSpan {
                                    span_id: entity.span_id,
                                    index,
                                });
                            }
                            if let Some((span_id, _, _)) = last_span.take() {
                                closed_spans.insert(span_id);
                            }
                            last_span =
                                Some((entity.span_id, entity.class_label.clone(), index));
                        }
                    }
                    if let Some((_, _, last_idx)) = &mut last_span {
                        *last_idx = index;
                    }
                }
                None => {
                    if let Some((span_id, _, _)) = last_span.take() {
                        closed_spans.insert(span_id);
                    }
                }
            }
        }
        Ok(())
    }

    /// Every `norm_id` referenced by a token must resolve, and every
    /// candidate must be a non-empty token sequence.
    pub fn validate_norm_refs(&self) -> Result<(), DocError> {
        for (index, token) in self.tokens.iter().enumerate() {
            if let Some(norm_id) = &token.norm_id {
                let candidates =
                    self.norms
                        .get(norm_id)
                        .ok_or_else(|| DocError::UnknownNormId {
                            index,
                            norm_id: norm_id.clone(),
                        })?;
                if candidates.is_empty()
                    || candidates.iter().any(|c| c.is_empty() || c.iter().any(String::is_empty))
                {
                    return Err(DocError::EmptyNormCandidate {
                        norm_id: norm_id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Comparison-form tokens paired with the index of the original token
    /// they came from. Tokens that fold away (pure punctuation) are absent.
    pub fn comparison_backbone(&self) -> Vec<(usize, String)> {
        self.tokens
            .iter()
            .enumerate()
            .filter_map(|(i, t)| fold_token(&t.text).map(|folded| (i, folded)))
            .collect()
    }

    /// The document as a scoring-ready token sequence: comparison form of
    /// each verbatim token, in order, trailing punctuation excluded.
    pub fn token_sequence(&self) -> TokenSequence {
        TokenSequence::from_folded(
            self.comparison_backbone().into_iter().map(|(_, t)| t).collect(),
            TokenSource::NlpDerived,
        )
    }
}

/// Where a comparison-form token sequence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenSource {
    PlainText,
    Ctm,
    NlpDerived,
}

/// An ordered sequence of comparison-form tokens. Tokens are never empty and
/// never contain whitespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    tokens: Vec<String>,
    source: TokenSource,
}

impl TokenSequence {
    /// Wrap tokens that are already in comparison form.
    pub fn from_folded(tokens: Vec<String>, source: TokenSource) -> Self {
        debug_assert!(tokens
            .iter()
            .all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace)));
        Self { tokens, source }
    }

    /// Fold raw whitespace-separated text into a sequence.
    pub fn fold_from_text(raw: &str, source: TokenSource) -> Self {
        Self {
            tokens: crate::text::fold_text(raw),
            source,
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn source(&self) -> TokenSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// One manifest row: a recording's reference/hypothesis locations plus the
/// stratification metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub file_id: String,
    pub ref_path: String,
    pub hyp_path: String,
    pub sector: String,
    pub sample_rate_hz: u32,
    pub duration_s: f64,
    pub quarter: String,
    pub num_speakers: u32,
}

/// A typed corpus manifest with unique file ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorpusManifest {
    pub rows: Vec<ManifestRow>,
}

impl CorpusManifest {
    pub fn validate(&self) -> Result<(), DocError> {
        let mut seen = BTreeSet::new();
        for row in &self.rows {
            if !seen.insert(row.file_id.clone()) {
                return Err(DocError::DuplicateFileId {
                    file_id: row.file_id.clone(),
                });
            }
            if row.sample_rate_hz == 0 {
                return Err(DocError::NonPositiveField {
                    file_id: row.file_id.clone(),
                    field: "sample_rate_hz",
                });
            }
            if !(row.duration_s > 0.0) || !row.duration_s.is_finite() {
                return Err(DocError::NonPositiveField {
                    file_id: row.file_id.clone(),
                    field: "duration_s",
                });
            }
            if row.num_speakers == 0 {
                return Err(DocError::NonPositiveField {
                    file_id: row.file_id.clone(),
                    field: "num_speakers",
                });
            }
        }
        Ok(())
    }
}

/// Validation failures for documents and manifests. The `index` is the
/// zero-based token position; callers that read from files translate it to a
/// line number.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DocError {
    #[error("token {index}: empty text")]
    EmptyTokenText { index: usize },
    #[error("token {index}: text contains '|' or a line break")]
    ForbiddenCharInText { index: usize },
    #[error("token {index}: casing code inconsistent with surface form")]
    CasingMismatch { index: usize },
    #[error("token {index}: start timestamp after end timestamp")]
    TimestampOrder { index: usize },
    #[error("invalid timestamp {raw:?}")]
    BadTimestamp { raw: String },
    #[error("token {index}: entity span {span_id} is not contiguous")]
    NonContiguousSpan { span_id: u32, index: usize },
    #[error("token {index}: entity span {span_id} changes class mid-span")]
    SpanClassMismatch { span_id: u32, index: usize },
    #[error("token {index}: norm id {norm_id:?} not present in the norm table")]
    UnknownNormId { index: usize, norm_id: String },
    #[error("norm id {norm_id:?} has an empty candidate")]
    EmptyNormCandidate { norm_id: String },
    #[error("duplicate file id {file_id:?}")]
    DuplicateFileId { file_id: String },
    #[error("file {file_id:?}: {field} must be positive")]
    NonPositiveField {
        file_id: String,
        field: &'static str,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(text: &str) -> NlpToken {
        NlpToken::new(text, "spk1", Casing::Lower)
    }

    fn entity_tok(text: &str, class: &str, span: u32) -> NlpToken {
        let mut t = tok(text);
        t.entity = Some(EntitySpanRef {
            class_label: class.into(),
            span_id: span,
        });
        t
    }

    #[test]
    fn timestamp_preserves_raw_and_parses() {
        let ts = Timestamp::parse("0.50").unwrap();
        assert_eq!(ts.as_str(), "0.50");
        assert_eq!(ts.seconds(), 0.5);
        assert!(Timestamp::parse("-1.0").is_err());
        assert!(Timestamp::parse("abc").is_err());
        assert!(Timestamp::parse("inf").is_err());
    }

    #[test]
    fn upper_casing_rejects_lowercase_text() {
        let mut t = tok("Nasdaq");
        t.casing = Casing::Upper;
        let doc = ReferenceDocument::new(vec![t]);
        assert!(matches!(
            doc.validate(),
            Err(DocError::CasingMismatch { index: 0 })
        ));
        let mut ok = tok("NASDAQ");
        ok.casing = Casing::Upper;
        assert!(ReferenceDocument::new(vec![ok]).validate().is_ok());
    }

    #[test]
    fn timestamp_order_enforced() {
        let mut t = tok("late");
        t.start = Some(Timestamp::parse("2.0").unwrap());
        t.end = Some(Timestamp::parse("1.0").unwrap());
        assert!(matches!(
            ReferenceDocument::new(vec![t]).validate(),
            Err(DocError::TimestampOrder { index: 0 })
        ));
    }

    #[test]
    fn contiguous_spans_accepted() {
        let doc = ReferenceDocument::new(vec![
            entity_tok("new", "GPE", 3),
            entity_tok("york", "GPE", 3),
            tok("wins"),
        ]);
        assert!(doc.validate().is_ok());
    }

    #[test]
    fn interrupted_span_rejected() {
        let doc = ReferenceDocument::new(vec![
            entity_tok("new", "GPE", 3),
            tok("gap"),
            entity_tok("york", "GPE", 3),
        ]);
        assert!(matches!(
            doc.validate(),
            Err(DocError::NonContiguousSpan { span_id: 3, index: 2 })
        ));
    }

    #[test]
    fn span_class_change_rejected() {
        let doc = ReferenceDocument::new(vec![
            entity_tok("acme", "ORG", 1),
            entity_tok("corp", "DATE", 1),
        ]);
        assert!(matches!(
            doc.validate(),
            Err(DocError::SpanClassMismatch { span_id: 1, index: 1 })
        ));
    }

    #[test]
    fn adjacent_distinct_spans_accepted() {
        let doc = ReferenceDocument::new(vec![
            entity_tok("acme", "ORG", 1),
            entity_tok("monday", "DATE", 2),
        ]);
        assert!(doc.validate().is_ok());
    }

    #[test]
    fn norm_refs_must_resolve() {
        let mut t = tok("2021");
        t.norm_id = Some("n42".into());
        let mut doc = ReferenceDocument::new(vec![t]);
        assert!(matches!(
            doc.validate_norm_refs(),
            Err(DocError::UnknownNormId { index: 0, .. })
        ));
        doc.norms.insert(
            "n42".into(),
            vec![vec!["twenty".into(), "twenty".into(), "one".into()]],
        );
        assert!(doc.validate_norm_refs().is_ok());
    }

    #[test]
    fn token_sequence_excludes_punct_and_folds() {
        let mut a = tok("Good");
        a.punct = ",".into();
        a.casing = Casing::Capitalized;
        let mut b = tok("morning");
        b.punct = ".".into();
        let doc = ReferenceDocument::new(vec![a, b]);
        let seq = doc.token_sequence();
        assert_eq!(seq.tokens(), ["good", "morning"]);
        assert_eq!(seq.source(), TokenSource::NlpDerived);
    }

    #[test]
    fn apostrophes_survive_in_sequence() {
        let doc = ReferenceDocument::new(vec![tok("I'm")]);
        assert_eq!(doc.token_sequence().tokens(), ["i'm"]);
    }

    #[test]
    fn empty_document_sequence() {
        let doc = ReferenceDocument::new(Vec::new());
        assert!(doc.token_sequence().is_empty());
    }

    #[test]
    fn punctuation_only_token_leaves_backbone_gap() {
        let doc = ReferenceDocument::new(vec![tok("a"), tok("..."), tok("b")]);
        assert_eq!(doc.comparison_backbone(), vec![(0, "a".into()), (2, "b".into())]);
    }

    #[test]
    fn manifest_rejects_duplicates_and_bad_fields() {
        let row = ManifestRow {
            file_id: "4320211".into(),
            ref_path: "refs/4320211.nlp".into(),
            hyp_path: "hyps/4320211.txt".into(),
            sector: "Technology".into(),
            sample_rate_hz: 44_100,
            duration_s: 3240.0,
            quarter: "Q2".into(),
            num_speakers: 5,
        };
        assert!(CorpusManifest { rows: vec![row.clone()] }.validate().is_ok());

        let dup = CorpusManifest {
            rows: vec![row.clone(), row.clone()],
        };
        assert!(matches!(dup.validate(), Err(DocError::DuplicateFileId { .. })));

        let mut zero_rate = row.clone();
        zero_rate.file_id = "other".into();
        zero_rate.sample_rate_hz = 0;
        assert!(matches!(
            CorpusManifest { rows: vec![zero_rate] }.validate(),
            Err(DocError::NonPositiveField { field: "sample_rate_hz", .. })
        ));

        let mut zero_dur = row;
        zero_dur.file_id = "third".into();
        zero_dur.duration_s = 0.0;
        assert!(matches!(
            CorpusManifest { rows: vec![zero_dur] }.validate(),
            Err(DocError::NonPositiveField { field: "duration_s", .. })
        ));
    }
}

//! The pipe-separated reference transcript format.
//!
//! One token per line, eight fields:
//!
//! ```text
//! token|speaker|ts|endTs|punct|case|tags|wer_tags
//! ```
//!
//! Empty string means absent. `tags` is `CLASS:span_id` binding the token to
//! an entity mention; `wer_tags` is a normalization key resolved through a
//! JSON sidecar. Parsing and serialization round-trip byte for byte,
//! including the exact spelling of timestamps.

use std::collections::BTreeMap;

use weralign_core::text::fold_text;
use weralign_core::{Casing, DocError, EntitySpanRef, NlpToken, ReferenceDocument, Timestamp};

use super::{utf8, FormatError};

pub const NLP_HEADER: &str = "token|speaker|ts|endTs|punct|case|tags|wer_tags";

fn doc_error(e: DocError) -> FormatError {
    // token indices map to lines: header is line 1, token 0 is line 2
    let line = match &e {
        DocError::EmptyTokenText { index }
        | DocError::ForbiddenCharInText { index }
        | DocError::CasingMismatch { index }
        | DocError::TimestampOrder { index }
        | DocError::NonContiguousSpan { index, .. }
        | DocError::SpanClassMismatch { index, .. }
        | DocError::UnknownNormId { index, .. } => Some(index + 2),
        _ => None,
    };
    match line {
        Some(line) => FormatError::at(line, e.to_string()),
        None => FormatError::whole(e.to_string()),
    }
}

/// Parse reference transcript bytes. The normalization table starts empty;
/// populate it with [`attach_norm_sidecar`].
pub fn parse_nlp(bytes: &[u8]) -> Result<ReferenceDocument, FormatError> {
    let text = utf8(bytes)?;
    if text.contains('\r') {
        let line = text.split('\n').position(|l| l.contains('\r')).unwrap_or(0) + 1;
        return Err(FormatError::at(line, "carriage returns are not allowed"));
    }
    let mut lines = text.split('\n');
    match lines.next() {
        Some(NLP_HEADER) => {}
        Some(other) => {
            return Err(FormatError::at(
                1,
                format!("malformed header {other:?}, expected {NLP_HEADER:?}"),
            ))
        }
        None => return Err(FormatError::at(1, "empty input")),
    }

    let mut tokens = Vec::new();
    let mut rest = lines.peekable();
    let mut line_no = 1;
    while let Some(line) = rest.next() {
        line_no += 1;
        if line.is_empty() && rest.peek().is_none() {
            break; // trailing newline
        }
        let fields: Vec<&str> = line.split('|').collect();
        if fields.len() != 8 {
            return Err(FormatError::at(
                line_no,
                format!("expected 8 fields, found {}", fields.len()),
            ));
        }
        let [text, speaker, ts, end_ts, punct, case, tags, wer_tags] =
            <[&str; 8]>::try_from(fields).expect("length checked");

        if text.is_empty() {
            return Err(FormatError::at(line_no, "empty token text"));
        }
        let parse_ts = |raw: &str| -> Result<Option<Timestamp>, FormatError> {
            if raw.is_empty() {
                Ok(None)
            } else {
                Timestamp::parse(raw)
                    .map(Some)
                    .map_err(|e| FormatError::at(line_no, e.to_string()))
            }
        };
        let casing = Casing::from_code(case)
            .ok_or_else(|| FormatError::at(line_no, format!("invalid casing code {case:?}")))?;
        let entity = if tags.is_empty() {
            None
        } else {
            let (class, span) = tags.rsplit_once(':').ok_or_else(|| {
                FormatError::at(line_no, format!("malformed entity tag {tags:?}"))
            })?;
            if class.is_empty() {
                return Err(FormatError::at(line_no, "empty entity class"));
            }
            let span_id: u32 = span.parse().map_err(|_| {
                FormatError::at(line_no, format!("invalid entity span id {span:?}"))
            })?;
            if span_id.to_string() != span {
                return Err(FormatError::at(
                    line_no,
                    format!("non-canonical entity span id {span:?}"),
                ));
            }
            Some(EntitySpanRef {
                class_label: class.to_string(),
                span_id,
            })
        };
        tokens.push(NlpToken {
            text: text.to_string(),
            speaker: speaker.to_string(),
            start: parse_ts(ts)?,
            end: parse_ts(end_ts)?,
            punct: punct.to_string(),
            casing,
            entity,
            norm_id: if wer_tags.is_empty() {
                None
            } else {
                Some(wer_tags.to_string())
            },
        });
    }

    let doc = ReferenceDocument::new(tokens);
    doc.validate().map_err(doc_error)?;
    Ok(doc)
}

/// Render a document back to the exact byte form it parsed from.
pub fn serialize_nlp(doc: &ReferenceDocument) -> String {
    let mut out = String::from(NLP_HEADER);
    out.push('\n');
    for token in &doc.tokens {
        let ts = token.start.as_ref().map(Timestamp::as_str).unwrap_or("");
        let end_ts = token.end.as_ref().map(Timestamp::as_str).unwrap_or("");
        let tags = token
            .entity
            .as_ref()
            .map(|e| format!("{}:{}", e.class_label, e.span_id))
            .unwrap_or_default();
        let wer_tags = token.norm_id.as_deref().unwrap_or("");
        out.push_str(&format!(
            "{}|{}|{}|{}|{}|{}|{}|{}\n",
            token.text,
            token.speaker,
            ts,
            end_ts,
            token.punct,
            token.casing.code(),
            tags,
            wer_tags
        ));
    }
    out
}

/// Attach a normalization sidecar: a JSON object mapping norm ids to arrays
/// of candidate spellings. Candidates are whitespace-tokenized and folded to
/// comparison form; duplicates collapse. Every norm id referenced by the
/// document must be present.
pub fn attach_norm_sidecar(
    mut doc: ReferenceDocument,
    bytes: &[u8],
) -> Result<ReferenceDocument, FormatError> {
    let table: BTreeMap<String, Vec<String>> = serde_json::from_slice(bytes)
        .map_err(|e| FormatError::whole(format!("invalid norm sidecar: {e}")))?;
    for (norm_id, raw_candidates) in table {
        let mut candidates: Vec<Vec<String>> = Vec::new();
        for raw in &raw_candidates {
            let folded = fold_text(raw);
            if folded.is_empty() {
                return Err(FormatError::whole(format!(
                    "norm id {norm_id:?}: empty candidate {raw:?}"
                )));
            }
            if !candidates.contains(&folded) {
                candidates.push(folded);
            }
        }
        doc.norms.insert(norm_id, candidates);
    }
    doc.validate_norm_refs().map_err(doc_error)?;
    Ok(doc)
}

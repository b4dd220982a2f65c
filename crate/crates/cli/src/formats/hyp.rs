//! Hypothesis transcript parsing: plain text and CTM.

use weralign_core::{TokenSequence, TokenSource};

use super::{utf8, FormatError};

/// Whitespace-split plain text, folded to comparison form. Empty hypotheses
/// are valid.
pub fn parse_hypothesis_text(bytes: &[u8]) -> Result<TokenSequence, FormatError> {
    Ok(TokenSequence::fold_from_text(
        utf8(bytes)?,
        TokenSource::PlainText,
    ))
}

/// Time-marked conversation format: one recognized token per line,
/// `<recording> <channel> <start> <dur> <token> [conf]`. Tokens are ordered
/// by start time (stable on ties); the confidence column is ignored.
pub fn parse_ctm(bytes: &[u8]) -> Result<TokenSequence, FormatError> {
    let text = utf8(bytes)?;
    let mut entries: Vec<(f64, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 5 {
            return Err(FormatError::at(
                line_no,
                format!("expected at least 5 fields, found {}", fields.len()),
            ));
        }
        let start: f64 = fields[2].parse().map_err(|_| {
            FormatError::at(line_no, format!("non-numeric start time {:?}", fields[2]))
        })?;
        let _dur: f64 = fields[3].parse().map_err(|_| {
            FormatError::at(line_no, format!("non-numeric duration {:?}", fields[3]))
        })?;
        if !start.is_finite() {
            return Err(FormatError::at(line_no, "start time must be finite"));
        }
        entries.push((start, fields[4].to_string()));
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tokens: Vec<String> = entries
        .into_iter()
        .filter_map(|(_, tok)| weralign_core::text::fold_token(&tok))
        .collect();
    Ok(TokenSequence::from_folded(tokens, TokenSource::Ctm))
}

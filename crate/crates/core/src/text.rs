//! Comparison-form token folding.
//!
//! Scoring never compares surface forms directly. Both sides are folded to a
//! comparison form first: Unicode NFC, lowercased, with leading and trailing
//! sentence punctuation stripped. Internal apostrophes and hyphens are
//! lexical ("i'm", "re-open") and survive folding. A token made entirely of
//! strippable punctuation folds to nothing.

use alloc::string::String;
use alloc::vec::Vec;

use unicode_normalization::UnicodeNormalization;

/// Characters stripped from both ends of a token during folding.
const STRIPPED: &[char] = &['.', ',', '?', '!', ';', ':', '"', '(', ')', '[', ']'];

/// Fold one token to comparison form. Returns `None` when nothing survives.
pub fn fold_token(raw: &str) -> Option<String> {
    let composed: String = raw.nfc().collect();
    let lowered = composed.to_lowercase();
    let trimmed = lowered.trim_matches(|c| STRIPPED.contains(&c));
    if trimmed.is_empty() {
        None
    } else {
        Some(String::from(trimmed))
    }
}

/// Split on whitespace and fold each piece, dropping pieces that fold away.
pub fn fold_text(raw: &str) -> Vec<String> {
    raw.split_whitespace().filter_map(fold_token).collect()
}

//! Synonym transform rules.
//!
//! A rule declares two token sequences interchangeable without penalty
//! ("going to" / "gonna"). Rules are symmetric: either side found in the
//! reference licenses the other side in the hypothesis. Matching is
//! non-recursive — one rule application per span, never chained through
//! another rule's output.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::doc::ReferenceDocument;
use crate::text::fold_text;

/// An equivalence pair of comparison-form token sequences.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TransformRule {
    lhs: Vec<String>,
    rhs: Vec<String>,
}

impl TransformRule {
    pub fn lhs(&self) -> &[String] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[String] {
        &self.rhs
    }

    pub fn side(&self, side: RuleSide) -> &[String] {
        match side {
            RuleSide::Lhs => &self.lhs,
            RuleSide::Rhs => &self.rhs,
        }
    }
}

/// Which side of a rule was found in the text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSide {
    Lhs,
    Rhs,
}

impl RuleSide {
    pub fn opposite(self) -> Self {
        match self {
            Self::Lhs => Self::Rhs,
            Self::Rhs => Self::Lhs,
        }
    }
}

/// One rule side matched at a text position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleMatch {
    pub rule_index: usize,
    pub side: RuleSide,
    /// Number of text tokens covered by the matched side.
    pub len: usize,
}

/// A deduplicated rule list with a first-token index for span matching.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransformRuleSet {
    rules: Vec<TransformRule>,
    /// first token of either side -> indices of rules starting with it
    index: BTreeMap<String, Vec<usize>>,
}

impl TransformRuleSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build a rule set from raw side pairs. Sides are whitespace-tokenized
    /// and folded to comparison form; duplicates collapse. A side that folds
    /// away entirely, or a rule whose sides fold to the same sequence, is an
    /// error.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self, RuleError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut seen = BTreeSet::new();
        let mut rules = Vec::new();
        for (raw_lhs, raw_rhs) in pairs {
            let lhs = fold_text(raw_lhs);
            let rhs = fold_text(raw_rhs);
            if lhs.is_empty() || rhs.is_empty() {
                return Err(RuleError::EmptySide {
                    rule: alloc::format!("{raw_lhs}|{raw_rhs}"),
                });
            }
            if lhs == rhs {
                return Err(RuleError::IdenticalSides {
                    rule: alloc::format!("{raw_lhs}|{raw_rhs}"),
                });
            }
            if seen.insert((lhs.clone(), rhs.clone())) {
                rules.push(TransformRule { lhs, rhs });
            }
        }
        let mut index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, rule) in rules.iter().enumerate() {
            for first in [&rule.lhs[0], &rule.rhs[0]] {
                let entry = index.entry(first.clone()).or_default();
                if entry.last() != Some(&i) {
                    entry.push(i);
                }
            }
        }
        Ok(Self { rules, index })
    }

    pub fn rules(&self) -> &[TransformRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Every rule side equal to `tokens[i..i+len]`, for any `len`. Both
    /// sides are tried; matches are reported in rule order, lhs before rhs.
    pub fn matches_at(&self, tokens: &[String], i: usize) -> Vec<RuleMatch> {
        let mut out = Vec::new();
        let Some(first) = tokens.get(i) else {
            return out;
        };
        let Some(candidates) = self.index.get(first) else {
            return out;
        };
        for &rule_index in candidates {
            let rule = &self.rules[rule_index];
            for side in [RuleSide::Lhs, RuleSide::Rhs] {
                let seq = rule.side(side);
                if tokens[i..].len() >= seq.len() && &tokens[i..i + seq.len()] == seq {
                    out.push(RuleMatch {
                        rule_index,
                        side,
                        len: seq.len(),
                    });
                }
            }
        }
        out
    }
}

/// Corpus-level counts of how often the lenient-match machinery can fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CoverageStats {
    pub tokens_total: u64,
    pub tokens_with_norm_candidates: u64,
    pub tokens_covered_by_synonym_match: u64,
}

impl CoverageStats {
    pub fn fraction_norm(&self) -> f64 {
        fraction(self.tokens_with_norm_candidates, self.tokens_total)
    }

    pub fn fraction_syn(&self) -> f64 {
        fraction(self.tokens_covered_by_synonym_match, self.tokens_total)
    }
}

fn fraction(part: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        part as f64 / total as f64
    }
}

/// Count, across documents, the tokens carrying normalization candidates and
/// the tokens lying inside at least one synonym match span.
pub fn coverage_stats(docs: &[ReferenceDocument], rules: &TransformRuleSet) -> CoverageStats {
    let mut stats = CoverageStats::default();
    for doc in docs {
        stats.tokens_total += doc.tokens.len() as u64;
        stats.tokens_with_norm_candidates +=
            doc.tokens.iter().filter(|t| t.norm_id.is_some()).count() as u64;

        let backbone = doc.comparison_backbone();
        let tokens: Vec<String> = backbone.iter().map(|(_, t)| t.clone()).collect();
        let mut covered = BTreeSet::new();
        for pos in 0..tokens.len() {
            for m in rules.matches_at(&tokens, pos) {
                let first_orig = backbone[pos].0;
                let last_orig = backbone[pos + m.len - 1].0;
                covered.extend(first_orig..=last_orig);
            }
        }
        stats.tokens_covered_by_synonym_match += covered.len() as u64;
    }
    stats
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule {rule:?}: one side is empty after folding")]
    EmptySide { rule: String },
    #[error("rule {rule:?}: both sides fold to the same sequence")]
    IdenticalSides { rule: String },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::{Casing, NlpToken, ReferenceDocument};

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    fn doc_of(words: &[&str]) -> ReferenceDocument {
        ReferenceDocument::new(
            words
                .iter()
                .map(|w| NlpToken::new(*w, "spk1", Casing::Lower))
                .collect(),
        )
    }

    #[test]
    fn builds_and_folds_rules() {
        let set = TransformRuleSet::from_pairs([("going to", "gonna"), ("I'll", "I will")])
            .unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.rules()[0].lhs(), toks("going to"));
        assert_eq!(set.rules()[0].rhs(), toks("gonna"));
        assert_eq!(set.rules()[1].lhs(), toks("i'll"));
        assert_eq!(set.rules()[1].rhs(), toks("i will"));
    }

    #[test]
    fn rejects_empty_and_identical_sides() {
        assert!(matches!(
            TransformRuleSet::from_pairs([("", "gonna")]),
            Err(RuleError::EmptySide { .. })
        ));
        assert!(matches!(
            TransformRuleSet::from_pairs([("...", "gonna")]),
            Err(RuleError::EmptySide { .. })
        ));
        assert!(matches!(
            TransformRuleSet::from_pairs([("Gonna", "gonna")]),
            Err(RuleError::IdenticalSides { .. })
        ));
    }

    #[test]
    fn deduplicates_rules() {
        let set =
            TransformRuleSet::from_pairs([("going to", "gonna"), ("Going To", "GONNA")]).unwrap();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn matches_lhs_in_text() {
        let set = TransformRuleSet::from_pairs([("going to", "gonna")]).unwrap();
        let text = toks("i'm going to win");
        let found = set.matches_at(&text, 1);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].side, RuleSide::Lhs);
        assert_eq!(found[0].len, 2);
    }

    #[test]
    fn matches_rhs_in_text() {
        let set = TransformRuleSet::from_pairs([("going to", "gonna")]).unwrap();
        let text = toks("i'm gonna win");
        let found = set.matches_at(&text, 1);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].side, RuleSide::Rhs);
        assert_eq!(found[0].len, 1);
    }

    #[test]
    fn no_match_elsewhere() {
        let set = TransformRuleSet::from_pairs([("going to", "gonna")]).unwrap();
        let text = toks("i'm going to win");
        assert!(set.matches_at(&text, 0).is_empty());
        assert!(set.matches_at(&text, 3).is_empty());
        assert!(set.matches_at(&text, 4).is_empty());
    }

    #[test]
    fn partial_prefix_does_not_match() {
        let set = TransformRuleSet::from_pairs([("going to", "gonna")]).unwrap();
        // "going" alone at the end of text: lhs would run past the end
        let text = toks("keep going");
        assert!(set.matches_at(&text, 1).is_empty());
    }

    #[test]
    fn overlapping_matches_all_reported() {
        let set = TransformRuleSet::from_pairs([("a b", "x"), ("a", "y")]).unwrap();
        let text = toks("a b");
        let found = set.matches_at(&text, 0);
        assert_eq!(found.len(), 2);
    }

    #[test]
    fn coverage_counts_norm_tokens() {
        let mut doc = doc_of(&[
            "t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9", "t10", "t11", "t12",
            "t13", "t14", "t15", "t16", "t17", "t18", "2021",
        ]);
        doc.tokens[19].norm_id = Some("n1".into());
        let stats = coverage_stats(&[doc], &TransformRuleSet::empty());
        assert_eq!(stats.tokens_total, 20);
        assert_eq!(stats.tokens_with_norm_candidates, 1);
        assert_eq!(stats.fraction_norm(), 0.05);
        assert_eq!(stats.fraction_syn(), 0.0);
    }

    #[test]
    fn coverage_counts_tokens_in_match_spans() {
        let doc = doc_of(&["i'm", "going", "to", "win"]);
        let rules = TransformRuleSet::from_pairs([("going to", "gonna")]).unwrap();
        let stats = coverage_stats(&[doc], &rules);
        assert_eq!(stats.tokens_covered_by_synonym_match, 2);
        assert_eq!(stats.fraction_syn(), 0.5);
    }

    #[test]
    fn coverage_empty_inputs() {
        let stats = coverage_stats(&[], &TransformRuleSet::empty());
        assert_eq!(stats.fraction_norm(), 0.0);
        assert_eq!(stats.fraction_syn(), 0.0);
    }

    #[test]
    fn coverage_is_concat_consistent() {
        // fractions over the union equal the weighted average of parts
        let d1 = doc_of(&["going", "to", "a", "b"]);
        let d2 = doc_of(&["c", "gonna"]);
        let rules = TransformRuleSet::from_pairs([("going to", "gonna")]).unwrap();
        let s1 = coverage_stats(&[d1.clone()], &rules);
        let s2 = coverage_stats(&[d2.clone()], &rules);
        let both = coverage_stats(&[d1, d2], &rules);
        assert_eq!(
            both.tokens_covered_by_synonym_match,
            s1.tokens_covered_by_synonym_match + s2.tokens_covered_by_synonym_match
        );
        assert_eq!(both.tokens_total, s1.tokens_total + s2.tokens_total);
    }
}

//! Brute-force oracles and randomized case generators shared by the weralign
//! test suites.
//!
//! Everything here is deliberately naive: the oracles recompute expected
//! results by direct enumeration or textbook dynamic programming so they stay
//! independent of the implementation paths they are used to check. This crate
//! must not depend on the production crates.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;

/// Classic full-matrix unit-cost edit distance between two token sequences.
/// Cost only; no traceback, no tie-breaking.
pub fn lev_cost(a: &[String], b: &[String]) -> usize {
    let n = a.len();
    let m = b.len();
    let mut dp = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in dp.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=m {
        dp[0][j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = dp[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            let del = dp[i - 1][j] + 1;
            let ins = dp[i][j - 1] + 1;
            dp[i][j] = sub.min(del).min(ins);
        }
    }
    dp[n][m]
}

/// A synonym rule as plain data: two comparison-form token sequences treated
/// as interchangeable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthRule {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

/// One alternative realization of a backbone span: replace tokens
/// `[start, start+len)` with `emit`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AltSpan {
    pub start: usize,
    pub len: usize,
    pub emit: Vec<String>,
}

impl AltSpan {
    fn overlaps(&self, other: &AltSpan) -> bool {
        self.start < other.start + other.len && other.start < self.start + self.len
    }
}

/// Collect every alternative span a backbone admits: each normalization
/// candidate attached to a token index, plus each rule side matched anywhere
/// in the backbone (emitting the opposite side). Matching is direct sequence
/// comparison.
pub fn collect_alt_spans(
    backbone: &[String],
    rules: &[SynthRule],
    norm_spans: &[(usize, Vec<Vec<String>>)],
) -> Vec<AltSpan> {
    let mut alts = BTreeSet::new();
    for (idx, candidates) in norm_spans {
        for cand in candidates {
            alts.insert(AltSpan {
                start: *idx,
                len: 1,
                emit: cand.clone(),
            });
        }
    }
    for rule in rules {
        for (side, opposite) in [(&rule.lhs, &rule.rhs), (&rule.rhs, &rule.lhs)] {
            if side.is_empty() || side.len() > backbone.len() {
                continue;
            }
            for start in 0..=(backbone.len() - side.len()) {
                if &backbone[start..start + side.len()] == side.as_slice() {
                    alts.insert(AltSpan {
                        start,
                        len: side.len(),
                        emit: opposite.clone(),
                    });
                }
            }
        }
    }
    alts.into_iter().collect()
}

/// Brute-force expansion of the acceptable-realization language by string
/// rewriting: every subset of pairwise non-overlapping alternative spans,
/// substituted into the backbone simultaneously. The verbatim sequence (empty
/// selection) is always included.
pub fn expand_language(
    backbone: &[String],
    rules: &[SynthRule],
    norm_spans: &[(usize, Vec<Vec<String>>)],
) -> BTreeSet<Vec<String>> {
    let alts = collect_alt_spans(backbone, rules, norm_spans);
    assert!(
        alts.len() <= 16,
        "oracle expansion limited to 16 alternative spans, got {}",
        alts.len()
    );
    let mut language = BTreeSet::new();
    for mask in 0u32..(1 << alts.len()) {
        let chosen: Vec<&AltSpan> = alts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a)
            .collect();
        let disjoint = chosen
            .iter()
            .enumerate()
            .all(|(i, a)| chosen[i + 1..].iter().all(|b| !a.overlaps(b)));
        if !disjoint {
            continue;
        }
        let mut seq: Vec<String> = backbone.to_vec();
        let mut ordered = chosen.clone();
        ordered.sort_by_key(|a| std::cmp::Reverse(a.start));
        for alt in ordered {
            seq.splice(alt.start..alt.start + alt.len, alt.emit.iter().cloned());
        }
        language.insert(seq);
    }
    language
}

/// Minimum edit cost between `hyp` and the best sequence in `language`.
pub fn best_cost_over_language(language: &BTreeSet<Vec<String>>, hyp: &[String]) -> usize {
    language
        .iter()
        .map(|path| lev_cost(path, hyp))
        .min()
        .expect("language always contains the verbatim sequence")
}

const ALPHABET: [&str; 5] = ["alpha", "bravo", "coral", "delta", "ember"];

/// Random token drawn from the fixed five-symbol test alphabet.
pub fn random_token<R: Rng>(rng: &mut R) -> String {
    ALPHABET.choose(rng).unwrap().to_string()
}

/// Random token sequence of the given length range.
pub fn random_tokens<R: Rng>(rng: &mut R, min_len: usize, max_len: usize) -> Vec<String> {
    let len = rng.random_range(min_len..=max_len);
    (0..len).map(|_| random_token(rng)).collect()
}

/// Random synonym rule with side lengths in `1..=max_side` and distinct sides.
/// When `balanced` is set the two side lengths differ by at most one.
pub fn random_rule<R: Rng>(rng: &mut R, max_side: usize, balanced: bool) -> SynthRule {
    loop {
        let lhs_len = rng.random_range(1..=max_side);
        let rhs_len = if balanced {
            let lo = lhs_len.saturating_sub(1).max(1);
            let hi = (lhs_len + 1).min(max_side);
            rng.random_range(lo..=hi)
        } else {
            rng.random_range(1..=max_side)
        };
        let lhs = (0..lhs_len).map(|_| random_token(rng)).collect::<Vec<_>>();
        let rhs = (0..rhs_len).map(|_| random_token(rng)).collect::<Vec<_>>();
        if lhs != rhs {
            return SynthRule { lhs, rhs };
        }
    }
}

/// Knobs for [`random_case`].
#[derive(Debug, Clone)]
pub struct CaseOptions {
    pub max_tokens: usize,
    pub max_rules: usize,
    pub max_rule_side: usize,
    /// Rule side lengths differ by at most one.
    pub balanced_rules: bool,
    pub max_norm_spans: usize,
    pub max_candidates: usize,
    pub max_candidate_len: usize,
    pub with_entities: bool,
}

impl Default for CaseOptions {
    fn default() -> Self {
        Self {
            max_tokens: 10,
            max_rules: 2,
            max_rule_side: 3,
            balanced_rules: false,
            max_norm_spans: 2,
            max_candidates: 2,
            max_candidate_len: 3,
            with_entities: false,
        }
    }
}

/// A randomized scoring scenario as plain data. `entities` runs parallel to
/// `tokens`: `Some((class, span_id))` marks membership in a contiguous
/// entity mention.
#[derive(Debug, Clone)]
pub struct SynthCase {
    pub tokens: Vec<String>,
    pub entities: Vec<Option<(String, u32)>>,
    pub norm_spans: Vec<(usize, Vec<Vec<String>>)>,
    pub rules: Vec<SynthRule>,
}

const ENTITY_CLASSES: [&str; 5] = ["ORG", "DATE", "PERSON", "YEAR", "ORDINAL"];

/// Draw a random reference document scenario: tokens, optional contiguous
/// entity spans, normalization candidates on a few tokens, and synonym rules.
pub fn random_case<R: Rng>(rng: &mut R, opts: &CaseOptions) -> SynthCase {
    let tokens = random_tokens(rng, 0, opts.max_tokens);
    let mut entities = vec![None; tokens.len()];
    if opts.with_entities && !tokens.is_empty() {
        let mut span_id = 0u32;
        let mut i = 0;
        while i < tokens.len() {
            if rng.random_bool(0.4) {
                let span_len = rng.random_range(1..=3usize.min(tokens.len() - i));
                let class = *ENTITY_CLASSES.choose(rng).unwrap();
                span_id += 1;
                for k in 0..span_len {
                    entities[i + k] = Some((class.to_string(), span_id));
                }
                i += span_len;
            } else {
                i += 1;
            }
        }
    }
    let mut norm_spans = Vec::new();
    if !tokens.is_empty() {
        let span_count = rng.random_range(0..=opts.max_norm_spans);
        let mut used = std::collections::BTreeSet::new();
        for _ in 0..span_count {
            let idx = rng.random_range(0..tokens.len());
            if !used.insert(idx) {
                continue;
            }
            let n_cands = rng.random_range(1..=opts.max_candidates);
            let candidates: Vec<Vec<String>> = (0..n_cands)
                .map(|_| random_tokens(rng, 1, opts.max_candidate_len))
                .collect();
            norm_spans.push((idx, candidates));
        }
        norm_spans.sort_by_key(|(idx, _)| *idx);
    }
    let rules = (0..rng.random_range(0..=opts.max_rules))
        .map(|_| random_rule(rng, opts.max_rule_side, opts.balanced_rules))
        .collect();
    SynthCase {
        tokens,
        entities,
        norm_spans,
        rules,
    }
}

/// Derive a hypothesis by corrupting a reference with `edits` random
/// substitutions, deletions, and insertions.
pub fn corrupt<R: Rng>(rng: &mut R, reference: &[String], edits: usize) -> Vec<String> {
    let mut hyp: Vec<String> = reference.to_vec();
    for _ in 0..edits {
        match rng.random_range(0..3u8) {
            0 if !hyp.is_empty() => {
                let i = rng.random_range(0..hyp.len());
                hyp[i] = random_token(rng);
            }
            1 if !hyp.is_empty() => {
                let i = rng.random_range(0..hyp.len());
                hyp.remove(i);
            }
            _ => {
                let i = rng.random_range(0..=hyp.len());
                hyp.insert(i, random_token(rng));
            }
        }
    }
    hyp
}

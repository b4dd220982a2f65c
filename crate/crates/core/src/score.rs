//! WER summaries and entity-class error attribution.
//!
//! Counts are exact rationals. Document-level tallies are integers, but
//! entity buckets receive fractional mass: an edit operation whose arc spans
//! `k` original tokens distributes its single unit of error weight `1/k` to
//! each spanned token's bucket, so substitution and deletion mass is
//! conserved exactly across buckets. Correct mass is spread `1/m` per
//! operation over the `m` operations realizing one branch, so a fully
//! matched alternative contributes exactly one unit of correct mass per
//! original token it covers, no matter how many tokens the alternative
//! spells it with. Insertions belong to the document, never to a class.
//!
//! Ratios derived from counts (WER itself, means over classes) are computed
//! in arbitrary precision to stay exact at any corpus size.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, Zero};

use crate::align::{Alignment, OpKind};
use crate::doc::ReferenceDocument;

/// Exact rational count. Integral at the document level; possibly
/// fractional inside entity buckets.
pub type Count = Ratio<i64>;

fn count(n: i64) -> Count {
    Ratio::from_integer(n)
}

fn to_big(c: &Count) -> BigRational {
    BigRational::new(BigInt::from(*c.numer()), BigInt::from(*c.denom()))
}

/// Edit-operation tallies over one alignment, file, or group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WerSummary {
    pub correct: Count,
    pub substitutions: Count,
    pub deletions: Count,
    pub insertions: Count,
    /// The denominator: reference length of the chosen path.
    pub ref_count: Count,
}

impl Default for WerSummary {
    fn default() -> Self {
        Self::zero()
    }
}

impl WerSummary {
    pub fn zero() -> Self {
        Self {
            correct: count(0),
            substitutions: count(0),
            deletions: count(0),
            insertions: count(0),
            ref_count: count(0),
        }
    }

    /// S + D + I.
    pub fn errors(&self) -> Count {
        self.substitutions + self.deletions + self.insertions
    }

    /// (S + D + I) / ref_count, or `None` when the denominator is zero.
    pub fn wer(&self) -> Option<BigRational> {
        if self.ref_count.is_zero() {
            None
        } else {
            Some(to_big(&self.errors()) / to_big(&self.ref_count))
        }
    }

    /// WER as a percent string with one half-even decimal, e.g. "11.3".
    pub fn wer_pct(&self) -> Option<String> {
        self.wer().as_ref().map(percent_1dp)
    }

    pub fn add(&mut self, other: &WerSummary) {
        self.correct += other.correct;
        self.substitutions += other.substitutions;
        self.deletions += other.deletions;
        self.insertions += other.insertions;
        self.ref_count += other.ref_count;
    }
}

/// Tally one alignment. The denominator is the chosen path's reference
/// length, so a matched one-token alternative over a two-token span does not
/// deflate WER elsewhere.
pub fn summarize(a: &Alignment) -> WerSummary {
    let (correct, subs, dels, inss) = a.op_counts();
    WerSummary {
        correct: count(correct as i64),
        substitutions: count(subs as i64),
        deletions: count(dels as i64),
        insertions: count(inss as i64),
        ref_count: count(a.best_path_ref_len as i64),
    }
}

/// Micro-average: fieldwise sums, WER recomputed from the summed counts.
pub fn merge_summaries<'a, I>(summaries: I) -> WerSummary
where
    I: IntoIterator<Item = &'a WerSummary>,
{
    let mut total = WerSummary::zero();
    for s in summaries {
        total.add(s);
    }
    total
}

/// Per-entity-class summaries plus the bucket for unlabeled tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EntityBreakdown {
    pub per_class: BTreeMap<String, WerSummary>,
    pub unlabeled: WerSummary,
}

impl EntityBreakdown {
    /// Unweighted arithmetic mean of per-class WERs over classes with a
    /// nonzero denominator. The unlabeled bucket does not participate.
    pub fn mean_entity_wer(&self) -> Option<BigRational> {
        let wers: Vec<BigRational> = self
            .per_class
            .values()
            .filter_map(WerSummary::wer)
            .collect();
        if wers.is_empty() {
            None
        } else {
            let n = BigRational::from_integer(BigInt::from(wers.len() as i64));
            Some(wers.into_iter().sum::<BigRational>() / n)
        }
    }

    /// Total attributed substitution + deletion mass, all buckets.
    pub fn attributed_errors(&self) -> Count {
        let mut total = self.unlabeled.substitutions + self.unlabeled.deletions;
        for s in self.per_class.values() {
            total += s.substitutions + s.deletions;
        }
        total
    }

    pub fn merge_from(&mut self, other: &EntityBreakdown) {
        for (class, summary) in &other.per_class {
            self.per_class
                .entry(class.clone())
                .or_default()
                .add(summary);
        }
        self.unlabeled.add(&other.unlabeled);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScoreError {
    #[error("op provenance spans tokens {start}..{end} but the document has {len}")]
    ProvenanceOutOfRange {
        start: usize,
        end: usize,
        len: usize,
    },
}

/// Attribute an alignment's operations to entity classes through arc
/// provenance. Must be called with the document the lattice was built from.
pub fn entity_breakdown(
    a: &Alignment,
    doc: &ReferenceDocument,
) -> Result<EntityBreakdown, ScoreError> {
    let mut breakdown = EntityBreakdown::default();

    // Consecutive scored ops sharing one provenance tag realize one branch;
    // insertions interleave freely and belong to no branch.
    let mut groups: Vec<(crate::lattice::ProvenanceTag, Vec<OpKind>)> = Vec::new();
    for op in &a.ops {
        if op.kind == OpKind::Insertion {
            continue;
        }
        let prov = op
            .provenance
            .expect("scored ops always carry provenance");
        if prov.ref_token_start + prov.ref_token_len > doc.tokens.len() {
            return Err(ScoreError::ProvenanceOutOfRange {
                start: prov.ref_token_start,
                end: prov.ref_token_start + prov.ref_token_len,
                len: doc.tokens.len(),
            });
        }
        match groups.last_mut() {
            Some((last, kinds)) if *last == prov => kinds.push(op.kind),
            _ => groups.push((prov, alloc::vec![op.kind])),
        }
    }

    for (prov, kinds) in groups {
        let ops_in_branch = kinds.len() as i64;
        let span_len = prov.ref_token_len as i64;
        let correct_share = Ratio::new(1, ops_in_branch);
        let error_share = Ratio::new(1, span_len);
        for kind in kinds {
            for t in prov.ref_token_start..prov.ref_token_start + prov.ref_token_len {
                let bucket = match &doc.tokens[t].entity {
                    Some(entity) => breakdown
                        .per_class
                        .entry(entity.class_label.clone())
                        .or_default(),
                    None => &mut breakdown.unlabeled,
                };
                match kind {
                    OpKind::Correct => bucket.correct += correct_share,
                    OpKind::Substitution => bucket.substitutions += error_share,
                    OpKind::Deletion => bucket.deletions += error_share,
                    OpKind::Insertion => unreachable!("filtered above"),
                }
            }
        }
    }

    for bucket in breakdown
        .per_class
        .values_mut()
        .chain(core::iter::once(&mut breakdown.unlabeled))
    {
        bucket.ref_count = bucket.correct + bucket.substitutions + bucket.deletions;
    }
    Ok(breakdown)
}

/// Format a non-negative rational as a percentage with exactly one decimal
/// digit, rounding half to even: 0.113 -> "11.3".
pub fn percent_1dp(value: &BigRational) -> String {
    debug_assert!(!value.is_negative());
    // tenths of a percent = value * 1000
    let scaled = value * BigRational::from_integer(BigInt::from(1000));
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice_rem = &r * BigInt::from(2);
    let round_up = match twice_rem.cmp(scaled.denom()) {
        core::cmp::Ordering::Greater => true,
        core::cmp::Ordering::Less => false,
        core::cmp::Ordering::Equal => q.is_odd(),
    };
    let tenths = if round_up { q + 1 } else { q };
    let whole = &tenths / BigInt::from(10);
    let frac = &tenths % BigInt::from(10);
    alloc::format!("{whole}.{frac}")
}

//! Corpus-level aggregation: overall, per-sector, per-sample-rate, and
//! per-entity summaries, plus entity-mention histograms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::doc::{ManifestRow, ReferenceDocument};
use crate::score::{merge_summaries, EntityBreakdown, WerSummary};

/// Everything scored for a single recording.
#[derive(Debug, Clone, PartialEq)]
pub struct FileResult {
    pub file_id: String,
    pub summary: WerSummary,
    pub entities: EntityBreakdown,
    pub metadata: ManifestRow,
}

/// Merged counts for one stratification group (a sector or a sample rate).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub key: String,
    pub summary: WerSummary,
    pub total_duration_s: f64,
    pub file_count: usize,
}

/// Unweighted means of the group micro-WERs, the "mean over groups" rows of
/// a stratified table. Groups with a zero denominator do not participate.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMeans {
    pub mean_sector_wer: Option<BigRational>,
    pub mean_sample_rate_wer: Option<BigRational>,
}

/// The complete corpus report.
#[derive(Debug, Clone, PartialEq)]
pub struct StratifiedReport {
    pub overall: WerSummary,
    pub by_sector: Vec<GroupSummary>,
    pub by_sample_rate: Vec<GroupSummary>,
    pub by_entity: EntityBreakdown,
    pub per_file: Vec<FileResult>,
    pub group_means: GroupMeans,
    pub excluded_files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("duplicate file id {file_id:?} in results")]
    DuplicateFileId { file_id: String },
}

fn group_by<F>(results: &[FileResult], key_of: F) -> Vec<GroupSummary>
where
    F: Fn(&FileResult) -> String,
{
    let mut grouped: BTreeMap<String, GroupSummary> = BTreeMap::new();
    for result in results {
        let key = key_of(result);
        let entry = grouped.entry(key.clone()).or_insert_with(|| GroupSummary {
            key,
            summary: WerSummary::zero(),
            total_duration_s: 0.0,
            file_count: 0,
        });
        entry.summary.add(&result.summary);
        entry.total_duration_s += result.metadata.duration_s;
        entry.file_count += 1;
    }
    let mut groups: Vec<GroupSummary> = grouped.into_values().collect();
    // longest groups first; key breaks exact duration ties deterministically
    groups.sort_by(|a, b| {
        b.total_duration_s
            .total_cmp(&a.total_duration_s)
            .then_with(|| a.key.cmp(&b.key))
    });
    groups
}

fn mean_of_groups(groups: &[GroupSummary]) -> Option<BigRational> {
    let wers: Vec<BigRational> = groups.iter().filter_map(|g| g.summary.wer()).collect();
    if wers.is_empty() {
        None
    } else {
        let n = BigRational::from_integer(num_bigint::BigInt::from(wers.len() as i64));
        Some(wers.into_iter().sum::<BigRational>() / n)
    }
}

/// Aggregate per-file results into the stratified report. `exclude` drops
/// the listed file ids from every statistic and is recorded in the report.
/// Result order is preserved, so aggregation is deterministic in manifest
/// order.
pub fn aggregate(
    results: Vec<FileResult>,
    exclude: &[String],
) -> Result<StratifiedReport, ReportError> {
    let mut seen = BTreeSet::new();
    for r in &results {
        if !seen.insert(r.file_id.clone()) {
            return Err(ReportError::DuplicateFileId {
                file_id: r.file_id.clone(),
            });
        }
    }
    let excluded_files: Vec<String> = {
        let set: BTreeSet<&String> = exclude.iter().collect();
        set.into_iter().cloned().collect()
    };
    let kept: Vec<FileResult> = results
        .into_iter()
        .filter(|r| !excluded_files.contains(&r.file_id))
        .collect();

    let overall = merge_summaries(kept.iter().map(|r| &r.summary));
    let by_sector = group_by(&kept, |r| r.metadata.sector.clone());
    let by_sample_rate = group_by(&kept, |r| r.metadata.sample_rate_hz.to_string());
    let mut by_entity = EntityBreakdown::default();
    for r in &kept {
        by_entity.merge_from(&r.entities);
    }
    let group_means = GroupMeans {
        mean_sector_wer: mean_of_groups(&by_sector),
        mean_sample_rate_wer: mean_of_groups(&by_sample_rate),
    };
    Ok(StratifiedReport {
        overall,
        by_sector,
        by_sample_rate,
        by_entity,
        per_file: kept,
        group_means,
        excluded_files,
    })
}

/// Span-level entity mention counts: one mention per distinct
/// (file, span id) pair, keyed by class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EntityHistogram {
    pub counts: BTreeMap<String, u64>,
}

pub fn entity_distribution(docs: &[ReferenceDocument]) -> EntityHistogram {
    let mut mentions: BTreeSet<(String, String, u32)> = BTreeSet::new();
    for doc in docs {
        for token in &doc.tokens {
            if let Some(entity) = &token.entity {
                mentions.insert((
                    entity.class_label.clone(),
                    doc.file_id.clone(),
                    entity.span_id,
                ));
            }
        }
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for (class, _, _) in mentions {
        *counts.entry(class).or_insert(0) += 1;
    }
    EntityHistogram { counts }
}

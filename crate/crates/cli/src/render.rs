//! Deterministic report rendering: canonical JSON, CSV tables, and
//! human-readable side-by-side alignments.
//!
//! JSON objects keep their keys sorted and rationals appear as
//! `{num, den}` plus a percent string rounded half-even to one decimal, so
//! two runs over the same inputs produce identical bytes.

use weralign_core::num_bigint::BigInt;
use weralign_core::num_rational::BigRational;
use serde_json::{json, Map, Value};

use weralign_core::{
    percent_1dp, Alignment, Count, CoverageStats, EntityBreakdown, EntityHistogram, OpKind,
    ReferenceDocument, StratifiedReport, WerSummary,
};

/// A file that failed to score during a batch run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileFailure {
    pub file_id: String,
    pub error: String,
}

fn count_value(c: &Count) -> Value {
    if *c.denom() == 1 {
        json!(*c.numer())
    } else {
        json!({ "num": *c.numer(), "den": *c.denom() })
    }
}

fn rational_value(r: &BigRational) -> Value {
    let int = |v: &BigInt| -> Value {
        match i64::try_from(v) {
            Ok(n) => json!(n),
            Err(_) => json!(v.to_string()),
        }
    };
    json!({ "num": int(r.numer()), "den": int(r.denom()) })
}

fn summary_value(s: &WerSummary) -> Value {
    json!({
        "correct": count_value(&s.correct),
        "substitutions": count_value(&s.substitutions),
        "deletions": count_value(&s.deletions),
        "insertions": count_value(&s.insertions),
        "ref_count": count_value(&s.ref_count),
        "wer": s.wer().as_ref().map(rational_value),
        "wer_pct": s.wer_pct(),
    })
}

fn breakdown_value(b: &EntityBreakdown) -> Value {
    let classes: Map<String, Value> = b
        .per_class
        .iter()
        .map(|(class, summary)| (class.clone(), summary_value(summary)))
        .collect();
    json!({
        "classes": classes,
        "unlabeled": summary_value(&b.unlabeled),
        "mean_entity_wer": b.mean_entity_wer().as_ref().map(rational_value),
        "mean_entity_wer_pct": b.mean_entity_wer().as_ref().map(percent_1dp),
    })
}

/// Render the full corpus report as canonical JSON bytes.
pub fn render_json(report: &StratifiedReport, failures: &[FileFailure]) -> String {
    let groups = |groups: &[weralign_core::GroupSummary]| -> Value {
        Value::Array(
            groups
                .iter()
                .map(|g| {
                    json!({
                        "group": g.key,
                        "files": g.file_count,
                        "duration_s": g.total_duration_s,
                        "summary": summary_value(&g.summary),
                    })
                })
                .collect(),
        )
    };
    let per_file: Vec<Value> = report
        .per_file
        .iter()
        .map(|f| {
            json!({
                "file_id": f.file_id,
                "summary": summary_value(&f.summary),
                "entities": breakdown_value(&f.entities),
                "metadata": {
                    "ref_path": f.metadata.ref_path,
                    "hyp_path": f.metadata.hyp_path,
                    "sector": f.metadata.sector,
                    "sample_rate_hz": f.metadata.sample_rate_hz,
                    "duration_s": f.metadata.duration_s,
                    "quarter": f.metadata.quarter,
                    "num_speakers": f.metadata.num_speakers,
                },
            })
        })
        .collect();
    let value = json!({
        "overall": summary_value(&report.overall),
        "by_sector": groups(&report.by_sector),
        "by_sample_rate": groups(&report.by_sample_rate),
        "by_entity": breakdown_value(&report.by_entity),
        "per_file": per_file,
        "group_means": {
            "mean_sector_wer": report.group_means.mean_sector_wer.as_ref().map(rational_value),
            "mean_sector_wer_pct": report.group_means.mean_sector_wer.as_ref().map(percent_1dp),
            "mean_sample_rate_wer": report.group_means.mean_sample_rate_wer.as_ref().map(rational_value),
            "mean_sample_rate_wer_pct": report.group_means.mean_sample_rate_wer.as_ref().map(percent_1dp),
        },
        "excluded_files": report.excluded_files,
        "incomplete": !failures.is_empty(),
        "failures": failures
            .iter()
            .map(|f| json!({ "file_id": f.file_id, "error": f.error }))
            .collect::<Vec<_>>(),
    });
    let mut out = serde_json::to_string_pretty(&value).expect("report serializes");
    out.push('\n');
    out
}

/// Single-file scoring report for `score --json`.
pub fn render_score_json(
    file_id: &str,
    ref_path: &std::path::Path,
    hyp_path: &std::path::Path,
    summary: &WerSummary,
    entities: &EntityBreakdown,
) -> String {
    let value = json!({
        "file_id": file_id,
        "ref_path": ref_path.display().to_string(),
        "hyp_path": hyp_path.display().to_string(),
        "summary": summary_value(summary),
        "entities": breakdown_value(entities),
    });
    let mut out = serde_json::to_string_pretty(&value).expect("score report serializes");
    out.push('\n');
    out
}

fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn count_csv(c: &Count) -> String {
    if *c.denom() == 1 {
        c.numer().to_string()
    } else {
        let approx = *c.numer() as f64 / *c.denom() as f64;
        let fixed = format!("{approx:.4}");
        let trimmed = fixed.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    }
}

fn summary_csv_row(group: &str, s: &WerSummary) -> String {
    format!(
        "{},{},{},{},{},{}\n",
        csv_field(group),
        count_csv(&s.ref_count),
        count_csv(&s.substitutions),
        count_csv(&s.deletions),
        count_csv(&s.insertions),
        s.wer_pct().unwrap_or_default(),
    )
}

const GROUP_TABLE_HEADER: &str = "group,ref_count,sub,del,ins,wer_pct\n";

/// Render the stratification tables as CSV, one table per stratification.
pub fn render_csv(report: &StratifiedReport) -> String {
    let mut out = String::new();
    out.push_str("# by_sector\n");
    out.push_str(GROUP_TABLE_HEADER);
    for g in &report.by_sector {
        out.push_str(&summary_csv_row(&g.key, &g.summary));
    }
    out.push_str("\n# by_sample_rate\n");
    out.push_str(GROUP_TABLE_HEADER);
    for g in &report.by_sample_rate {
        out.push_str(&summary_csv_row(&g.key, &g.summary));
    }
    out.push_str("\n# by_entity\n");
    out.push_str(GROUP_TABLE_HEADER);
    for (class, summary) in &report.by_entity.per_class {
        out.push_str(&summary_csv_row(class, summary));
    }
    out.push_str(&summary_csv_row("(unlabeled)", &report.by_entity.unlabeled));
    out
}

/// Entity-mention histogram CSV, sorted by descending count then name.
pub fn render_histogram_csv(hist: &EntityHistogram) -> String {
    let mut rows: Vec<(&String, &u64)> = hist.counts.iter().collect();
    rows.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    let mut out = String::from("class,mentions\n");
    for (class, count) in rows {
        out.push_str(&format!("{},{count}\n", csv_field(class)));
    }
    out
}

/// Coverage statistics plus the entity histogram, as two CSV tables.
pub fn render_stats_csv(stats: &CoverageStats, hist: &EntityHistogram) -> String {
    let pct = |part: u64, total: u64| -> String {
        if total == 0 {
            "0.0".to_string()
        } else {
            percent_1dp(&BigRational::new(
                BigInt::from(part),
                BigInt::from(total),
            ))
        }
    };
    let mut out = String::from("metric,value\n");
    out.push_str(&format!("tokens_total,{}\n", stats.tokens_total));
    out.push_str(&format!(
        "tokens_with_norm_candidates,{}\n",
        stats.tokens_with_norm_candidates
    ));
    out.push_str(&format!(
        "tokens_covered_by_synonym_match,{}\n",
        stats.tokens_covered_by_synonym_match
    ));
    out.push_str(&format!(
        "fraction_norm_pct,{}\n",
        pct(stats.tokens_with_norm_candidates, stats.tokens_total)
    ));
    out.push_str(&format!(
        "fraction_syn_pct,{}\n",
        pct(stats.tokens_covered_by_synonym_match, stats.tokens_total)
    ));
    out.push('\n');
    out.push_str(&render_histogram_csv(hist));
    out
}

/// One edit operation per line in fixed-width columns:
/// `REF_TOKEN  HYP_TOKEN  OP  CLASS`. Deletions show `<del>` on the
/// hypothesis side, insertions `<ins>` on the reference side.
pub fn render_side_by_side(a: &Alignment, doc: &ReferenceDocument) -> String {
    let rows: Vec<(String, String, &'static str, String)> = a
        .ops
        .iter()
        .map(|op| {
            let ref_col = op.ref_label.clone().unwrap_or_else(|| "<ins>".to_string());
            let hyp_col = op.hyp_label.clone().unwrap_or_else(|| "<del>".to_string());
            let op_col = match op.kind {
                OpKind::Correct => "C",
                OpKind::Substitution => "S",
                OpKind::Deletion => "D",
                OpKind::Insertion => "I",
            };
            let class_col = match &op.provenance {
                Some(p) => {
                    let mut classes: Vec<&str> = Vec::new();
                    for t in p.ref_token_start..p.ref_token_start + p.ref_token_len {
                        if let Some(entity) = doc.tokens.get(t).and_then(|t| t.entity.as_ref()) {
                            if !classes.contains(&entity.class_label.as_str()) {
                                classes.push(&entity.class_label);
                            }
                        }
                    }
                    classes.join(",")
                }
                None => String::new(),
            };
            (ref_col, hyp_col, op_col, class_col)
        })
        .collect();
    let ref_width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let hyp_width = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (ref_col, hyp_col, op_col, class_col) in rows {
        let line = format!(
            "{ref_col:<ref_width$}  {hyp_col:<hyp_width$}  {op_col:<2}  {class_col}"
        );
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

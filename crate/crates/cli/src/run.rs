//! Single-file and corpus-batch scoring pipelines.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use weralign_core::{
    aggregate, align, build_lattice, coverage_stats, entity_distribution, entity_breakdown,
    summarize, Alignment, CorpusManifest, CoverageStats, EntityHistogram, FileResult,
    ReferenceDocument, TokenSequence, TransformRuleSet,
};

use crate::formats::{
    attach_norm_sidecar, parse_ctm, parse_hypothesis_text, parse_manifest, parse_nlp,
    parse_synonyms,
};
use crate::render::{
    render_csv, render_json, render_score_json, render_side_by_side, render_stats_csv,
    FileFailure,
};

/// Pipeline failures, split by exit code: I/O problems exit 1, data and
/// parse problems exit 2.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Data(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Data(_) => 2,
        }
    }
}

/// How to interpret the hypothesis file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypFormat {
    Txt,
    Ctm,
}

impl HypFormat {
    /// By extension: `.ctm` (any case) is CTM, everything else plain text.
    pub fn detect(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("ctm") => Self::Ctm,
            _ => Self::Txt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Score,
    Batch,
    Stats,
}

/// Everything a run needs; built by the CLI layer.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub ref_path: Option<PathBuf>,
    pub hyp_path: Option<PathBuf>,
    pub hyp_format: Option<HypFormat>,
    pub syn_path: Option<PathBuf>,
    pub norm_path: Option<PathBuf>,
    pub norm_dir: Option<PathBuf>,
    pub manifest_path: Option<PathBuf>,
    pub refs_glob: Option<String>,
    pub json_out: Option<PathBuf>,
    pub csv_out: Option<PathBuf>,
    pub sbs_out: Option<PathBuf>,
    pub stats_out: Option<PathBuf>,
    pub exclude_ids: Vec<String>,
    pub parallelism: usize,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            ref_path: None,
            hyp_path: None,
            hyp_format: None,
            syn_path: None,
            norm_path: None,
            norm_dir: None,
            manifest_path: None,
            refs_glob: None,
            json_out: None,
            csv_out: None,
            sbs_out: None,
            stats_out: None,
            exclude_ids: Vec::new(),
            parallelism: 1,
        }
    }

    fn validate(&self) -> Result<(), RunError> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(RunError::Data(format!("{what} is required")))
            }
        };
        if self.parallelism == 0 {
            return Err(RunError::Data("parallelism must be at least 1".into()));
        }
        match self.mode {
            Mode::Score => {
                need(self.ref_path.is_some(), "--ref")?;
                need(self.hyp_path.is_some(), "--hyp")
            }
            Mode::Batch => {
                need(self.manifest_path.is_some(), "--manifest")?;
                need(self.json_out.is_some(), "--json")
            }
            Mode::Stats => {
                need(self.refs_glob.is_some(), "--refs")?;
                need(self.stats_out.is_some(), "--out")
            }
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, RunError> {
    fs::read(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

fn data_err(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError::Data(format!("{}: {e}", path.display()))
}

/// Write through a temp file in the target directory and rename into place,
/// so interrupted runs never leave truncated output.
pub fn atomic_write(path: &Path, content: &str) -> Result<(), RunError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(|e| RunError::Io(format!("{}: {e}", parent.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&parent)
        .map_err(|e| RunError::Io(format!("{}: {e}", parent.display())))?;
    tmp.write_all(content.as_bytes())
        .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn load_rules(path: Option<&Path>) -> Result<TransformRuleSet, RunError> {
    match path {
        Some(path) => {
            let bytes = read_file(path)?;
            parse_synonyms(&bytes).map_err(|e| data_err(path, e))
        }
        None => Ok(TransformRuleSet::empty()),
    }
}

/// Where a reference's normalization sidecar lives.
enum NormSource<'a> {
    None,
    File(&'a Path),
    Dir(&'a Path),
}

fn load_reference(
    ref_path: &Path,
    file_id: &str,
    norms: &NormSource,
) -> Result<ReferenceDocument, RunError> {
    let bytes = read_file(ref_path)?;
    let doc = parse_nlp(&bytes)
        .map_err(|e| data_err(ref_path, e))?
        .with_file_id(file_id);
    let sidecar: Option<PathBuf> = match norms {
        NormSource::None => None,
        NormSource::File(path) => Some(path.to_path_buf()),
        NormSource::Dir(dir) => {
            let candidate = dir.join(format!("{file_id}.json"));
            candidate.exists().then_some(candidate)
        }
    };
    let doc = match sidecar {
        Some(path) => {
            let bytes = read_file(&path)?;
            attach_norm_sidecar(doc, &bytes).map_err(|e| data_err(&path, e))?
        }
        None => {
            doc.validate_norm_refs().map_err(|e| {
                data_err(
                    ref_path,
                    format!("{e} (supply a normalization sidecar with --norm/--norm-dir)"),
                )
            })?;
            doc
        }
    };
    Ok(doc)
}

fn load_hypothesis(path: &Path, format: Option<HypFormat>) -> Result<TokenSequence, RunError> {
    let bytes = read_file(path)?;
    match format.unwrap_or_else(|| HypFormat::detect(path)) {
        HypFormat::Txt => parse_hypothesis_text(&bytes).map_err(|e| data_err(path, e)),
        HypFormat::Ctm => parse_ctm(&bytes).map_err(|e| data_err(path, e)),
    }
}

fn score_pair(
    doc: &ReferenceDocument,
    rules: &TransformRuleSet,
    hyp: &TokenSequence,
) -> Result<Alignment, RunError> {
    let lattice = build_lattice(doc, rules)
        .map_err(|e| RunError::Data(format!("{}: {e}", doc.file_id)))?;
    Ok(align(&lattice, hyp))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Score one reference/hypothesis pair and print the summary line.
pub fn cmd_score(config: &RunConfig) -> Result<(), RunError> {
    config.validate()?;
    let ref_path = config.ref_path.as_deref().expect("validated");
    let hyp_path = config.hyp_path.as_deref().expect("validated");

    let rules = load_rules(config.syn_path.as_deref())?;
    let norms = match config.norm_path.as_deref() {
        Some(p) => NormSource::File(p),
        None => NormSource::None,
    };
    let doc = load_reference(ref_path, &file_stem(ref_path), &norms)?;
    let hyp = load_hypothesis(hyp_path, config.hyp_format)?;
    let alignment = score_pair(&doc, &rules, &hyp)?;
    let summary = summarize(&alignment);
    let entities = entity_breakdown(&alignment, &doc)
        .map_err(|e| RunError::Data(format!("{}: {e}", ref_path.display())))?;

    if let Some(sbs) = &config.sbs_out {
        atomic_write(sbs, &render_side_by_side(&alignment, &doc))?;
    }
    if let Some(json) = &config.json_out {
        atomic_write(
            json,
            &render_score_json(&doc.file_id, ref_path, hyp_path, &summary, &entities),
        )?;
    }

    let pct = summary.wer_pct().unwrap_or_else(|| "n/a".to_string());
    println!(
        "WER: {pct}% (S={} D={} I={} N={})",
        summary.substitutions, summary.deletions, summary.insertions, summary.ref_count
    );
    Ok(())
}

fn resolve(base: &Path, relative: &str) -> PathBuf {
    let path = Path::new(relative);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// Score every manifest row (in parallel), aggregate in manifest order, and
/// write the report. Returns the failures; any failure means exit code 2,
/// with a partial report marked `"incomplete": true` already written.
pub fn cmd_batch(config: &RunConfig) -> Result<Vec<FileFailure>, RunError> {
    config.validate()?;
    let manifest_path = config.manifest_path.as_deref().expect("validated");
    let manifest_bytes = read_file(manifest_path)?;
    let manifest: CorpusManifest =
        parse_manifest(&manifest_bytes).map_err(|e| data_err(manifest_path, e))?;
    let base = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let rules = load_rules(config.syn_path.as_deref())?;

    let rows: Vec<_> = manifest
        .rows
        .iter()
        .filter(|row| !config.exclude_ids.contains(&row.file_id))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| RunError::Io(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<FileResult, FileFailure>> = pool.install(|| {
        rows.par_iter()
            .map(|row| {
                let norms = match config.norm_dir.as_deref() {
                    Some(dir) => NormSource::Dir(dir),
                    None => NormSource::None,
                };
                let score = || -> Result<FileResult, RunError> {
                    let ref_path = resolve(&base, &row.ref_path);
                    let hyp_path = resolve(&base, &row.hyp_path);
                    let doc = load_reference(&ref_path, &row.file_id, &norms)?;
                    let hyp = load_hypothesis(&hyp_path, config.hyp_format)?;
                    let alignment = score_pair(&doc, &rules, &hyp)?;
                    let summary = summarize(&alignment);
                    let entities = entity_breakdown(&alignment, &doc)
                        .map_err(|e| RunError::Data(format!("{}: {e}", row.file_id)))?;
                    Ok(FileResult {
                        file_id: row.file_id.clone(),
                        summary,
                        entities,
                        metadata: (*row).clone(),
                    })
                };
                score().map_err(|e| FileFailure {
                    file_id: row.file_id.clone(),
                    error: e.to_string(),
                })
            })
            .collect()
    });

    let mut results = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(result) => results.push(result),
            Err(failure) => failures.push(failure),
        }
    }

    let report = aggregate(results, &config.exclude_ids)
        .map_err(|e| RunError::Data(e.to_string()))?;
    let json_out = config.json_out.as_deref().expect("validated");
    atomic_write(json_out, &render_json(&report, &failures))?;
    if let Some(csv_out) = &config.csv_out {
        atomic_write(csv_out, &render_csv(&report))?;
    }
    Ok(failures)
}

/// Batch internals exposed for determinism tests: score a manifest fully
/// in-process and return the rendered JSON report.
pub fn batch_report_json(config: &RunConfig) -> Result<String, RunError> {
    config.validate()?;
    let json_out = config
        .json_out
        .as_deref()
        .expect("validated")
        .to_path_buf();
    cmd_batch(config)?;
    let bytes = read_file(&json_out)?;
    String::from_utf8(bytes).map_err(|e| RunError::Data(e.to_string()))
}

/// Corpus survey: transform coverage statistics and entity-mention
/// distribution over a glob of reference files.
pub fn cmd_stats(config: &RunConfig) -> Result<(CoverageStats, EntityHistogram), RunError> {
    config.validate()?;
    let pattern = config.refs_glob.as_deref().expect("validated");
    let out_path = config.stats_out.as_deref().expect("validated");

    let paths: Vec<PathBuf> = glob::glob(pattern)
        .map_err(|e| RunError::Data(format!("bad glob {pattern:?}: {e}")))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| RunError::Io(e.to_string()))?;
    if paths.is_empty() {
        return Err(RunError::Io(format!("glob {pattern:?} matched no files")));
    }
    let rules = load_rules(config.syn_path.as_deref())?;

    let mut docs = Vec::with_capacity(paths.len());
    for path in &paths {
        // Coverage counts norm-tagged tokens; candidate resolution is not
        // required here, so a missing sidecar is fine in stats mode.
        let bytes = read_file(path)?;
        let mut doc = parse_nlp(&bytes)
            .map_err(|e| data_err(path, e))?
            .with_file_id(&file_stem(path));
        if let Some(dir) = config.norm_dir.as_deref() {
            let sidecar = dir.join(format!("{}.json", doc.file_id));
            if sidecar.exists() {
                let bytes = read_file(&sidecar)?;
                doc = attach_norm_sidecar(doc, &bytes).map_err(|e| data_err(&sidecar, e))?;
            }
        }
        docs.push(doc);
    }

    let stats = coverage_stats(&docs, &rules);
    let hist = entity_distribution(&docs);
    atomic_write(out_path, &render_stats_csv(&stats, &hist))?;
    Ok((stats, hist))
}

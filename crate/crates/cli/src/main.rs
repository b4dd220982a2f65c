use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use weralign::run::{cmd_batch, cmd_score, cmd_stats, HypFormat, Mode, RunConfig};

/// Transcript scoring with lenient lattice alignment: WER with synonym
/// transforms, text-normalization alternatives, and entity-level error
/// attribution.
#[derive(Parser)]
#[command(name = "weralign", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum HypFormatArg {
    Txt,
    Ctm,
}

impl From<HypFormatArg> for HypFormat {
    fn from(value: HypFormatArg) -> Self {
        match value {
            HypFormatArg::Txt => HypFormat::Txt,
            HypFormatArg::Ctm => HypFormat::Ctm,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Score one hypothesis transcript against one reference
    Score {
        /// Reference transcript (.nlp)
        #[arg(long = "ref")]
        ref_path: PathBuf,
        /// Hypothesis transcript (.txt or .ctm, by extension)
        #[arg(long = "hyp")]
        hyp_path: PathBuf,
        /// Synonym transform file
        #[arg(long = "syn")]
        syn_path: Option<PathBuf>,
        /// Normalization sidecar (JSON) for the reference
        #[arg(long = "norm")]
        norm_path: Option<PathBuf>,
        /// Write a side-by-side alignment here
        #[arg(long = "sbs")]
        sbs_out: Option<PathBuf>,
        /// Write a JSON scoring report here
        #[arg(long = "json")]
        json_out: Option<PathBuf>,
        /// Override hypothesis format detection
        #[arg(long = "hyp-format", value_enum)]
        hyp_format: Option<HypFormatArg>,
    },
    /// Score a whole corpus from a manifest and write a stratified report
    Batch {
        /// Corpus manifest (CSV)
        #[arg(long = "manifest")]
        manifest_path: PathBuf,
        /// Synonym transform file
        #[arg(long = "syn")]
        syn_path: Option<PathBuf>,
        /// Directory of per-file normalization sidecars (<file_id>.json)
        #[arg(long = "norm-dir")]
        norm_dir: Option<PathBuf>,
        /// Write the JSON report here
        #[arg(long = "json")]
        json_out: PathBuf,
        /// Also write CSV stratification tables here
        #[arg(long = "csv")]
        csv_out: Option<PathBuf>,
        /// Comma-separated file ids to exclude from the report
        #[arg(long = "exclude", value_delimiter = ',')]
        exclude: Vec<String>,
        /// Number of files to score concurrently
        #[arg(long = "jobs")]
        jobs: Option<usize>,
    },
    /// Survey references: transform coverage and entity distribution
    Stats {
        /// Glob of reference transcripts
        #[arg(long = "refs")]
        refs_glob: String,
        /// Synonym transform file
        #[arg(long = "syn")]
        syn_path: Option<PathBuf>,
        /// Directory of per-file normalization sidecars
        #[arg(long = "norm-dir")]
        norm_dir: Option<PathBuf>,
        /// Output CSV path
        #[arg(long = "out")]
        stats_out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Score {
            ref_path,
            hyp_path,
            syn_path,
            norm_path,
            sbs_out,
            json_out,
            hyp_format,
        } => {
            let mut config = RunConfig::new(Mode::Score);
            config.ref_path = Some(ref_path);
            config.hyp_path = Some(hyp_path);
            config.syn_path = syn_path;
            config.norm_path = norm_path;
            config.sbs_out = sbs_out;
            config.json_out = json_out;
            config.hyp_format = hyp_format.map(Into::into);
            cmd_score(&config).map(|()| ExitCode::SUCCESS)
        }
        Command::Batch {
            manifest_path,
            syn_path,
            norm_dir,
            json_out,
            csv_out,
            exclude,
            jobs,
        } => {
            let mut config = RunConfig::new(Mode::Batch);
            config.manifest_path = Some(manifest_path);
            config.syn_path = syn_path;
            config.norm_dir = norm_dir;
            config.json_out = Some(json_out);
            config.csv_out = csv_out;
            config.exclude_ids = exclude;
            config.parallelism = jobs
                .unwrap_or_else(|| {
                    std::thread::available_parallelism()
                        .map(|n| n.get())
                        .unwrap_or(1)
                })
                .max(1);
            cmd_batch(&config).map(|failures| {
                if failures.is_empty() {
                    ExitCode::SUCCESS
                } else {
                    for failure in &failures {
                        eprintln!("failed: {}: {}", failure.file_id, failure.error);
                    }
                    eprintln!(
                        "{} file(s) failed; partial report written with \"incomplete\": true",
                        failures.len()
                    );
                    ExitCode::from(2)
                }
            })
        }
        Command::Stats {
            refs_glob,
            syn_path,
            norm_dir,
            stats_out,
        } => {
            let mut config = RunConfig::new(Mode::Stats);
            config.refs_glob = Some(refs_glob);
            config.syn_path = syn_path;
            config.norm_dir = norm_dir;
            config.stats_out = Some(stats_out);
            cmd_stats(&config).map(|_| ExitCode::SUCCESS)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

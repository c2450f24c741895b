use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use simpletag::config::{PipelineConfig, SubsetSelector};
use simpletag::extract::ExtractorKind;
use simpletag::pipeline::{
    cmd_apply, cmd_extract, cmd_model, cmd_report, cmd_run, ApplySummary, ExtractSummary,
    ModelSummary, PipelineError, ReportSummary,
};

#[derive(Parser, Debug)]
#[command(
    name = "simpletag",
    version,
    about = "Derive, apply and audit a compact set of corpus tags"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract complex tags for the extraction subset and write the cache
    Extract,
    /// Fit the topic model over the cache and write the model and tag files
    Model {
        /// Complex-tag cache (default: <out>/complex_tags.jsonl)
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Attach simple tags to every corpus document
    Apply {
        /// Tag file (default: <out>/tags.txt)
        #[arg(long)]
        tags: Option<PathBuf>,
        /// Complex-tag cache to reuse (default: <out>/complex_tags.jsonl if present)
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Summarize an assignment file into a report and histogram
    Report {
        /// Assignment file (default: <out>/assignments.jsonl)
        #[arg(long)]
        assignments: Option<PathBuf>,
    },
    /// Run extract, model, apply and report in order
    Run,
}

/// Values given here override the config file.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// Flat JSON pipeline configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus file (JSON Lines)
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Number of LDA topics (K)
    #[arg(long, global = true)]
    topics: Option<usize>,
    /// Top words taken from each topic (m)
    #[arg(long, global = true)]
    top_words: Option<usize>,
    #[arg(long, global = true)]
    confidence_threshold: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    sweeps: Option<usize>,
    #[arg(long, global = true)]
    burn_in: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// tfidf, graph or remote
    #[arg(long, global = true)]
    extractor: Option<ExtractorKind>,
    /// Keyword service URL for the remote extractor
    #[arg(long, global = true)]
    endpoint: Option<String>,
    /// File of document ids (one per line) to extract from
    #[arg(long, global = true)]
    subset: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn resolve(&self) -> simpletag::Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    c.$field = v;
                }
            )*};
        }
        set!(
            topics,
            top_words,
            confidence_threshold,
            beta,
            sweeps,
            burn_in,
            extractor,
            out
        );
        if self.corpus.is_some() {
            c.corpus = self.corpus.clone();
        }
        if self.alpha.is_some() {
            c.alpha = self.alpha;
        }
        if self.seed.is_some() {
            c.seed = self.seed;
        }
        if self.endpoint.is_some() {
            c.endpoint = self.endpoint.clone();
        }
        if let Some(p) = &self.subset {
            c.subset = Some(SubsetSelector::File(p.clone()));
        }
        Ok(c)
    }
}

fn print_extract(s: &ExtractSummary) {
    println!(
        "extract: {} cache records -> {}",
        s.documents,
        s.cache_path.display()
    );
    for (id, err) in &s.errors {
        eprintln!("warning: {id}: {err}");
    }
}

fn print_model(s: &ModelSummary) {
    println!(
        "model: {} documents fitted, {} excluded, perplexity {:.3}",
        s.fitted_documents, s.excluded_documents, s.perplexity.value
    );
    println!(
        "tags: {} unique (bound K*m = {}, dedupe ratio {:.3}, {} filtered) -> {}",
        s.tag_count,
        s.candidate_count,
        s.dedupe_ratio,
        s.filtered,
        s.tag_path.display()
    );
}

fn print_apply(s: &ApplySummary) {
    println!(
        "apply: {} assignments ({} from cache) -> {}",
        s.assignments.len(),
        s.from_cache,
        s.assignment_path.display()
    );
    for a in s.assignments.iter().filter(|a| a.error.is_some()) {
        eprintln!(
            "warning: {}: {}",
            a.id,
            a.error.as_deref().unwrap_or_default()
        );
    }
}

fn print_report(s: &ReportSummary) {
    let r = &s.report;
    let fmt = |p: Option<f64>| p.map_or("n/a".to_string(), |v| format!("{v:.1}%"));
    println!(
        "report: {} documents, {} tagged, {} untagged",
        r.total_documents,
        r.tagged_documents,
        r.total_documents - r.tagged_documents
    );
    println!(
        "under-tagged {}, sufficiently tagged {}, over-tagged {}",
        fmt(r.class_percentages.under_tagged),
        fmt(r.class_percentages.sufficiently_tagged),
        fmt(r.class_percentages.over_tagged)
    );
    println!(
        "-> {}, {}",
        s.report_path.display(),
        s.histogram_path.display()
    );
}

fn execute(cli: &Cli) -> Result<(), PipelineError> {
    let config = cli
        .overrides
        .resolve()
        .map_err(|e| PipelineError::Precondition(e.to_string()))?;
    match &cli.command {
        Command::Extract => print_extract(&cmd_extract(&config)?),
        Command::Model { cache } => print_model(&cmd_model(&config, cache.as_deref())?),
        Command::Apply { tags, cache } => {
            print_apply(&cmd_apply(&config, tags.as_deref(), cache.as_deref())?)
        }
        Command::Report { assignments } => {
            print_report(&cmd_report(&config, assignments.as_deref())?)
        }
        Command::Run => {
            let s = cmd_run(&config)?;
            print_extract(&s.extract);
            print_model(&s.model);
            print_apply(&s.apply);
            print_report(&s.report);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

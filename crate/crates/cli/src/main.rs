//! `concord` — command-line pipeline for analyzing standardization-meeting
//! contribution documents: summaries, pairwise agreement scores, topic
//! clusters, and draft agendas.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use concord_core::config::RunConfig;
use concord_core::embedding::Backend;
use concord_core::pipeline::{self, PipelineError};
use concord_core::report::{self, AnalysisBundle, EvalReport, ReportError};

const EXIT_INPUT: u8 = 1;
const EXIT_BACKEND: u8 = 2;

#[derive(Parser)]
#[command(name = "concord", version, about = "Contribution analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Baseline,
    Remote,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Baseline => Backend::Baseline,
            BackendArg::Remote => Backend::Remote,
        }
    }
}

#[derive(Args, Default)]
struct ConfigFlags {
    /// JSON config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Heading weight in the combined similarity.
    #[arg(long = "weights")]
    weights: Option<f64>,
    /// Number of topic clusters.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    perplexity: Option<f64>,
    /// Embedding dimension.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "backend-embed")]
    backend_embed: Option<BackendArg>,
    #[arg(long = "backend-summarize")]
    backend_summarize: Option<BackendArg>,
    /// Base URL of the remote model service (both tasks).
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long = "tau-hi")]
    tau_hi: Option<f64>,
    #[arg(long = "tau-lo")]
    tau_lo: Option<f64>,
    #[arg(long = "top-k")]
    top_k: Option<usize>,
    /// Summary length cap in sentences.
    #[arg(long = "max-sentences")]
    max_sentences: Option<usize>,
    /// Minimum summary-to-original sentence ratio.
    #[arg(long = "min-ratio")]
    min_ratio: Option<f64>,
    /// Extra stopword file, one term per line.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Worker threads (0 = all cores). Never changes results.
    #[arg(long)]
    jobs: Option<usize>,
}

impl ConfigFlags {
    fn build(&self) -> Result<RunConfig, String> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| format!("bad config {}: {e}", path.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(w) = self.weights {
            config.heading_weight = w;
        }
        if let Some(k) = self.k {
            config.k = k;
        }
        if let Some(p) = self.perplexity {
            config.perplexity = p;
        }
        if let Some(d) = self.dim {
            config.dim = d;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(b) = self.backend_embed {
            config.backend_embed = b.into();
        }
        if let Some(b) = self.backend_summarize {
            config.backend_summarize = b.into();
        }
        if let Some(endpoint) = &self.endpoint {
            config.embed_endpoint = Some(endpoint.clone());
            config.summarize_endpoint = Some(endpoint.clone());
        }
        if let Some(t) = self.tau_hi {
            config.tau_hi = t;
        }
        if let Some(t) = self.tau_lo {
            config.tau_lo = t;
        }
        if let Some(t) = self.top_k {
            config.top_k = t;
        }
        if let Some(m) = self.max_sentences {
            config.max_sentences = m;
        }
        if let Some(r) = self.min_ratio {
            config.min_ratio = r;
        }
        if let Some(s) = &self.stopwords {
            config.stopword_file = Some(s.clone());
        }
        if let Some(j) = self.jobs {
            config.jobs = j;
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis pipeline over a corpus directory or manifest.
    Analyze {
        /// Input directory or corpus manifest (JSON).
        input: PathBuf,
        /// Output directory for agenda, charts and the bundle.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Print the effective configuration and exit.
        #[arg(long = "print-config")]
        print_config: bool,
        #[command(flatten)]
        flags: ConfigFlags,
    },
    /// Summarize one document, section by section.
    Summarize {
        file: PathBuf,
        #[command(flatten)]
        flags: ConfigFlags,
    },
    /// Correlate algorithm pair scores against human ratings.
    Eval {
        /// CSV with pair_id and score (or combined) columns.
        pairs_file: PathBuf,
        /// CSV with pair_id,score; NA marks missing ratings.
        human_file: PathBuf,
    },
    /// Re-emit agenda and chart files from an existing bundle.json.
    Report {
        bundle: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

type CmdResult = Result<(), (u8, String)>;

fn input_err(message: impl Into<String>) -> (u8, String) {
    (EXIT_INPUT, message.into())
}

fn map_pipeline(e: PipelineError) -> (u8, String) {
    match e {
        PipelineError::Input(m) => (EXIT_INPUT, m),
        PipelineError::Backend(e) => (EXIT_BACKEND, e.to_string()),
    }
}

fn run() -> CmdResult {
    match Cli::parse().command {
        Command::Analyze {
            input,
            out,
            print_config,
            flags,
        } => cmd_analyze(input, out, print_config, &flags),
        Command::Summarize { file, flags } => cmd_summarize(&file, &flags),
        Command::Eval {
            pairs_file,
            human_file,
        } => cmd_eval(&pairs_file, &human_file),
        Command::Report { bundle, out } => cmd_report(&bundle, &out),
    }
}

fn cmd_analyze(input: PathBuf, out: PathBuf, print_config: bool, flags: &ConfigFlags) -> CmdResult {
    let mut config = flags.build().map_err(input_err)?;
    config.input = input;
    config.out_dir = out;
    config.validate().map_err(input_err)?;

    if print_config {
        let json = serde_json::to_string_pretty(&config)
            .map_err(|e| input_err(format!("cannot serialize config: {e}")))?;
        emit_stdout(&format!("{json}\n"));
        return Ok(());
    }

    eprintln!("analyzing {}", config.input.display());
    let bundle = pipeline::analyze(&config).map_err(map_pipeline)?;
    for warning in &bundle.warnings {
        eprintln!("warning: {warning}");
    }
    let files = report::emit_chart_data(&bundle, &config.out_dir)
        .map_err(|e| input_err(e.to_string()))?;
    for file in &files {
        eprintln!("wrote {}", file.display());
    }
    Ok(())
}

/// Write to stdout, ignoring a closed pipe (e.g. `concord ... | head`).
fn emit_stdout(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn cmd_summarize(file: &Path, flags: &ConfigFlags) -> CmdResult {
    use std::fmt::Write;
    let config = flags.build().map_err(input_err)?;
    let records = pipeline::summarize_file(file, &config).map_err(map_pipeline)?;
    let mut out = String::new();
    for record in records {
        let heading = if record.heading.is_empty() {
            "(no heading)"
        } else {
            record.heading.as_str()
        };
        let _ = writeln!(out, "## {heading} [{}]", record.section_ref);
        let _ = writeln!(out, "{}", record.summary_text);
        let _ = writeln!(
            out,
            "Proposals: {}, Observations: {}, Scenarios: {} ({} of {} sentences)\n",
            record.markers.proposals,
            record.markers.observations,
            record.markers.scenarios,
            record.sentence_count_summary,
            record.sentence_count_original
        );
    }
    emit_stdout(&out);
    Ok(())
}

fn cmd_eval(pairs_file: &Path, human_file: &Path) -> CmdResult {
    let report = evaluate_files(pairs_file, human_file).map_err(|e| input_err(e.to_string()))?;
    print_eval(&report);
    Ok(())
}

fn evaluate_files(pairs_file: &Path, human_file: &Path) -> Result<EvalReport, ReportError> {
    let algorithm_rows = report::read_score_csv(pairs_file)?;
    let mut algorithm = Vec::with_capacity(algorithm_rows.len());
    for (id, score) in algorithm_rows {
        let score = score.ok_or_else(|| ReportError::BadCsv {
            path: pairs_file.to_path_buf(),
            message: format!("algorithm score for {id} is NA"),
        })?;
        algorithm.push((id, score));
    }
    let human = report::read_score_csv(human_file)?;
    report::evaluation_report(&algorithm, &human)
}

fn print_eval(report: &EvalReport) {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "r = {:.2} (n_used = {}, n_dropped = {})\n",
        report.r, report.n_used, report.n_dropped
    );
    let _ = writeln!(out, "{:<12} {:>10} {:>10}", "pair_id", "algorithm", "human");
    for row in &report.rows {
        let human = row
            .human
            .map(|h| h.to_string())
            .unwrap_or_else(|| "NA".to_string());
        let _ = writeln!(out, "{:<12} {:>10} {:>10}", row.pair_id, row.algorithm, human);
    }
    emit_stdout(&out);
}

fn cmd_report(bundle_path: &Path, out: &Path) -> CmdResult {
    let text = std::fs::read_to_string(bundle_path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", bundle_path.display())))?;
    let bundle: AnalysisBundle = serde_json::from_str(&text)
        .map_err(|e| input_err(format!("bad bundle {}: {e}", bundle_path.display())))?;
    bundle.validate_references().map_err(input_err)?;
    let files =
        report::emit_chart_data(&bundle, out).map_err(|e| input_err(e.to_string()))?;
    for file in &files {
        eprintln!("wrote {}", file.display());
    }
    Ok(())
}

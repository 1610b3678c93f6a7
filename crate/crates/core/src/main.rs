use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use capdiv::corpus::{load_dataset, Dataset, InputFormat, LoadReport};
use capdiv::lexstats::{per_source_stats, DEFAULT_WINDOW};
use capdiv::pipeline::{
    generate_synthetic, report, run, score, variance_and_test, write_dataset_jsonl, PipelineError, RunConfig,
    ScorerSpec, SyntheticSpec,
};
use capdiv::scalar::LogBase;
use capdiv::scorers::{export_interchange, import_external_surprisals, validate_interchange_str, ScorerError};
use capdiv::stats::VarianceKind;

#[derive(Parser)]
#[command(name = "capdiv", version, about = "Caption-set diversity via surprisal variance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Caption file (JSONL or CSV).
    #[arg(long)]
    dataset: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<InputFormat>,
    /// Require exactly five human and five model captions per image.
    #[arg(long)]
    strict: bool,
}

impl DataArgs {
    fn format(&self) -> InputFormat {
        self.format.unwrap_or_else(|| InputFormat::from_path(&self.dataset))
    }

    fn load(&self) -> Result<(Dataset, LoadReport), PipelineError> {
        let (dataset, report) = load_dataset(&self.dataset, self.format(), self.strict)?;
        log::info!("{}: {report}", self.dataset.display());
        Ok((dataset, report))
    }
}

#[derive(Args, Clone)]
struct ScoresArgs {
    /// Interchange JSONL with per-token surprisals.
    #[arg(long)]
    scores: PathBuf,
    /// Within-image variance denominator.
    #[arg(long, default_value = "sample", value_parser = parse_kind)]
    variance: VarianceKind,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a dataset, then print a summary.
    LoadCheck {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Per-source lexical statistics as TSV.
    Lexstats {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score every caption and write interchange JSONL.
    Score {
        #[command(flatten)]
        data: DataArgs,
        /// kn:ORDER[:DISCOUNT[:FLOOR]] or ext:PATH:ID
        #[arg(long)]
        scorer: String,
        #[arg(long, default_value = "2")]
        log_base: LogBase,
        /// Scoring threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Directory for reusable count tables.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-image, per-group variance of caption mean surprisal.
    Variance {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        scores: ScoresArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired human-versus-model test on per-image variances.
    Ttest {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        scores: ScoresArgs,
        #[arg(long, default_value = "default")]
        data_tag: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline: lexical statistics, scoring, variance and tests.
    Run {
        #[command(flatten)]
        data: DataArgs,
        /// Repeatable: kn:ORDER[:DISCOUNT[:FLOOR]] or ext:PATH:ID
        #[arg(long, required = true)]
        scorer: Vec<String>,
        #[arg(long, default_value = "2")]
        log_base: LogBase,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "default")]
        data_tag: String,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        #[arg(long, default_value = "sample", value_parser = parse_kind)]
        variance: VarianceKind,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Generate a synthetic dataset with a controlled diversity gap.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        images: usize,
        #[arg(long, default_value_t = 5)]
        captions: usize,
        #[arg(long, default_value_t = 20)]
        templates: usize,
        #[arg(long, default_value_t = 1000)]
        vocab: usize,
        #[arg(long, default_value_t = 0.3)]
        human_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        model_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check an interchange file without a dataset.
    Validate {
        #[arg(long)]
        scores: PathBuf,
    },
}

fn parse_kind(s: &str) -> Result<VarianceKind, String> {
    match s {
        "sample" => Ok(VarianceKind::Sample),
        "population" => Ok(VarianceKind::Population),
        other => Err(format!("expected sample or population, got {other:?}")),
    }
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_scorer(s: &str) -> Result<ScorerSpec, PipelineError> {
    s.parse()
}

fn execute(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::LoadCheck { data } => {
            let (dataset, report) = data.load()?;
            let counts = dataset.counts();
            println!("{report}");
            println!(
                "images={} captions={} human={} model={} fingerprint={}",
                dataset.n_images(),
                dataset.n_captions(),
                counts.human,
                counts.model,
                dataset.fingerprint()
            );
        }
        Command::Lexstats { data, window, out } => {
            let (dataset, _) = data.load()?;
            let rows = per_source_stats(&dataset, window)?;
            report::write_lexstats(&rows, &dataset, output(out.as_deref())?)?;
        }
        Command::Score { data, scorer, log_base, threads, cache, out } => {
            let spec = parse_scorer(&scorer)?;
            let (dataset, _) = data.load()?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;
            let scored = pool.install(|| score(&dataset, &spec, log_base, cache.as_deref()))?;
            export_interchange(&scored, output(out.as_deref())?)?;
        }
        Command::Variance { data, scores, out } => {
            let (dataset, _) = data.load()?;
            let scored = import_external_surprisals(&scores.scores, &dataset)?;
            let (variances, _) = variance_and_test(&scored, &dataset, scores.variance)?;
            report::write_group_variance(&variances, output(out.as_deref())?)?;
        }
        Command::Ttest { data, scores, data_tag, out } => {
            let (dataset, _) = data.load()?;
            let scored = import_external_surprisals(&scores.scores, &dataset)?;
            let (_, test) = variance_and_test(&scored, &dataset, scores.variance)?;
            report::write_variance_test(&[(scored.scorer_id.as_str(), &test)], &data_tag, output(out.as_deref())?)?;
        }
        Command::Run { data, scorer, log_base, out, data_tag, threads, window, variance, cache } => {
            let scorers = scorer.iter().map(|s| parse_scorer(s)).collect::<Result<Vec<_>, _>>()?;
            let config = RunConfig {
                format: data.format(),
                dataset: data.dataset,
                strict: data.strict,
                scorers,
                out_dir: out,
                log_base,
                data_tag,
                threads,
                window,
                variance_kind: variance,
                cache_dir: cache,
            };
            let summary = run(&config)?;
            for s in &summary.scorers {
                println!(
                    "{}\tt={:.2}\tdf={}\tp={:.3e}\tdz={:.2}",
                    s.scorer_id, s.test.t_value, s.test.df, s.test.p_two_sided, s.test.cohens_dz
                );
            }
        }
        Command::Synth { out, images, captions, templates, vocab, human_rate, model_rate, seed } => {
            let spec = SyntheticSpec {
                n_images: images,
                captions_per_group: captions,
                n_templates: templates,
                vocab_size: vocab,
                human_rate,
                model_rate,
                seed,
                ..SyntheticSpec::default()
            };
            let dataset = generate_synthetic(&spec)?;
            write_dataset_jsonl(&dataset, BufWriter::new(File::create(&out)?))?;
        }
        Command::Validate { scores } => {
            let content = std::fs::read_to_string(&scores).map_err(ScorerError::from)?;
            println!("{}", validate_interchange_str(&content)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

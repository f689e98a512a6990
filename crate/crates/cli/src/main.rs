//! `omrag` — command-line driver for the ontology-guided retrieval-augmented
//! generation pipeline.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use omrag_core::pipeline::{Pipeline, PipelineConfig, Stage, CONFIG_ENV_VAR};

#[derive(Parser)]
#[command(
    name = "omrag",
    version,
    about = "Ontology-guided retrieval-augmented generation pipeline for math benchmarks",
    long_about = None
)]
struct Cli {
    /// TOML config file (default: $OMRAG_CONFIG if set, else built-in defaults).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Force fully offline execution (every endpoint must be a mock profile).
    #[arg(long, global = true)]
    offline: bool,

    /// Enable/disable reuse of up-to-date stage outputs (default from config).
    #[arg(long, global = true, value_name = "BOOL")]
    resume: Option<bool>,

    /// Output directory override.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse content dictionaries into the symbol knowledge base.
    BuildKb,
    /// Convert symbolic notation to LaTeX (patterns + corrections; model fallback when online).
    Normalize,
    /// Extract concept keywords for each benchmark problem.
    ExtractConcepts,
    /// Embed symbol description cards and problem concept sets.
    Embed,
    /// Hybrid BM25 + dense retrieval with reciprocal-rank fusion.
    Retrieve,
    /// Cross-encoder scoring of the retrieved candidates.
    Rerank,
    /// Adaptive per-problem symbol selection.
    Select,
    /// Prompted inference over the condition x mode x threshold cross product.
    Infer,
    /// Aggregate inference runs into metric and coverage reports.
    Evaluate,
    /// Run the whole pipeline, or a comma-separated subset of stages.
    RunAll {
        /// Stage subset, e.g. `infer,evaluate`.
        #[arg(long, value_delimiter = ',', value_name = "STAGES")]
        stages: Vec<String>,
    },
    /// Re-run inference and evaluation over existing retrieval artifacts.
    Ablate,
    /// Write the bundled synthetic corpus, benchmark and retrieval assets.
    GenFixtures {
        /// Target directory for the generated assets.
        #[arg(long, default_value = "assets", value_name = "DIR")]
        dir: PathBuf,
        /// Overwrite existing generated assets.
        #[arg(long)]
        force: bool,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();

    if let Command::GenFixtures { ref dir, force } = cli.command {
        return gen_fixtures(dir, force);
    }

    let (mut cfg, source) = PipelineConfig::resolve(cli.config.as_deref())?;
    match &source {
        Some(path) => log::info!("config: {}", path.display()),
        None => log::info!("config: built-in defaults (no --config, ${CONFIG_ENV_VAR} unset)"),
    }
    if cli.offline {
        cfg.offline = true;
    }
    if let Some(resume) = cli.resume {
        cfg.resume = resume;
    }
    if let Some(dir) = cli.out_dir {
        cfg.paths.out_dir = dir;
    }

    let mut pipeline = Pipeline::new(cfg)?;
    match cli.command {
        Command::BuildKb => pipeline.run(&[Stage::BuildKb])?,
        Command::Normalize => pipeline.run(&[Stage::Normalize])?,
        Command::ExtractConcepts => pipeline.run(&[Stage::ExtractConcepts])?,
        Command::Embed => pipeline.run(&[Stage::Embed])?,
        Command::Retrieve => pipeline.run(&[Stage::Retrieve])?,
        Command::Rerank => pipeline.run(&[Stage::Rerank])?,
        Command::Select => pipeline.run(&[Stage::Select])?,
        Command::Infer => pipeline.run(&[Stage::Infer])?,
        Command::Evaluate => pipeline.run(&[Stage::Evaluate])?,
        Command::RunAll { stages } => {
            if stages.is_empty() {
                pipeline.run_all()?;
            } else {
                let mut parsed = Vec::new();
                for name in &stages {
                    let stage = Stage::parse(name.trim()).ok_or_else(|| {
                        anyhow::anyhow!(
                            "unknown stage `{name}` (expected one of: {})",
                            Stage::ORDER.map(|s| s.name()).join(", ")
                        )
                    })?;
                    parsed.push(stage);
                }
                pipeline.run(&parsed)?;
            }
        }
        Command::Ablate => pipeline.ablate()?,
        Command::GenFixtures { .. } => unreachable!("handled above"),
    }
    Ok(())
}

/// Regenerate the checked-in synthetic assets: the content-dictionary
/// corpus, filter/correction/stopword lists, the released benchmark files,
/// and the answer-equivalence fixture.
fn gen_fixtures(dir: &Path, force: bool) -> Result<()> {
    use omrag_core::{fixture, util};

    let cds_dir = dir.join("cds");
    if cds_dir.exists() {
        if !force {
            bail!(
                "{} already exists; use --force to regenerate the corpus",
                cds_dir.display()
            );
        }
        std::fs::remove_dir_all(&cds_dir)
            .with_context(|| format!("removing {}", cds_dir.display()))?;
    }
    let stats = fixture::write_corpus(&cds_dir)
        .with_context(|| format!("writing corpus under {}", cds_dir.display()))?;
    println!(
        "corpus: {} dictionary files, {} signature files, {} symbols",
        stats.cd_files, stats.sts_files, stats.symbols_total
    );

    util::write_json(&dir.join("filters.json"), &fixture::corpus_filters())?;
    util::write_json(
        &dir.join("corrections.json"),
        &fixture::corpus_corrections(&stats),
    )?;
    util::write_json(&dir.join("stopwords.json"), &fixture::stopword_list())?;

    let released = dir.join("released");
    std::fs::create_dir_all(&released)
        .with_context(|| format!("creating {}", released.display()))?;
    let problems = fixture::generate_benchmark();
    fixture::write_benchmark_jsonl(&problems, &released.join("math500.jsonl"))?;
    let subset = fixture::benchmark_subset(&problems);
    fixture::write_benchmark_jsonl(&subset, &released.join("math20.jsonl"))?;
    println!(
        "benchmark: {} problems (+{}-problem subset)",
        problems.len(),
        subset.len()
    );

    let fp = util::fingerprint_dir(&cds_dir)?;
    std::fs::write(released.join("corpus.fingerprint"), format!("{fp}\n"))
        .with_context(|| "writing corpus fingerprint")?;

    let fixtures_dir = dir.join("fixtures");
    std::fs::create_dir_all(&fixtures_dir)
        .with_context(|| format!("creating {}", fixtures_dir.display()))?;
    util::write_json(
        &fixtures_dir.join("answer_fixtures.json"),
        &fixture::answer_pairs(),
    )?;

    println!("assets written under {}", dir.display());
    Ok(())
}

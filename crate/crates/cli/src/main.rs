//! `compreader` command-line pipeline.

mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use compreader::corpus::{identify_events, load_corpus, Corpus, DocType};
use compreader::embeddings::EmbeddingProvider;
use compreader::encoder::DocumentVectors;
use compreader::evaluation::{
    ablation_configurations, ablation_filter, classify_stance, export_legislator_embeddings,
    grade_predict, load_grades, opinion_descriptors, project_embeddings, projection_text,
    stance_embedding, tokenize, GradeExample, GradeRecord, GradeSource, StanceSource,
};
use compreader::graphgen::{
    adjacency_text, build_graph, graph_dump, resolve_query, trim_graph, NodeKind, QueryTriplet,
    TrimConfig,
};
use compreader::learning::{read_checkpoint, train, Model, Task};
use compreader::Error;
use log::{info, warn};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use config::{existing, output_root, overlay, provider, PipelineConfig};

#[derive(Parser)]
#[command(name = "compreader", version, about = "Compositional reader pipeline")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML pipeline configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus directory or manifest file.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Precomputed embedding store; selects the store provider.
    #[arg(long, global = true)]
    embeddings: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    issue: Option<String>,
    /// Entity ids, comma separated. Authors for graph queries and
    /// descriptors, the referenced entity for grade evaluation.
    #[arg(long, global = true, value_delimiter = ',')]
    entity: Vec<String>,
    /// Event indices of `--issue`, comma separated; all when omitted.
    #[arg(long, global = true, value_delimiter = ',')]
    event: Vec<u32>,
    /// Document types to drop before graph building, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    exclude_doc_types: Vec<DocType>,
    /// Output root; overrides the environment and the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a corpus, printing summary counts.
    ValidateCorpus,
    /// Segment daily news counts into events.
    DetectEvents {
        #[arg(long)]
        skip_days: Option<u32>,
        /// `issue<TAB>date<TAB>count` lines instead of the corpus news counts.
        #[arg(long)]
        counts: Option<PathBuf>,
    },
    /// Resolve a query and write the discourse graph.
    BuildGraph {
        #[command(flatten)]
        trim: TrimArgs,
    },
    /// Train encoder, composer and heads.
    Train(TrainArgs),
    /// Zero-shot grade paraphrase for every politician with a letter grade.
    EvaluateParaphrase {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        grades: PathBuf,
        #[arg(long)]
        positive: String,
        #[arg(long)]
        negative: String,
    },
    /// Cross-validated grade prediction from stance embeddings.
    EvaluateGrades {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        grades: PathBuf,
        #[arg(long, default_value = "nra")]
        source: GradeSource,
    },
    /// Rank the adjectives an author uses on an issue.
    Descriptors {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 5)]
        top_k: usize,
    },
    /// Principal-component projection of per-politician issue embeddings.
    Project {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 2)]
        dims: usize,
    },
    /// Write composed author embeddings in the embedding-store format.
    ExportEmbeddings {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Grade prediction under document-type ablations.
    Ablate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        grades: PathBuf,
        #[arg(long, default_value = "nra")]
        source: GradeSource,
    },
}

#[derive(Args)]
struct TrimArgs {
    #[arg(long)]
    keep_fraction: Option<f64>,
    #[arg(long)]
    max_nodes: Option<usize>,
}

#[derive(Args)]
struct ModelArgs {
    /// Trained checkpoint; without one the mean-pooled baseline is used.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    trim: TrimArgs,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    momentum: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    epochs_per_query_batch: Option<usize>,
    #[arg(long)]
    politicians_per_batch: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    validation_fraction: Option<f64>,
    /// `authorship`, `ref_entity`, comma separated.
    #[arg(long, value_delimiter = ',')]
    tasks: Vec<String>,
    #[arg(long)]
    negative_ratio: Option<f64>,
    #[arg(long)]
    max_batches: Option<usize>,
    #[arg(long)]
    out_sample: Option<bool>,
}

struct Pipeline {
    global: Global,
    config: PipelineConfig,
    out: PathBuf,
}

impl Pipeline {
    fn corpus(&self) -> Result<Corpus> {
        let path = existing(
            overlay("corpus", self.global.corpus.clone(), self.config.corpus.clone()),
            "corpus",
        )?;
        Ok(load_corpus(&path)?)
    }

    fn provider(&self, dim: usize) -> Result<Box<dyn EmbeddingProvider>> {
        provider(
            self.config.provider,
            overlay("embeddings", self.global.embeddings.clone(), self.config.embeddings.clone()),
            dim,
        )
    }

    fn seed(&self) -> Option<u64> {
        let config_seed = self
            .config
            .seed
            .or(self.config.train_seed_given.then_some(self.config.train.seed));
        overlay("seed", self.global.seed, config_seed)
    }

    fn issue(&self) -> Result<&str> {
        self.global
            .issue
            .as_deref()
            .ok_or_else(|| anyhow!("--issue is required"))
    }

    fn exclude(&self) -> BTreeSet<DocType> {
        self.global.exclude_doc_types.iter().copied().collect()
    }

    fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("creating {}", self.out.display()))?;
        let path = self.out.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        info!("wrote {}", path.display());
        Ok(path)
    }

    fn trim_config(&self, args: &TrimArgs) -> Option<TrimConfig> {
        let base = self.config.trim.clone();
        if args.keep_fraction.is_none() && args.max_nodes.is_none() {
            return base;
        }
        let mut t = base.clone().unwrap_or_default();
        t.keep_fraction =
            overlay("keep-fraction", args.keep_fraction, base.as_ref().map(|b| b.keep_fraction))
                .unwrap_or(t.keep_fraction);
        if args.max_nodes.is_some() {
            t.max_nodes = overlay("max-nodes", args.max_nodes, base.and_then(|b| b.max_nodes));
        }
        Some(t)
    }

    /// Model from `--checkpoint`, its provider and the stance source.
    fn model(&self, args: &ModelArgs) -> Result<(Option<Model>, Box<dyn EmbeddingProvider>)> {
        match &args.checkpoint {
            Some(path) => {
                let (model, _) = read_checkpoint(path)
                    .with_context(|| format!("reading checkpoint {}", path.display()))?;
                let p = self.provider(model.config.d_model)?;
                Ok((Some(model), p))
            }
            None => {
                info!("no checkpoint given; using mean-pooled sentence embeddings");
                Ok((None, self.provider(self.config.model.d_model)?))
            }
        }
    }
}

fn source(model: &Option<Model>) -> StanceSource<'_> {
    match model {
        Some(m) => StanceSource::Model(m),
        None => StanceSource::Baseline,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = PipelineConfig::load(cli.global.config.as_deref())?;
    let out = output_root(cli.global.out.clone(), config.out.clone());
    let ctx = Pipeline {
        global: cli.global,
        config,
        out,
    };
    match cli.command {
        Command::ValidateCorpus => validate_corpus(&ctx),
        Command::DetectEvents { skip_days, counts } => detect_events(&ctx, skip_days, counts),
        Command::BuildGraph { trim } => build_graph_cmd(&ctx, &trim),
        Command::Train(args) => train_cmd(&ctx, &args),
        Command::EvaluateParaphrase {
            model,
            grades,
            positive,
            negative,
        } => evaluate_paraphrase(&ctx, &model, &grades, &positive, &negative),
        Command::EvaluateGrades {
            model,
            grades,
            source,
        } => {
            let corpus = ctx.corpus()?;
            let (m, p) = ctx.model(&model)?;
            let records = load_grades(&grades)?;
            let (n, result) =
                grade_run(&ctx, &corpus, &m, p.as_ref(), &records, source, &ctx.exclude())?;
            info!("{n} labelled politicians");
            let json = serde_json::to_string_pretty(&result)?;
            println!("{json}");
            ctx.write("grade_prediction.json", json + "\n")?;
            Ok(())
        }
        Command::Descriptors { model, top_k } => {
            let corpus = ctx.corpus()?;
            let (m, p) = ctx.model(&model)?;
            let [author] = ctx.global.entity.as_slice() else {
                bail!("descriptors needs exactly one --entity (the author)");
            };
            let ranked = opinion_descriptors(source(&m), &corpus, p.as_ref(), author, ctx.issue()?, top_k)?;
            let mut text = String::from("rank\tword\tscore\toccurrences\n");
            for (i, d) in ranked.iter().enumerate() {
                writeln!(text, "{}\t{}\t{:.10}\t{}", i + 1, d.word, d.score, d.occurrences)?;
            }
            print!("{text}");
            ctx.write("descriptors.tsv", text)?;
            Ok(())
        }
        Command::Project { model, dims } => project(&ctx, &model, dims),
        Command::ExportEmbeddings { model } => {
            let corpus = ctx.corpus()?;
            let (m, p) = ctx.model(&model)?;
            let m = m.ok_or_else(|| anyhow!("export-embeddings needs --checkpoint"))?;
            let politicians: Vec<String> = if ctx.global.entity.is_empty() {
                corpus.authors().into_iter().map(String::from).collect()
            } else {
                ctx.global.entity.clone()
            };
            fs::create_dir_all(&ctx.out)?;
            let path = ctx.out.join("legislators.emb");
            let report = export_legislator_embeddings(&m, &corpus, p.as_ref(), &politicians, &path)?;
            println!("written\t{}\nskipped\t{}", report.written.len(), report.skipped.len());
            Ok(())
        }
        Command::Ablate {
            model,
            grades,
            source,
        } => ablate(&ctx, &model, &grades, source),
    }
}

fn validate_corpus(ctx: &Pipeline) -> Result<()> {
    let corpus = ctx.corpus()?;
    let summary = corpus.summary().to_string();
    print!("{summary}");
    ctx.write("corpus_summary.tsv", summary)?;
    Ok(())
}

fn read_counts(path: &Path) -> Result<BTreeMap<String, BTreeMap<NaiveDate, i64>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out: BTreeMap<String, BTreeMap<NaiveDate, i64>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [issue, date, count] = fields.as_slice() else {
            bail!("{}:{}: expected issue, date, count", path.display(), i + 1);
        };
        let date: NaiveDate = date
            .trim()
            .parse()
            .with_context(|| format!("{}:{}: bad date", path.display(), i + 1))?;
        let count: i64 = count
            .trim()
            .parse()
            .with_context(|| format!("{}:{}: bad count", path.display(), i + 1))?;
        *out.entry(issue.trim().to_string()).or_default().entry(date).or_insert(0) += count;
    }
    Ok(out)
}

fn detect_events(ctx: &Pipeline, skip_days: Option<u32>, counts: Option<PathBuf>) -> Result<()> {
    let skip = overlay("skip-days", skip_days, ctx.config.skip_days).unwrap_or(7);
    let daily = match counts {
        Some(path) => read_counts(&path)?,
        None => ctx.corpus()?.news_daily_counts(),
    };
    let events = identify_events(&daily, skip)?;
    let mut text = String::from("issue\tindex\tstart\tend\n");
    for e in &events {
        writeln!(text, "{}\t{}\t{}\t{}", e.issue_id, e.index, e.start_date, e.end_date)?;
    }
    print!("{text}");
    ctx.write("events.tsv", text)?;
    Ok(())
}

fn build_graph_cmd(ctx: &Pipeline, trim: &TrimArgs) -> Result<()> {
    let corpus = ctx.corpus()?;
    let issue = ctx.issue()?.to_string();
    if ctx.global.entity.is_empty() {
        bail!("build-graph needs at least one --entity");
    }
    let events = if ctx.global.event.is_empty() {
        corpus.events(&issue).iter().map(|e| e.index).collect()
    } else {
        ctx.global.event.clone()
    };
    let q = QueryTriplet {
        entity_ids: ctx.global.entity.clone(),
        issue_ids: vec![issue.clone()],
        events_per_issue: BTreeMap::from([(issue.clone(), events)]),
    };
    let result = ablation_filter(&resolve_query(&corpus, &q)?, &ctx.exclude())?;
    let mut graph = build_graph(&result)?;
    if let Some(cfg) = ctx.trim_config(trim) {
        let seed = ctx
            .seed()
            .ok_or_else(|| anyhow!("trimming is randomised; pass --seed or set seed in the config"))?;
        let target = ctx.global.event.first().and_then(|&index| {
            graph.find(&NodeKind::Event {
                issue: issue.clone(),
                index,
            })
        });
        let (trimmed, report) =
            trim_graph(&graph, target, &[], &cfg, &mut ChaCha8Rng::seed_from_u64(seed))?;
        info!(
            "trimmed {} -> {} nodes ({} of {} eligible kept)",
            report.nodes_before, report.nodes_after, report.retained_eligible, report.eligible
        );
        graph = trimmed;
    }
    println!("nodes\t{}\nedges\t{}", graph.len(), graph.edges().len());
    ctx.write("graph.tsv", graph_dump(&graph))?;
    ctx.write("adjacency.txt", adjacency_text(&graph))?;
    Ok(())
}

fn train_cmd(ctx: &Pipeline, args: &TrainArgs) -> Result<()> {
    let seed = ctx
        .seed()
        .ok_or_else(|| anyhow!("training is randomised; pass --seed or set seed in the config"))?;
    let mut cfg = ctx.config.train.clone();
    cfg.seed = seed;
    macro_rules! set {
        ($flag:literal, $field:ident) => {
            if let Some(v) = overlay($flag, args.$field, Some(cfg.$field)) {
                cfg.$field = v;
            }
        };
    }
    set!("learning-rate", learning_rate);
    set!("momentum", momentum);
    set!("batch-size", batch_size);
    set!("epochs-per-query-batch", epochs_per_query_batch);
    set!("politicians-per-batch", politicians_per_batch);
    set!("train-fraction", train_fraction);
    set!("validation-fraction", validation_fraction);
    set!("out-sample", out_sample);
    if args.max_batches.is_some() {
        cfg.max_batches = overlay("max-batches", args.max_batches, cfg.max_batches);
    }
    if let Some(r) = overlay("negative-ratio", args.negative_ratio, Some(cfg.samples.negative_ratio)) {
        cfg.samples.negative_ratio = r;
    }
    if !args.tasks.is_empty() {
        cfg.tasks = args
            .tasks
            .iter()
            .map(|t| {
                Task::ALL
                    .into_iter()
                    .find(|k| k.as_str() == t)
                    .ok_or_else(|| anyhow!("unknown task {t:?}"))
            })
            .collect::<Result<_>>()?;
    }
    if trim_given(&args.trim) || ctx.config.trim.is_some() {
        cfg.samples.trim = ctx.trim_config(&args.trim);
    }
    let corpus = ctx.corpus()?;
    let provider = ctx.provider(ctx.config.model.d_model)?;
    let outcome = train(&corpus, provider.as_ref(), ctx.config.model, &cfg)?;
    let log = outcome.metrics_log();
    ctx.write("metrics.tsv", &log)?;
    ctx.write("checkpoint.bin", &outcome.checkpoint)?;
    let mut splits = String::from("batch\ttask\ttrain\tvalidation\ttest\n");
    for s in &outcome.split_sizes {
        writeln!(
            splits,
            "{}\t{}\t{}\t{}\t{}",
            s.batch,
            s.task.as_str(),
            s.train,
            s.validation,
            s.test
        )?;
    }
    ctx.write("splits.tsv", splits)?;
    print!("{log}");
    Ok(())
}

fn trim_given(t: &TrimArgs) -> bool {
    t.keep_fraction.is_some() || t.max_nodes.is_some()
}

fn ref_entity(ctx: &Pipeline) -> Result<Option<&str>> {
    match ctx.global.entity.as_slice() {
        [] => Ok(None),
        [e] => Ok(Some(e.as_str())),
        _ => bail!("give at most one --entity (the referenced entity)"),
    }
}

/// Skips politicians without discourse on the issue; other errors abort.
fn skip_missing<T>(r: compreader::Result<T>, politician: &str) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Evaluation(m)) => {
            warn!("skipping {politician}: {m}");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn evaluate_paraphrase(
    ctx: &Pipeline,
    model: &ModelArgs,
    grades: &Path,
    positive: &str,
    negative: &str,
) -> Result<()> {
    let corpus = ctx.corpus()?;
    let (m, p) = ctx.model(model)?;
    let issue = ctx.issue()?;
    let entity = ref_entity(ctx)?;
    let pos = p.embed_sentence(&tokenize(positive))?;
    let neg = p.embed_sentence(&tokenize(negative))?;
    let mut vectors = DocumentVectors::new(p.as_ref());
    let mut records: Vec<&GradeRecord> = Vec::new();
    let all = load_grades(grades)?;
    for r in &all {
        if r.paraphrase_positive().is_ok() {
            records.push(r);
        }
    }
    records.sort_by(|a, b| a.politician.cmp(&b.politician));
    let mut text = String::from("politician\tgrade_positive\tpredicted_positive\ttie\tcos_positive\tcos_negative\n");
    let (mut correct, mut total) = (0usize, 0usize);
    for r in records {
        let stance = stance_embedding(
            source(&m),
            &corpus,
            &mut vectors,
            &r.politician,
            issue,
            entity,
            &ctx.exclude(),
        );
        let Some(stance) = skip_missing(stance, &r.politician)? else {
            continue;
        };
        let label = r.paraphrase_positive()?;
        let res = classify_stance(&stance.n_stance, &pos, &neg);
        if res.tie {
            warn!("{}: cosine tie classified positive", r.politician);
        }
        total += 1;
        correct += usize::from(res.positive == label);
        writeln!(
            text,
            "{}\t{}\t{}\t{}\t{:.10}\t{:.10}",
            r.politician, label, res.positive, res.tie, res.cos_positive, res.cos_negative
        )?;
    }
    if total == 0 {
        bail!("no graded politician has discourse on {issue}");
    }
    ctx.write("paraphrase.tsv", &text)?;
    println!("accuracy\t{:.10}\t({correct}/{total})", correct as f64 / total as f64);
    Ok(())
}

fn grade_run(
    ctx: &Pipeline,
    corpus: &Corpus,
    model: &Option<Model>,
    provider: &dyn EmbeddingProvider,
    records: &[GradeRecord],
    grade_source: GradeSource,
    exclude: &BTreeSet<DocType>,
) -> Result<(usize, compreader::evaluation::GradePrediction)> {
    let issue = ctx.issue()?;
    let entity = ref_entity(ctx)?;
    let mut vectors = DocumentVectors::new(provider);
    let mut examples = Vec::new();
    let mut selected: Vec<&GradeRecord> = records.iter().filter(|r| r.source == grade_source).collect();
    selected.sort_by(|a, b| a.politician.cmp(&b.politician));
    for r in selected {
        let stance = stance_embedding(source(model), corpus, &mut vectors, &r.politician, issue, entity, exclude);
        let Some(stance) = skip_missing(stance, &r.politician)? else {
            continue;
        };
        examples.push(GradeExample {
            politician: r.politician.clone(),
            features: stance.grade_features(),
            class: r.class()?,
        });
    }
    let n_classes = match grade_source {
        GradeSource::Nra => 5,
        GradeSource::Lcv => 4,
    };
    let mut cfg = ctx.config.grade_predict.clone();
    if let Some(seed) = ctx.global.seed {
        info!("--seed {seed} replaces grade-prediction seeds {:?}", cfg.seeds);
        cfg.seeds = vec![seed];
    }
    Ok((examples.len(), grade_predict(&examples, n_classes, &cfg)?))
}

fn project(ctx: &Pipeline, model: &ModelArgs, dims: usize) -> Result<()> {
    let corpus = ctx.corpus()?;
    let (m, p) = ctx.model(model)?;
    let issue = ctx.issue()?;
    let mut vectors = DocumentVectors::new(p.as_ref());
    let politicians: Vec<String> = if ctx.global.entity.is_empty() {
        corpus.authors().into_iter().map(String::from).collect()
    } else {
        let mut v = ctx.global.entity.clone();
        v.sort();
        v
    };
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for pol in &politicians {
        let stance = stance_embedding(source(&m), &corpus, &mut vectors, pol, issue, None, &ctx.exclude());
        if let Some(s) = skip_missing(stance, pol)? {
            ids.push(pol.clone());
            rows.push(s.n_issue);
        }
    }
    if rows.is_empty() {
        bail!("no politician has discourse on {issue}");
    }
    let d = rows[0].len();
    let mut x = Array2::zeros((rows.len(), d));
    for (i, r) in rows.iter().enumerate() {
        x.row_mut(i).assign(r);
    }
    let coords = project_embeddings(&x, dims)?;
    let text = projection_text(&ids, &coords);
    print!("{text}");
    ctx.write("projection.tsv", text)?;
    Ok(())
}

fn ablate(ctx: &Pipeline, model: &ModelArgs, grades: &Path, grade_source: GradeSource) -> Result<()> {
    let corpus = ctx.corpus()?;
    let (m, p) = ctx.model(model)?;
    let records = load_grades(grades)?;
    let configs = if ctx.global.exclude_doc_types.is_empty() {
        ablation_configurations()
    } else {
        vec![("custom".to_string(), ctx.exclude())]
    };
    let mut text = String::from("configuration\texcluded\tpoliticians\ttest_mean\ttest_std\tvalidation_mean\tvalidation_std\n");
    for (name, exclude) in configs {
        let (n, r) = grade_run(ctx, &corpus, &m, p.as_ref(), &records, grade_source, &exclude)?;
        let excluded: Vec<&str> = exclude.iter().map(|t| t.as_str()).collect();
        writeln!(
            text,
            "{name}\t{}\t{n}\t{:.10}\t{:.10}\t{:.10}\t{:.10}",
            excluded.join(","),
            r.test_mean,
            r.test_std,
            r.validation_mean,
            r.validation_std
        )?;
    }
    print!("{text}");
    ctx.write("ablation.tsv", text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context as _};
use burnout_core::corpus::augment::AugmentOptions;
use burnout_core::corpus::generators::{self, write_recorded, RecordedGenerator, TemplateGenerator, TextGenerator};
use burnout_core::corpus::{
    build_v1, build_v2, combine, demo, load_expression_table, load_online_corpus, plan_jobs, split,
    write_expression_table, Dataset, DatasetName, BATCH_SIZE,
};
use burnout_core::evaluator::{
    artifact_dir, assemble_test_set, cross_evaluate, distribution_report, load_models, TestSet,
};
use burnout_core::explainer::{
    attribute, render_packet, select_for_review, write_packets, AttributeOptions, ModelRef, ReviewSelection,
};
use burnout_core::olbi::{rules, write_scores_csv, CutoffRule};
use burnout_core::survey::{StoredSurvey, SurveyStore, SURVEY_FILE};
use burnout_core::text::vocabulary_terms;
use burnout_core::trainer::{
    extend_vocabulary, fine_tune, load_base, ClassifierArtifact, Spread, TimelinePoint, TrainConfig,
};
use serde::Serialize;

use crate::config::{require, Context};
use crate::manifest::{self, FileRef};

/// A stage that finished but left something out; its output is written
/// and the process exits nonzero.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Incomplete(pub String);

fn surveys_path(ctx: &Context) -> std::path::PathBuf {
    ctx.data_dir.join(SURVEY_FILE)
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct DemoManifest {
    seed: u64,
    expressions: FileRef,
    online_corpus: FileRef,
    recorded_completions: FileRef,
    surveys: FileRef,
    survey_respondents: usize,
}

pub fn demo_data(ctx: &Context, seed: u64, force: bool) -> anyhow::Result<()> {
    std::fs::create_dir_all(&ctx.data_dir)?;
    let expressions = demo::demo_expressions();
    let table = ctx.expressions();
    write_expression_table(&table, &expressions)?;
    log::info!("wrote {} expression rows to {}", expressions.len(), table.display());

    let online = ctx.online_corpus();
    demo::synthetic_online_corpus(seed).write_jsonl(&online)?;

    let v1 = build_v1(&expressions)?;
    let jobs = plan_jobs(&v1, BATCH_SIZE);
    let recorded = demo::record_completions(&jobs, &TemplateGenerator::new(seed))
        .map_err(|e| anyhow!("template generator failed: {e}"))?;
    write_recorded(&ctx.recorded(), &recorded)?;
    log::info!("recorded {} completions", recorded.len());

    let inv = ctx.inventory()?;
    let mut body = String::new();
    let records = burnout_core::survey::demo::demo_survey(&inv);
    for record in &records {
        let score = record.score(&inv.inventory, &inv.keying)?;
        let excluded = record
            .free_text
            .iter()
            .all(|(_, t)| burnout_core::evaluator::usable_answer(t).is_none());
        let stored = StoredSurvey {
            record: record.clone(),
            score,
            excluded_from_test_set: excluded,
        };
        body.push_str(&serde_json::to_string(&stored)?);
        body.push('\n');
    }
    let surveys = surveys_path(ctx);
    match std::fs::read_to_string(&surveys) {
        Ok(existing) if existing == body => log::info!("{} already holds the demo survey", surveys.display()),
        Ok(_) if !force => bail!(
            "{} already holds other survey data; pass --force to replace it with the demo survey",
            surveys.display()
        ),
        _ => std::fs::write(&surveys, &body).with_context(|| format!("cannot write {}", surveys.display()))?,
    }

    let base = &ctx.data_dir;
    manifest::write(
        &ctx.data_dir.join("demo.manifest.json"),
        &DemoManifest {
            seed,
            expressions: FileRef::of(&table, base)?,
            online_corpus: FileRef::of(&online, base)?,
            recorded_completions: FileRef::of(&ctx.recorded(), base)?,
            surveys: FileRef::of(&surveys, base)?,
            survey_respondents: records.len(),
        },
    )
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct DatasetManifest {
    dataset: DatasetName,
    samples: usize,
    burnout: usize,
    no_burnout: usize,
    sources: BTreeMap<String, usize>,
    inputs: Vec<FileRef>,
    output: FileRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    augmentation: Option<AugmentationSummary>,
}

#[derive(Serialize)]
struct AugmentationSummary {
    generator: String,
    jobs: usize,
    failed_jobs: usize,
    candidates: usize,
    removed: BTreeMap<String, usize>,
    quarantined: usize,
}

fn write_dataset(ctx: &Context, ds: &Dataset, inputs: &[&Path], aug: Option<AugmentationSummary>) -> anyhow::Result<()> {
    let out = ctx.dataset_file(ds.name);
    std::fs::create_dir_all(out.parent().expect("dataset dir"))?;
    ds.write_jsonl(&out)?;
    let counts = ds.counts();
    let base = &ctx.data_dir;
    manifest::write(
        &ctx.dataset_manifest(ds.name),
        &DatasetManifest {
            dataset: ds.name,
            samples: ds.len(),
            burnout: counts.burnout,
            no_burnout: counts.control,
            sources: ds
                .source_counts()
                .into_iter()
                .map(|(s, n)| (serde_json::to_value(s).unwrap().as_str().unwrap_or("?").to_string(), n))
                .collect(),
            inputs: inputs.iter().map(|p| FileRef::of(p, base)).collect::<anyhow::Result<_>>()?,
            output: FileRef::of(&out, base)?,
            augmentation: aug,
        },
    )?;
    log::info!(
        "{}: {} samples ({} burnout / {} no burnout) -> {}",
        ds.name,
        ds.len(),
        counts.burnout,
        counts.control,
        out.display()
    );
    Ok(())
}

fn load_dataset(ctx: &Context, name: DatasetName) -> anyhow::Result<Dataset> {
    let path = ctx.dataset_file(name);
    Ok(match name {
        DatasetName::Online => load_online_corpus(&path)?,
        _ => Dataset::load_jsonl(name, &path)?,
    })
}

fn hint(name: DatasetName) -> String {
    match name {
        DatasetName::Online => "burnout demo-data, or set paths.online_corpus".into(),
        other => format!("burnout build-dataset {other}"),
    }
}

pub fn build_dataset(ctx: &Context, name: DatasetName, mock_llm: bool) -> anyhow::Result<()> {
    match name {
        DatasetName::Online => bail!("the online corpus is an input, not built; point paths.online_corpus at it"),
        DatasetName::V1 => {
            let table = ctx.expressions();
            require(&[(&table, "burnout demo-data")])?;
            let ds = build_v1(&load_expression_table(&table)?)?;
            write_dataset(ctx, &ds, &[&table], None)
        }
        DatasetName::V2 => {
            let v1_path = ctx.dataset_file(DatasetName::V1);
            let recorded = ctx.recorded();
            let mut inputs = vec![(v1_path.as_path(), hint(DatasetName::V1))];
            if mock_llm {
                inputs.push((recorded.as_path(), "burnout demo-data".into()));
            }
            let inputs_ref: Vec<(&Path, &str)> = inputs.iter().map(|(p, h)| (*p, h.as_str())).collect();
            require(&inputs_ref)?;
            let v1 = load_dataset(ctx, DatasetName::V1)?;
            let client: Box<dyn TextGenerator> = if mock_llm {
                Box::new(RecordedGenerator::load(&recorded)?)
            } else {
                generators::create(&ctx.config.generator)?
            };
            log::info!("generating with {}", client.name());
            let built = build_v2(&v1, client.as_ref(), &AugmentOptions::default())?;
            let mut removed: BTreeMap<String, usize> = BTreeMap::new();
            for r in &built.cleaning.removed {
                let key = serde_json::to_value(r.reason)?.as_str().unwrap_or("?").to_string();
                *removed.entry(key).or_default() += 1;
            }
            let failed = built.output.failures.len();
            let summary = AugmentationSummary {
                generator: client.name().to_string(),
                jobs: built.output.jobs.len() + failed,
                failed_jobs: failed,
                candidates: built.cleaning.kept.len() + built.cleaning.removed.len(),
                removed,
                quarantined: built.output.quarantine.len(),
            };
            let mut used: Vec<&Path> = vec![&v1_path];
            if mock_llm {
                used.push(&recorded);
            }
            write_dataset(ctx, &built.dataset, &used, Some(summary))?;
            if failed > 0 {
                for f in &built.output.failures {
                    log::error!("job {} failed after {} attempts: {}", f.job_id, f.attempts, f.error);
                }
                return Err(Incomplete(format!("{failed} augmentation job(s) failed; v2 is partial")).into());
            }
            Ok(())
        }
        DatasetName::Combined => {
            let v2 = ctx.dataset_file(DatasetName::V2);
            let online = ctx.online_corpus();
            require(&[(&v2, &hint(DatasetName::V2)), (&online, &hint(DatasetName::Online))])
                .context("combined needs v2 and the online corpus")?;
            let ds = combine(&[load_dataset(ctx, DatasetName::V2)?, load_dataset(ctx, DatasetName::Online)?])?;
            write_dataset(ctx, &ds, &[&v2, &online], None)
        }
    }
}

// ---------------------------------------------------------------------------

#[derive(Clone, Serialize)]
struct SplitManifest {
    seed: u64,
    ratio: f64,
    train: usize,
    eval: usize,
    /// hash over the ordered training texts and labels
    train_sha256: String,
    eval_sha256: String,
}

fn samples_hash(ds: &Dataset) -> String {
    let mut buf = String::new();
    for s in ds.samples() {
        buf.push_str(&s.text);
        buf.push('\t');
        buf.push_str(&(s.label as u8).to_string());
        buf.push('\n');
    }
    burnout_core::seed::content_hash(buf.as_bytes())
}

#[derive(Serialize)]
struct TrainManifest {
    dataset: DatasetName,
    base_model: String,
    epochs: u32,
    split: SplitManifest,
    added_tokens: usize,
    timeline_points: usize,
    final_eval: Option<TimelinePoint>,
    inputs: Vec<FileRef>,
    artifact: Vec<FileRef>,
}

#[derive(Serialize)]
struct RepeatsManifest {
    dataset: DatasetName,
    seeds: Vec<u64>,
    final_f1: Vec<f64>,
    mean: f64,
    std: f64,
    min: f64,
    max: f64,
}

pub struct TrainOptions {
    pub seed: u64,
    pub epochs: Option<u32>,
    pub repeats: usize,
}

pub struct TrainRun {
    pub seed: u64,
    pub artifact: ClassifierArtifact,
    pub seconds: f64,
    split: SplitManifest,
}

fn train_once(ctx: &Context, ds: &Dataset, terms: &[String], cfg: &TrainConfig) -> anyhow::Result<TrainRun> {
    let ratio = ctx.config.train.split_ratio;
    let (train, eval) = split(ds, ratio, cfg.rng_seed)?;
    let start = Instant::now();
    let (mut tok, mut model) = load_base(cfg)?;
    let added = extend_vocabulary(&mut tok, &mut model, terms);
    log::info!(
        "{} seed {}: {} train / {} eval, {} added tokens, {} epochs",
        ds.name,
        cfg.rng_seed,
        train.len(),
        eval.len(),
        added,
        cfg.epochs
    );
    let (artifact, _) = fine_tune(&train, &eval, cfg, tok, model)?;
    Ok(TrainRun {
        seed: cfg.rng_seed,
        artifact,
        seconds: start.elapsed().as_secs_f64(),
        split: SplitManifest {
            seed: cfg.rng_seed,
            ratio,
            train: train.len(),
            eval: eval.len(),
            train_sha256: samples_hash(&train),
            eval_sha256: samples_hash(&eval),
        },
    })
}

pub fn train(ctx: &Context, name: DatasetName, opts: &TrainOptions) -> anyhow::Result<Vec<TrainRun>> {
    let data = ctx.dataset_file(name);
    let table = ctx.expressions();
    require(&[(&data, &hint(name)), (&table, "burnout demo-data")])?;
    if opts.repeats == 0 {
        bail!("--repeats must be at least 1");
    }
    let ds = load_dataset(ctx, name)?;
    if ds.is_empty() {
        bail!("dataset {name} at {} is empty", data.display());
    }
    let records = load_expression_table(&table)?;
    let terms = vocabulary_terms(records.iter().flat_map(|r| r.pairs().flat_map(|(a, b)| [a, b])));

    let mut cfg = TrainConfig::with_seed(opts.seed);
    cfg.epochs = opts.epochs.unwrap_or_else(|| ctx.epochs(name));
    let t = &ctx.config.train;
    if let Some(m) = &t.base_model {
        cfg.base_model_id = m.clone();
    }
    if let Some(lr) = t.learning_rate {
        cfg.optimizer.learning_rate = lr;
    }
    if let Some(b) = t.train_batch_size {
        cfg.train_batch_size = b;
    }
    cfg.validate()?;

    let mut runs = Vec::new();
    for i in 0..opts.repeats {
        let run_cfg = TrainConfig {
            rng_seed: opts.seed + i as u64,
            ..cfg.clone()
        };
        let run = train_once(ctx, &ds, &terms, &run_cfg)?;
        let f1 = run.artifact.metadata.final_eval.map_or(f64::NAN, |p| p.eval_f1);
        eprintln!("{name} seed {}: eval F1 {f1:.3} in {:.1}s", run.seed, run.seconds);
        runs.push(run);
    }

    let first = &runs[0];
    let dir = artifact_dir(&ctx.model_dir, name);
    first.artifact.save(&dir)?;
    let files = [
        burnout_core::trainer::CONFIG_FILE,
        burnout_core::trainer::WEIGHTS_FILE,
        burnout_core::trainer::TIMELINE_FILE,
        burnout_core::trainer::CURVES_FILE,
    ];
    let meta = &first.artifact.metadata;
    manifest::write(
        &dir.join("manifest.json"),
        &TrainManifest {
            dataset: name,
            base_model: meta.base_model_id.clone(),
            epochs: meta.train_config.epochs,
            split: first.split.clone(),
            added_tokens: meta.added_tokens,
            timeline_points: first.artifact.timeline.len(),
            final_eval: meta.final_eval,
            inputs: vec![FileRef::of(&data, &ctx.data_dir)?, FileRef::of(&table, &ctx.data_dir)?],
            artifact: files
                .iter()
                .map(|f| FileRef::of(&dir.join(f), &dir))
                .collect::<anyhow::Result<_>>()?,
        },
    )?;
    if runs.len() > 1 {
        let f1: Vec<f64> = runs
            .iter()
            .map(|r| r.artifact.metadata.final_eval.map_or(f64::NAN, |p| p.eval_f1))
            .collect();
        let spread = Spread::of(&f1).expect("at least one run");
        eprintln!("{name}: eval F1 {spread}");
        manifest::write(
            &dir.join("repeats.json"),
            &RepeatsManifest {
                dataset: name,
                seeds: runs.iter().map(|r| r.seed).collect(),
                final_f1: f1,
                mean: spread.mean,
                std: spread.std,
                min: spread.min,
                max: spread.max,
            },
        )?;
    } else {
        let _ = std::fs::remove_file(dir.join("repeats.json"));
    }
    log::info!("artifact written to {}", dir.display());
    Ok(runs)
}

// ---------------------------------------------------------------------------

fn selected_rules(ctx: &Context, cutoffs: &[String]) -> anyhow::Result<Vec<std::sync::Arc<dyn CutoffRule>>> {
    let names = if cutoffs.is_empty() { &ctx.config.evaluate.cutoffs } else { cutoffs };
    Ok(rules::select(names)?)
}

fn load_test_set(ctx: &Context, rules: &[std::sync::Arc<dyn CutoffRule>]) -> anyhow::Result<(TestSet, Vec<StoredSurvey>)> {
    let path = surveys_path(ctx);
    require(&[(&path, "burnout demo-data, or collect surveys with burnout serve")])?;
    let stored = SurveyStore::at(&path).load()?;
    if stored.is_empty() {
        bail!("{} holds no surveys", path.display());
    }
    let records: Vec<_> = stored.iter().map(|s| s.record.clone()).collect();
    Ok((assemble_test_set(&records, &ctx.inventory()?, rules)?, stored))
}

#[derive(Serialize)]
struct EvaluateManifest {
    surveys: FileRef,
    respondents: usize,
    texts: usize,
    dropped_answers: usize,
    distribution: burnout_core::olbi::DistributionTable,
    table4: burnout_core::evaluator::Table4Report,
    complete: bool,
}

pub fn evaluate(ctx: &Context, cutoffs: &[String]) -> anyhow::Result<()> {
    let rules = selected_rules(ctx, cutoffs)?;
    let (test, _) = load_test_set(ctx, &rules)?;
    let distribution = distribution_report(&test)?;
    let models = load_models(&ctx.model_dir);
    let table4 = cross_evaluate(&models, &test);

    let dir = ctx.report_dir();
    std::fs::create_dir_all(&dir)?;
    let write = |name: &str, body: String| -> anyhow::Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, body).with_context(|| format!("cannot write {}", p.display()))
    };
    write("table3.txt", distribution.render_text())?;
    write("table3.html", distribution.render_html())?;
    let mut csv = Vec::new();
    distribution.write_csv(&mut csv)?;
    write("table3.csv", String::from_utf8(csv)?)?;
    write("table4.txt", table4.render_text())?;
    write("table4.html", table4.render_html())?;
    let mut csv = Vec::new();
    table4.write_csv(&mut csv)?;
    write("table4.csv", String::from_utf8(csv)?)?;

    println!("{}", distribution.render_text());
    println!("{}", table4.render_text());
    let complete = table4.is_complete();
    manifest::write(
        &dir.join("manifest.json"),
        &EvaluateManifest {
            surveys: FileRef::of(&surveys_path(ctx), &ctx.data_dir)?,
            respondents: test.respondents.len(),
            texts: test.texts.len(),
            dropped_answers: test.dropped_answers,
            distribution,
            table4: table4.clone(),
            complete,
        },
    )?;
    if !complete {
        let missing: Vec<String> = table4
            .rows
            .iter()
            .filter_map(|r| r.error.as_ref().map(|e| format!("{}: {e}", r.dataset)))
            .collect();
        return Err(Incomplete(format!("report is partial:\n  {}", missing.join("\n  "))).into());
    }
    Ok(())
}

pub fn score(ctx: &Context, cutoffs: &[String]) -> anyhow::Result<()> {
    let rules = selected_rules(ctx, cutoffs)?;
    let (test, _) = load_test_set(ctx, &rules)?;
    let dir = ctx.report_dir();
    std::fs::create_dir_all(&dir)?;
    let scores: Vec<_> = test
        .respondents
        .iter()
        .map(|r| (r.respondent_id.clone(), r.score))
        .collect();
    let path = dir.join("scores.csv");
    let file = std::fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    write_scores_csv(file, &scores, &rules)?;
    println!("{}", distribution_report(&test)?.render_text());
    log::info!("scores written to {}", path.display());
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ExplainManifest {
    model: String,
    dataset: DatasetName,
    method: String,
    steps: usize,
    selection: String,
    packets: Vec<String>,
}

pub fn explain(ctx: &Context, selection: ReviewSelection, dataset: Option<DatasetName>) -> anyhow::Result<usize> {
    let cfg = &ctx.config.explain;
    let dataset = dataset.unwrap_or(cfg.dataset);
    let dir = artifact_dir(&ctx.model_dir, dataset);
    require(&[(&dir.join(burnout_core::trainer::CONFIG_FILE), &format!("burnout train {dataset} --seed N"))])?;
    let artifact = ClassifierArtifact::load(&dir)?;
    let rules = rules::evaluation_rules(false);
    let (test, _) = load_test_set(ctx, &rules)?;
    let opts = AttributeOptions {
        steps: cfg.steps,
        method: cfg.method.clone(),
        target: None,
    };
    let model = ModelRef {
        model: &artifact.metadata.base_model_id,
        dataset: dataset.as_str(),
    };
    let mut packets = Vec::new();
    for i in select_for_review(test.texts.len(), selection) {
        let text = &test.texts[i];
        let prediction = artifact.predict(&text.text)?;
        let attribution = attribute(&artifact, &text.text, &opts)?;
        packets.push(render_packet(text, prediction, &attribution, model)?);
    }
    let out = ctx.data_dir.join(burnout_service::config::PACKET_DIR);
    if out.join(burnout_core::explainer::HTML_DIR).exists() {
        std::fs::remove_dir_all(out.join(burnout_core::explainer::HTML_DIR))?;
    }
    write_packets(&out, &packets)?;
    manifest::write(
        &out.join("manifest.json"),
        &ExplainManifest {
            model: artifact.metadata.base_model_id.clone(),
            dataset,
            method: opts.method.clone(),
            steps: opts.steps,
            selection: match selection {
                ReviewSelection::All => "all".into(),
                ReviewSelection::Random { count, seed } => format!("random {count} (seed {seed})"),
            },
            packets: packets.iter().map(|p| p.id.clone()).collect(),
        },
    )?;
    log::info!("{} packets written to {}", packets.len(), out.display());
    Ok(packets.len())
}

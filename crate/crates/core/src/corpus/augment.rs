use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::clean::{clean_with, normalize_whitespace, CleanPolicy, CleanReport};
use super::generators::{GenerationError, TextGenerator};
use super::sample::{Dataset, DatasetName, Source, TextSample};
use super::CorpusError;
use crate::label::Label;

pub const PROMPT_TEMPLATE: &str = "Generate 10 sentences each in German for the following expressions. \
The sentences should represent the wording of a person being in this kind of mental state:";
pub const BATCH_SIZE: usize = 20;
pub const SENTENCES_PER_EXPRESSION: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationJob {
    pub id: usize,
    pub label: Label,
    pub expressions: Vec<String>,
    pub prompt: String,
    pub requested_per_expression: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_completion: Option<String>,
}

pub fn build_prompt(expressions: &[String]) -> String {
    format!("{PROMPT_TEMPLATE} {}", expressions.join(", "))
}

/// Inverse of [`build_prompt`]; `None` if the prompt lacks the template.
pub fn split_prompt(prompt: &str) -> Option<Vec<String>> {
    let rest = prompt.strip_prefix(PROMPT_TEMPLATE)?.trim();
    if rest.is_empty() {
        return Some(Vec::new());
    }
    Some(rest.split(", ").map(str::to_string).collect())
}

/// Batches expressions into prompts of at most `batch_size` expressions.
/// Job ids start at `first_id`.
pub fn make_prompts(
    expressions: &[String],
    label: Label,
    batch_size: usize,
    first_id: usize,
) -> Vec<AugmentationJob> {
    let batch_size = batch_size.max(1);
    expressions
        .chunks(batch_size)
        .enumerate()
        .map(|(i, batch)| AugmentationJob {
            id: first_id + i,
            label,
            expressions: batch.to_vec(),
            prompt: build_prompt(batch),
            requested_per_expression: SENTENCES_PER_EXPRESSION,
            raw_completion: None,
        })
        .collect()
}

/// Jobs covering every unique burnout expression, then every unique control
/// expression of the curated dataset.
pub fn plan_jobs(v1: &Dataset, batch_size: usize) -> Vec<AugmentationJob> {
    let mut jobs = Vec::new();
    for label in [Label::Burnout, Label::NoBurnout] {
        let mut seen = std::collections::HashSet::new();
        let expressions: Vec<String> = v1
            .samples()
            .iter()
            .filter(|s| s.label == label)
            .map(|s| s.text.clone())
            .filter(|t| seen.insert(t.clone()))
            .collect();
        let next = jobs.len();
        jobs.extend(make_prompts(&expressions, label, batch_size, next));
    }
    jobs
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarantineEntry {
    pub job_id: usize,
    pub reason: String,
    pub raw_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobFailure {
    pub job_id: usize,
    pub expressions: Vec<String>,
    pub error: String,
    pub retriable: bool,
    pub attempts: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AugmentationOutput {
    /// Completed jobs with their raw completion attached, in job order.
    pub jobs: Vec<AugmentationJob>,
    pub candidates: Vec<TextSample>,
    pub quarantine: Vec<QuarantineEntry>,
    pub failures: Vec<JobFailure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AugmentOptions {
    pub parallelism: usize,
    pub max_attempts: usize,
    pub backoff: Duration,
}

impl Default for AugmentOptions {
    fn default() -> Self {
        Self {
            parallelism: 4,
            max_attempts: 3,
            backoff: Duration::from_millis(500),
        }
    }
}

fn strip_list_marker(line: &str) -> &str {
    let line = line.trim();
    let digits = line.chars().take_while(char::is_ascii_digit).count();
    if digits > 0 {
        let rest = &line[digits..];
        if let Some(rest) = rest.strip_prefix(['.', ')']) {
            return rest.trim_start();
        }
        return line;
    }
    for marker in ["- ", "* ", "• "] {
        if let Some(rest) = line.strip_prefix(marker) {
            return rest.trim_start();
        }
    }
    line
}

fn header_of<'a>(line: &str, expressions: &'a [String]) -> Option<&'a str> {
    let candidate = line
        .trim()
        .trim_matches(['*', '#', '"', '„', '“', ' '])
        .trim_end_matches(':')
        .trim_matches(['*', '"', '„', '“', ' ']);
    let key = normalize_whitespace(candidate).to_lowercase();
    expressions
        .iter()
        .find(|e| normalize_whitespace(e).to_lowercase() == key)
        .map(String::as_str)
}

/// Splits one completion into `(origin expression, sentence)` candidates.
/// Lines naming one of the batch's expressions start that expression's
/// section; every other non-empty line is one candidate. Lines that cannot
/// be attributed to an expression are returned separately.
pub fn parse_completion(job: &AugmentationJob, completion: &str) -> (Vec<(String, String)>, Vec<String>) {
    let mut candidates = Vec::new();
    let mut orphans = Vec::new();
    let mut current: Option<&str> = match job.expressions.as_slice() {
        [single] => Some(single.as_str()),
        _ => None,
    };
    for raw in completion.lines() {
        let line = strip_list_marker(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(expr) = header_of(line, &job.expressions) {
            current = Some(expr);
            continue;
        }
        match current {
            Some(expr) => candidates.push((expr.to_string(), line.to_string())),
            None => orphans.push(raw.trim().to_string()),
        }
    }
    (candidates, orphans)
}

fn complete_with_retry(
    client: &dyn TextGenerator,
    job: &AugmentationJob,
    opts: &AugmentOptions,
) -> Result<String, (GenerationError, usize)> {
    let mut attempt = 0;
    loop {
        attempt += 1;
        match client.complete(&job.prompt) {
            Ok(text) => return Ok(text),
            Err(err) if err.retriable && attempt < opts.max_attempts.max(1) => {
                log::warn!("job {} attempt {attempt} failed: {}; retrying", job.id, err.message);
                if !opts.backoff.is_zero() {
                    std::thread::sleep(opts.backoff * attempt as u32);
                }
            }
            Err(err) => return Err((err, attempt)),
        }
    }
}

/// Sends every job to `client` with bounded parallelism and per-job retry,
/// then parses the completions. Results are merged in job order, so the
/// output does not depend on scheduling.
pub fn run_augmentation(
    jobs: &[AugmentationJob],
    client: &dyn TextGenerator,
    opts: &AugmentOptions,
) -> AugmentationOutput {
    let results: Mutex<Vec<Option<Result<String, (GenerationError, usize)>>>> =
        Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let workers = opts.parallelism.clamp(1, jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                if idx >= jobs.len() {
                    break;
                }
                let outcome = complete_with_retry(client, &jobs[idx], opts);
                results.lock().expect("results lock")[idx] = Some(outcome);
            });
        }
    });

    let mut out = AugmentationOutput::default();
    for (job, result) in jobs.iter().zip(results.into_inner().expect("results lock")) {
        match result.expect("every job ran") {
            Ok(completion) => {
                let (candidates, orphans) = parse_completion(job, &completion);
                if completion.trim().is_empty() {
                    out.quarantine.push(QuarantineEntry {
                        job_id: job.id,
                        reason: "empty completion".into(),
                        raw_text: completion.clone(),
                    });
                } else if candidates.is_empty() {
                    out.quarantine.push(QuarantineEntry {
                        job_id: job.id,
                        reason: "no sentence could be attributed to an expression".into(),
                        raw_text: completion.clone(),
                    });
                } else {
                    for orphan in orphans {
                        out.quarantine.push(QuarantineEntry {
                            job_id: job.id,
                            reason: "line outside any expression section".into(),
                            raw_text: orphan,
                        });
                    }
                }
                out.candidates.extend(candidates.into_iter().map(|(expr, sentence)| {
                    TextSample::new(sentence, job.label, Source::Generated).with_origin(expr)
                }));
                let mut done = job.clone();
                done.raw_completion = Some(completion);
                out.jobs.push(done);
            }
            Err((err, attempts)) => out.failures.push(JobFailure {
                job_id: job.id,
                expressions: job.expressions.clone(),
                error: err.message,
                retriable: err.retriable,
                attempts,
            }),
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct V2Build {
    pub dataset: Dataset,
    pub output: AugmentationOutput,
    pub cleaning: CleanReport,
}

/// Plans jobs over the curated dataset, runs them and cleans the generated
/// sentences. Failed jobs are reported in `output.failures`; the dataset
/// holds whatever survived cleaning, without rebalancing the classes.
pub fn build_v2(
    v1: &Dataset,
    client: &dyn TextGenerator,
    opts: &AugmentOptions,
) -> Result<V2Build, CorpusError> {
    let jobs = plan_jobs(v1, BATCH_SIZE);
    let mut output = run_augmentation(&jobs, client, opts);
    let cleaning = clean_with(std::mem::take(&mut output.candidates), &CleanPolicy::generated());
    if cleaning.kept.is_empty() {
        return Err(CorpusError::EmptyDataset("v2 after cleaning".into()));
    }
    output.candidates = cleaning.kept.clone();
    Ok(V2Build {
        dataset: Dataset::new(DatasetName::V2, cleaning.kept.clone()),
        output,
        cleaning,
    })
}

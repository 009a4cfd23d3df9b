//! Text-generation clients used for corpus augmentation.
//!
//! Clients implement [`TextGenerator`] and are selected by name through
//! [`builtin`]: `chat-completion` talks to a chat-completion HTTP endpoint,
//! `recorded` replays archived completions, and `template` is an offline
//! synthetic stand-in that fabricates plausible completions.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::augment::{split_prompt, SENTENCES_PER_EXPRESSION};
use super::sample::read_jsonl;
use super::CorpusError;
use crate::registry::Registry;
use crate::seed::{content_hash, stable_seed};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct GenerationError {
    pub message: String,
    pub retriable: bool,
}

impl GenerationError {
    pub fn retriable(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            retriable: true,
        }
    }

    pub fn fatal(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            retriable: false,
        }
    }
}

pub trait TextGenerator: Send + Sync {
    fn name(&self) -> &str;
    fn complete(&self, prompt: &str) -> Result<String, GenerationError>;
}

impl fmt::Debug for dyn TextGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TextGenerator({})", self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub kind: String,
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub api_key_env: String,
    pub timeout_secs: u64,
    pub recorded_path: Option<PathBuf>,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            kind: "chat-completion".into(),
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-3.5-turbo-1106".into(),
            temperature: 1.0,
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_secs: 120,
            recorded_path: None,
            seed: 0,
        }
    }
}

pub type GeneratorFactory = fn(&GeneratorConfig) -> Result<Box<dyn TextGenerator>, CorpusError>;

pub fn builtin() -> Registry<GeneratorFactory> {
    let mut reg: Registry<GeneratorFactory> = Registry::new("text generator");
    reg.register("chat-completion", |cfg| {
        Ok(Box::new(ChatCompletionClient::from_config(cfg)?))
    })
    .expect("unique");
    reg.register("recorded", |cfg| {
        let path = cfg
            .recorded_path
            .as_deref()
            .ok_or_else(|| CorpusError::Config("recorded generator needs recorded_path".into()))?;
        Ok(Box::new(RecordedGenerator::load(path)?))
    })
    .expect("unique");
    reg.register("template", |cfg| Ok(Box::new(TemplateGenerator::new(cfg.seed))))
        .expect("unique");
    reg.alias("mock", "recorded").expect("target exists");
    reg
}

pub fn create(config: &GeneratorConfig) -> Result<Box<dyn TextGenerator>, CorpusError> {
    let factory = builtin()
        .get(&config.kind)
        .copied()
        .map_err(|e| CorpusError::Config(e.to_string()))?;
    factory(config)
}

// ---------------------------------------------------------------------------

/// Client for a chat-completion style HTTP endpoint.
pub struct ChatCompletionClient {
    http: reqwest::blocking::Client,
    endpoint: String,
    model: String,
    temperature: f64,
    api_key: Option<String>,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
    temperature: f64,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatResponseMessage,
}

#[derive(Deserialize)]
struct ChatResponseMessage {
    #[serde(default)]
    content: Option<String>,
}

impl ChatCompletionClient {
    pub fn from_config(cfg: &GeneratorConfig) -> Result<Self, CorpusError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .map_err(|e| CorpusError::Config(format!("http client: {e}")))?;
        Ok(Self {
            http,
            endpoint: cfg.endpoint.clone(),
            model: cfg.model.clone(),
            temperature: cfg.temperature,
            api_key: std::env::var(&cfg.api_key_env).ok().filter(|k| !k.is_empty()),
        })
    }
}

impl TextGenerator for ChatCompletionClient {
    fn name(&self) -> &str {
        "chat-completion"
    }

    fn complete(&self, prompt: &str) -> Result<String, GenerationError> {
        let body = ChatRequest {
            model: &self.model,
            messages: [ChatMessage {
                role: "user",
                content: prompt,
            }],
            temperature: self.temperature,
        };
        let mut req = self.http.post(&self.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req
            .send()
            .map_err(|e| GenerationError::retriable(format!("request failed: {e}")))?;
        let status = resp.status();
        if !status.is_success() {
            let text = resp.text().unwrap_or_default();
            let msg = format!("endpoint returned {status}: {text}");
            return Err(if status.is_server_error() || status.as_u16() == 429 {
                GenerationError::retriable(msg)
            } else {
                GenerationError::fatal(msg)
            });
        }
        let parsed: ChatResponse = resp
            .json()
            .map_err(|e| GenerationError::fatal(format!("malformed response body: {e}")))?;
        Ok(parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .unwrap_or_default())
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordedCompletion {
    pub prompt: String,
    pub completion: String,
}

/// Replays completions recorded earlier, keyed by exact prompt text.
#[derive(Debug, Clone, Default)]
pub struct RecordedGenerator {
    completions: HashMap<String, String>,
}

impl RecordedGenerator {
    pub fn new(entries: impl IntoIterator<Item = RecordedCompletion>) -> Self {
        Self {
            completions: entries.into_iter().map(|e| (e.prompt, e.completion)).collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        Ok(Self::new(read_jsonl::<RecordedCompletion>(path)?))
    }

    pub fn len(&self) -> usize {
        self.completions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.completions.is_empty()
    }
}

impl TextGenerator for RecordedGenerator {
    fn name(&self) -> &str {
        "recorded"
    }

    fn complete(&self, prompt: &str) -> Result<String, GenerationError> {
        self.completions.get(prompt).cloned().ok_or_else(|| {
            GenerationError::fatal(format!(
                "no recorded completion for prompt {}",
                &content_hash(prompt.as_bytes())[..16]
            ))
        })
    }
}

pub fn write_recorded(path: &Path, entries: &[RecordedCompletion]) -> Result<(), CorpusError> {
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for e in entries {
        serde_json::to_writer(&mut w, e).map_err(|err| CorpusError::io(path, err.into()))?;
        w.write_all(b"\n").map_err(|err| CorpusError::io(path, err))?;
    }
    w.flush().map_err(|e| CorpusError::io(path, e))
}

// ---------------------------------------------------------------------------

const FRAMES: &[&str] = &[
    "Bei mir ist es gerade so: {}.",
    "Wenn ich ehrlich bin, beschreibt „{}“ meinen Zustand ziemlich gut.",
    "Seit einigen Wochen denke ich ständig an „{}“.",
    "Meine Kolleginnen würden wohl sagen: {}.",
    "Morgens beim Aufstehen geht mir „{}“ durch den Kopf.",
    "Ich merke, dass „{}“ gerade meinen Alltag bestimmt.",
    "Am Abend spüre ich es deutlich: {}.",
    "Das Stichwort „{}“ trifft es für mich im Moment sehr genau.",
    "Bei der Arbeit zeigt sich das bei mir als „{}“.",
    "Auch am Wochenende bleibt es dabei: {}.",
    "Wenn ich an die Arbeit denke, ist da vor allem „{}“.",
    "Mein Partner sagt mir oft: {}.",
    "In der Mittagspause wird mir klar: {}.",
    "Schon seit Monaten begleitet mich „{}“ durch die Woche.",
];

/// Offline generator producing numbered, per-expression sentence lists in
/// the shape a chat model typically returns. Deterministic per
/// (seed, prompt); occasionally returns fewer sentences than requested, a
/// cut-off sentence or a repeated line.
#[derive(Debug, Clone)]
pub struct TemplateGenerator {
    seed: u64,
}

impl TemplateGenerator {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    fn sentences_for(&self, expression: &str) -> Vec<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(stable_seed(&[&self.seed.to_string(), expression]));
        let mut frames: Vec<&str> = FRAMES.to_vec();
        frames.shuffle(&mut rng);
        let count = if rng.gen_bool(0.25) {
            SENTENCES_PER_EXPRESSION - rng.gen_range(1..=3)
        } else {
            SENTENCES_PER_EXPRESSION
        };
        let mut out: Vec<String> = frames
            .iter()
            .take(count)
            .map(|f| f.replacen("{}", expression, 1))
            .collect();
        if rng.gen_bool(0.15) {
            // cut off mid-sentence, as happens with long generations
            let last = out.pop().unwrap_or_default();
            let cut = last.char_indices().nth(last.chars().count() * 2 / 3).map_or(0, |(i, _)| i);
            out.push(last[..cut].trim_end().trim_end_matches([',', '.', '!', '?']).to_string());
        }
        if rng.gen_bool(0.1) && !out.is_empty() {
            let dup = out[0].clone();
            out.push(dup);
        }
        out
    }
}

impl TextGenerator for TemplateGenerator {
    fn name(&self) -> &str {
        "template"
    }

    fn complete(&self, prompt: &str) -> Result<String, GenerationError> {
        let expressions = split_prompt(prompt)
            .ok_or_else(|| GenerationError::fatal("prompt does not use the augmentation template"))?;
        let mut out = String::new();
        for expression in expressions {
            out.push_str(&format!("{expression}:\n"));
            for (i, sentence) in self.sentences_for(&expression).iter().enumerate() {
                out.push_str(&format!("{}. {sentence}\n", i + 1));
            }
            out.push('\n');
        }
        Ok(out)
    }
}

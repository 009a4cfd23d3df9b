#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use burnout_core::explainer::{write_packets, AttributionPacket};
use burnout_core::olbi::RuleId;
use burnout_core::trainer::Prediction;
use burnout_core::Label;
use burnout_service::{router, AppState, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::Value;
use tempfile::TempDir;
use tower::ServiceExt;

pub struct Env {
    pub dir: TempDir,
    pub app: Router,
}

impl Env {
    pub fn data(&self) -> std::path::PathBuf {
        self.dir.path().join("data")
    }

    pub fn models(&self) -> std::path::PathBuf {
        self.dir.path().join("models")
    }

    pub async fn call(&self, method: &str, uri: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        let body = match body {
            Some(v) => {
                req = req.header("content-type", "application/json");
                Body::from(v.to_string())
            }
            None => Body::empty(),
        };
        let resp = self.app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        let value = if bytes.is_empty() {
            Value::Null
        } else {
            serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
        };
        (status, value)
    }
}

pub const TOKENS: [&str; 5] = ["invite-a", "invite-b", "invite-c", "invite-d", "invite-e"];

/// Fresh data and model dirs with five reviewer invites and `packets`.
pub fn env(packets: &[AttributionPacket]) -> Env {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    std::fs::create_dir_all(dir.path().join("models")).unwrap();
    std::fs::create_dir_all(&data).unwrap();
    std::fs::write(data.join("reviewer_tokens.txt"), TOKENS.join("\n")).unwrap();
    write_packets(&data.join("packets"), packets).unwrap();
    let config = ServiceConfig::new(0, &data, dir.path().join("models"));
    let app = router(AppState::open(config).unwrap());
    Env { dir, app }
}

/// A hand-built packet; attribution fields are irrelevant to the service.
pub fn packet(id: &str, text: &str, olbi: [Label; 3], ai: Label) -> AttributionPacket {
    let olbi_labels: BTreeMap<RuleId, Label> = [RuleId::Cutoff1, RuleId::Cutoff2Working, RuleId::Cutoff3Total]
        .into_iter()
        .zip(olbi)
        .collect();
    AttributionPacket {
        id: id.into(),
        text: text.into(),
        question_id: None,
        prediction: Prediction {
            label: ai,
            score: if ai.is_burnout() { 0.9 } else { 0.1 },
        },
        olbi_summary: burnout_core::explainer::olbi_summary(&olbi_labels),
        olbi_labels,
        tokens: Vec::new(),
        words: Vec::new(),
        target: ai,
        f_input: 0.9,
        f_baseline: 0.5,
        residual: 0.0,
        method: "gausslegendre".into(),
        steps: 32,
        model: "tiny-german-cased".into(),
        dataset: "v2".into(),
        warnings: Vec::new(),
    }
}

/// Four packets shaped like the published review examples: OLBI label,
/// AI label, and the verdicts (true = agree) of five experts.
pub fn review_fixture() -> Vec<(AttributionPacket, [bool; 5])> {
    use Label::{Burnout as B, NoBurnout as N};
    vec![
        (
            packet(
                "0000000000000001",
                "Ein erholsames Wochenende, ich habe neue Energie getankt und war gut gelaunt.",
                [N, N, N],
                N,
            ),
            [true; 5],
        ),
        (
            packet(
                "0000000000000002",
                "Ich gehe ins Bett, weil ich völlig erschöpft bin. Jeder Tag ist ein Kampf.",
                [B, B, B],
                B,
            ),
            [true, true, false, true, true],
        ),
        (
            packet(
                "0000000000000003",
                "Ich bin oft erschöpft vom Tag, aber mit meinen Aktivitäten halbwegs zufrieden.",
                [B, N, B],
                N,
            ),
            [true; 5],
        ),
        (
            packet(
                "0000000000000004",
                "Am Wochenende war ich allein und etwas einsam, später habe ich Freunde getroffen.",
                [N, N, N],
                B,
            ),
            [false; 5],
        ),
    ]
}

pub fn write_survey_json(path: &Path, value: &Value) {
    std::fs::write(path, value.to_string()).unwrap();
}

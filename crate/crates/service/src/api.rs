use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use burnout_core::evaluator::{assemble_test_set, cross_evaluate, distribution_report, load_models, EvalError};
use burnout_core::explainer::{read_packets, AttributionPacket};
use burnout_core::olbi::{rules, Gender, InventoryConfig, OlbiError};
use burnout_core::survey::{FreeTextAnswers, StoredSurvey, SurveyRecord, SurveyStore};
use burnout_core::evaluator::usable_answer;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::ServiceConfig;
use crate::review::{self, agreement_report, VerdictError, VerdictInput, VerdictStore};
use crate::ServiceError;

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

struct Inner {
    config: ServiceConfig,
    inventory: InventoryConfig,
    surveys: SurveyStore,
    // serializes survey appends; reads go straight to the file
    survey_write: Mutex<()>,
    verdicts: Mutex<VerdictStore>,
}

impl AppState {
    pub fn open(config: ServiceConfig) -> Result<Self, ServiceError> {
        Self::with_inventory(config, InventoryConfig::default_german())
    }

    pub fn with_inventory(config: ServiceConfig, inventory: InventoryConfig) -> Result<Self, ServiceError> {
        config.validate()?;
        let verdicts = VerdictStore::open(config.data_dir.join(review::VERDICT_LOG))?;
        Ok(Self(Arc::new(Inner {
            surveys: SurveyStore::in_dir(&config.data_dir),
            config,
            inventory,
            survey_write: Mutex::new(()),
            verdicts: Mutex::new(verdicts),
        })))
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.0.config
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/surveys", post(submit_survey))
        .route("/surveys/:id", get(get_survey))
        .route("/packets", get(list_packets))
        .route("/packets/:id", get(get_packet))
        .route("/packets/:id/verdicts", post(record_verdict).get(verdict_audit))
        .route("/reports/agreement", get(agreement))
        .route("/reports/table3", get(table3))
        .route("/reports/table4", get(table4))
        .with_state(state)
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl std::fmt::Display) -> Self {
        Self {
            status,
            body: json!({ "error": message.to_string() }),
        }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        log::error!("{e}");
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid request body: {e}")))
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

/// Body of `POST /surveys`. Nothing about the connection is recorded.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveySubmission {
    #[serde(default)]
    pub consent: bool,
    #[serde(default)]
    pub free_text: FreeTextAnswers,
    /// item id -> raw Likert answer
    #[serde(default)]
    pub inventory: BTreeMap<u8, u8>,
    #[serde(default)]
    pub age: Option<u16>,
    #[serde(default)]
    pub gender: Option<Gender>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmitResponse {
    pub respondent_id: String,
    pub excluded_from_test_set: bool,
}

fn invalid(message: &str) -> ApiError {
    ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, message)
}

async fn submit_survey(State(state): State<AppState>, body: Bytes) -> ApiResult<(StatusCode, Json<SubmitResponse>)> {
    let sub: SurveySubmission = parse_body(&body)?;
    if !sub.consent {
        return Err(invalid("consent is required"));
    }
    let Some(age) = sub.age else {
        return Err(invalid("age is required"));
    };
    if !(1..=120).contains(&age) {
        return Err(invalid("age must lie between 1 and 120"));
    }
    let record = SurveyRecord {
        respondent_id: uuid::Uuid::new_v4().simple().to_string(),
        free_text: sub.free_text,
        inventory: sub.inventory,
        age: Some(age),
        gender: sub.gender,
    };
    let inv = &state.0.inventory;
    let score = record.score(&inv.inventory, &inv.keying).map_err(|e| match e {
        OlbiError::Incomplete { missing } => invalid(&format!("incomplete inventory, missing items: {missing:?}"))
            .with("missing_items", json!(missing)),
        OlbiError::OutOfRange { item, .. } | OlbiError::UnknownItem(item) => {
            invalid(&e.to_string()).with("invalid_items", json!([item]))
        }
        other => invalid(&other.to_string()),
    })?;
    let excluded = record.free_text.iter().all(|(_, t)| usable_answer(t).is_none());
    let stored = StoredSurvey {
        record,
        score,
        excluded_from_test_set: excluded,
    };
    {
        let _guard = state.0.survey_write.lock().expect("survey lock");
        state.0.surveys.append(&stored).map_err(ApiError::internal)?;
    }
    log::info!("stored survey {}", stored.record.respondent_id);
    Ok((
        StatusCode::CREATED,
        Json(SubmitResponse {
            respondent_id: stored.record.respondent_id,
            excluded_from_test_set: excluded,
        }),
    ))
}

async fn get_survey(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<StoredSurvey>> {
    state
        .0
        .surveys
        .load()
        .map_err(ApiError::internal)?
        .into_iter()
        .find(|s| s.record.respondent_id == id)
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no survey {id}")))
}

fn packets(state: &AppState) -> ApiResult<Vec<AttributionPacket>> {
    read_packets(&state.0.config.packet_dir()).map_err(ApiError::internal)
}

fn find_packet(state: &AppState, id: &str) -> ApiResult<AttributionPacket> {
    packets(state)?
        .into_iter()
        .find(|p| p.id == id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no packet {id}")))
}

#[derive(Debug, Serialize)]
struct PacketSummary {
    id: String,
    text: String,
    olbi_cutoff: String,
    ai_label: String,
    score: f64,
}

async fn list_packets(State(state): State<AppState>) -> ApiResult<Json<Vec<PacketSummary>>> {
    Ok(Json(
        packets(&state)?
            .into_iter()
            .map(|p| PacketSummary {
                ai_label: p.prediction.label.display_name().to_string(),
                score: p.prediction.score,
                olbi_cutoff: p.olbi_summary,
                text: p.text,
                id: p.id,
            })
            .collect(),
    ))
}

async fn get_packet(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<AttributionPacket>> {
    find_packet(&state, &id).map(Json)
}

fn reviewer(state: &AppState, headers: &HeaderMap) -> ApiResult<String> {
    let unauthorized = || ApiError::new(StatusCode::UNAUTHORIZED, "a valid reviewer invite token is required");
    let token = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .map(str::trim)
        .ok_or_else(unauthorized)?;
    let tokens = review::load_tokens(&state.0.config.data_dir.join(review::REVIEWER_TOKENS))
        .map_err(ApiError::internal)?;
    if tokens.contains(token) {
        Ok(review::reviewer_id(token))
    } else {
        Err(unauthorized())
    }
}

async fn record_verdict(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<review::ReviewVerdict>> {
    let reviewer_id = reviewer(&state, &headers)?;
    let input: VerdictInput = parse_body(&body)?;
    find_packet(&state, &id)?;
    let mut store = state.0.verdicts.lock().expect("verdict lock");
    match store.record(&id, &reviewer_id, input, now_ms()) {
        Ok(v) => Ok(Json(v)),
        Err(e @ VerdictError::Conflict { current, .. }) => {
            Err(ApiError::new(StatusCode::CONFLICT, e).with("current_seq", json!(current)))
        }
        Err(e) => Err(ApiError::internal(e)),
    }
}

async fn verdict_audit(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<Vec<review::ReviewVerdict>>> {
    find_packet(&state, &id)?;
    let store = state.0.verdicts.lock().expect("verdict lock");
    Ok(Json(store.audit(&id).into_iter().cloned().collect()))
}

async fn agreement(State(state): State<AppState>) -> ApiResult<Json<review::AgreementReport>> {
    let packets = packets(&state)?;
    let store = state.0.verdicts.lock().expect("verdict lock");
    Ok(Json(agreement_report(&packets, store.current())))
}

#[derive(Debug, Default, Deserialize)]
struct CutoffQuery {
    /// "working" (default) or "clinical"
    cutoff2: Option<String>,
}

impl CutoffQuery {
    fn clinical(&self) -> ApiResult<bool> {
        match self.cutoff2.as_deref() {
            None | Some("working") => Ok(false),
            Some("clinical") => Ok(true),
            Some(other) => Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                format!("cutoff2 must be 'working' or 'clinical', got '{other}'"),
            )),
        }
    }
}

fn test_set(state: &AppState, clinical: bool) -> ApiResult<burnout_core::evaluator::TestSet> {
    let records = state.0.surveys.records().map_err(ApiError::internal)?;
    if records.is_empty() {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "no surveys have been submitted"));
    }
    assemble_test_set(&records, &state.0.inventory, &rules::evaluation_rules(clinical)).map_err(|e| match e {
        EvalError::Score { .. } => ApiError::new(StatusCode::CONFLICT, e),
        other => ApiError::internal(other),
    })
}

async fn table3(State(state): State<AppState>, Query(q): Query<CutoffQuery>) -> ApiResult<Json<Value>> {
    let test = test_set(&state, q.clinical()?)?;
    let table = distribution_report(&test).map_err(ApiError::internal)?;
    Ok(Json(json!({
        "distribution": table,
        "texts": test.texts.len(),
        "dropped_answers": test.dropped_answers,
        "respondents_without_texts": test.excluded_respondents().count(),
    })))
}

async fn table4(State(state): State<AppState>, Query(q): Query<CutoffQuery>) -> ApiResult<Json<Value>> {
    let test = test_set(&state, q.clinical()?)?;
    let model_dir = state.0.config.model_dir.clone();
    let report = tokio::task::spawn_blocking(move || cross_evaluate(&load_models(&model_dir), &test))
        .await
        .map_err(ApiError::internal)?;
    let mut body = serde_json::to_value(&report).map_err(ApiError::internal)?;
    body["complete"] = json!(report.is_complete());
    Ok(Json(body))
}

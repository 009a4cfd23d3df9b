mod common;

use axum::http::StatusCode;
use burnout_core::olbi::{InventoryConfig, RuleId};
use burnout_core::survey::demo::demo_survey;
use burnout_core::survey::SurveyRecord;
use burnout_service::{AppState, ConfigError, ServiceConfig, ServiceError};
use common::{env, review_fixture, TOKENS};
use serde_json::{json, Value};

fn submission(record: &SurveyRecord) -> Value {
    json!({
        "consent": true,
        "free_text": record.free_text,
        "inventory": record.inventory,
        "age": record.age,
        "gender": record.gender,
    })
}

fn complete_payload() -> Value {
    let records = demo_survey(&InventoryConfig::default_german());
    submission(&records[0])
}

#[tokio::test]
async fn survey_round_trips_into_a_scored_record() {
    let e = env(&[]);
    let (status, body) = e.call("POST", "/surveys", None, Some(complete_payload())).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    let id = body["respondent_id"].as_str().unwrap().to_string();
    assert_eq!(body["excluded_from_test_set"], false);

    let (status, stored) = e.call("GET", &format!("/surveys/{id}"), None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(stored["respondent_id"], id.as_str());
    assert!(stored["score"]["total"].as_u64().unwrap() >= 16);
    let (status, _) = e.call("GET", "/surveys/nobody", None, None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn stored_records_carry_no_network_metadata() {
    let e = env(&[]);
    e.call("POST", "/surveys", None, Some(complete_payload())).await;
    let line = std::fs::read_to_string(e.data().join("surveys.jsonl")).unwrap();
    let stored: Value = serde_json::from_str(line.trim()).unwrap();
    let mut keys: Vec<&str> = stored.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        ["age", "excluded_from_test_set", "free_text", "gender", "inventory", "respondent_id", "score"]
    );
    for banned in ["ip", "addr", "address", "user_agent", "user-agent", "host"] {
        assert!(!line.to_lowercase().contains(&format!("\"{banned}\"")));
    }
}

#[tokio::test]
async fn incomplete_inventory_names_the_missing_item() {
    let e = env(&[]);
    let mut payload = complete_payload();
    payload["inventory"].as_object_mut().unwrap().remove("7");
    let (status, body) = e.call("POST", "/surveys", None, Some(payload)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["missing_items"], json!([7]));
    assert!(body["error"].as_str().unwrap().contains('7'));
    // nothing was written
    assert!(!e.data().join("surveys.jsonl").exists());
}

#[tokio::test]
async fn rejects_missing_consent_bad_answers_and_unknown_fields() {
    let e = env(&[]);
    let mut no_consent = complete_payload();
    no_consent["consent"] = json!(false);
    let (status, body) = e.call("POST", "/surveys", None, Some(no_consent)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(body["error"].as_str().unwrap().contains("consent"));

    let mut out_of_range = complete_payload();
    out_of_range["inventory"]["3"] = json!(5);
    let (status, body) = e.call("POST", "/surveys", None, Some(out_of_range)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["invalid_items"], json!([3]));

    let mut no_age = complete_payload();
    no_age.as_object_mut().unwrap().remove("age");
    assert_eq!(e.call("POST", "/surveys", None, Some(no_age)).await.0, StatusCode::UNPROCESSABLE_ENTITY);

    let mut extra = complete_payload();
    extra["client_ip"] = json!("10.0.0.1");
    assert_eq!(e.call("POST", "/surveys", None, Some(extra)).await.0, StatusCode::BAD_REQUEST);
    assert!(!e.data().join("surveys.jsonl").exists());
}

#[tokio::test]
async fn empty_answers_are_scored_but_flagged() {
    let e = env(&[]);
    let mut payload = complete_payload();
    payload["free_text"] = json!({"q1": "", "q2": " ", "q3": "", "q4": ""});
    let (status, body) = e.call("POST", "/surveys", None, Some(payload)).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["excluded_from_test_set"], true);

    let (_, t3) = e.call("GET", "/reports/table3", None, None).await;
    assert_eq!(t3["distribution"]["respondents"], 1);
    assert_eq!(t3["texts"], 0);
    assert_eq!(t3["respondents_without_texts"], 1);
}

#[tokio::test]
async fn table3_over_submitted_demo_survey() {
    let e = env(&[]);
    let (status, _) = e.call("GET", "/reports/table3", None, None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    for r in demo_survey(&InventoryConfig::default_german()) {
        assert_eq!(e.call("POST", "/surveys", None, Some(submission(&r))).await.0, StatusCode::CREATED);
    }
    let (status, t3) = e.call("GET", "/reports/table3", None, None).await;
    assert_eq!(status, StatusCode::OK, "{t3}");
    let rows: Vec<(String, u64, u64)> = t3["distribution"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["rule"].as_str().unwrap().to_string(),
                r["burnout"].as_u64().unwrap(),
                r["no_burnout"].as_u64().unwrap(),
            )
        })
        .collect();
    assert_eq!(
        rows,
        [
            ("cutoff1".into(), 4, 13),
            ("cutoff2_working".into(), 2, 15),
            ("cutoff3_total".into(), 7, 10)
        ]
    );
    assert_eq!(t3["texts"], 66);
    let (_, clinical) = e.call("GET", "/reports/table3?cutoff2=clinical", None, None).await;
    assert_eq!(clinical["distribution"]["rows"][1]["rule"], "cutoff2_clinical");
    assert_eq!(e.call("GET", "/reports/table3?cutoff2=x", None, None).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn table4_reports_missing_artifacts_as_gaps() {
    let e = env(&[]);
    for r in demo_survey(&InventoryConfig::default_german()) {
        e.call("POST", "/surveys", None, Some(submission(&r))).await;
    }
    let (status, t4) = e.call("GET", "/reports/table4", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(t4["complete"], false);
    let rows = t4["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["error"].is_string() && r["cells"].as_array().unwrap().is_empty()));
    let rules: Vec<RuleId> = serde_json::from_value(t4["rules"].clone()).unwrap();
    assert_eq!(rules, [RuleId::Cutoff1, RuleId::Cutoff2Working, RuleId::Cutoff3Total]);
}

#[tokio::test]
async fn packets_are_listed_and_fetched() {
    let fixture = review_fixture();
    let packets: Vec<_> = fixture.iter().map(|(p, _)| p.clone()).collect();
    let e = env(&packets);
    let (_, list) = e.call("GET", "/packets", None, None).await;
    assert_eq!(list.as_array().unwrap().len(), 4);
    assert_eq!(list[2]["olbi_cutoff"], "2/3 burnout");
    let (status, p) = e.call("GET", &format!("/packets/{}", packets[1].id), None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(p["text"], packets[1].text.as_str());
    assert_eq!(e.call("GET", "/packets/ffff", None, None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn verdicts_need_a_token_and_an_existing_packet() {
    let fixture = review_fixture();
    let e = env(&[fixture[0].0.clone()]);
    let uri = format!("/packets/{}/verdicts", fixture[0].0.id);
    let v = json!({"agree": true});
    assert_eq!(e.call("POST", &uri, None, Some(v.clone())).await.0, StatusCode::UNAUTHORIZED);
    assert_eq!(e.call("POST", &uri, Some("forged"), Some(v.clone())).await.0, StatusCode::UNAUTHORIZED);
    assert_eq!(
        e.call("POST", "/packets/ffff/verdicts", Some(TOKENS[0]), Some(v.clone())).await.0,
        StatusCode::NOT_FOUND
    );
    assert_eq!(e.call("POST", &uri, Some(TOKENS[0]), Some(json!({}))).await.0, StatusCode::BAD_REQUEST);
    let (status, stored) = e.call("POST", &uri, Some(TOKENS[0]), Some(v)).await;
    assert_eq!(status, StatusCode::OK);
    // the raw token is never persisted
    let log = std::fs::read_to_string(e.data().join("verdicts.jsonl")).unwrap();
    assert!(!log.contains(TOKENS[0]));
    assert_eq!(stored["reviewer_id"].as_str().unwrap().len(), 16);
}

#[tokio::test]
async fn resubmission_overwrites_with_audit_and_compare_and_swap() {
    let fixture = review_fixture();
    let id = fixture[0].0.id.clone();
    let e = env(&[fixture[0].0.clone()]);
    let uri = format!("/packets/{id}/verdicts");
    let (_, first) = e
        .call("POST", &uri, Some(TOKENS[0]), Some(json!({"agree": false, "reason": "kein Arbeitsbezug", "expected_seq": 0})))
        .await;
    let seq = first["seq"].as_u64().unwrap();

    // a second write expecting "no verdict yet" loses the race
    let (status, body) = e
        .call("POST", &uri, Some(TOKENS[0]), Some(json!({"agree": true, "expected_seq": 0})))
        .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["current_seq"], seq);

    let (status, second) = e
        .call("POST", &uri, Some(TOKENS[0]), Some(json!({"agree": true, "expected_seq": seq})))
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(second["replaces"], seq);

    let (_, report) = e.call("GET", "/reports/agreement", None, None).await;
    assert_eq!(report["packets"][0]["verdicts"], 1);
    assert_eq!(report["packets"][0]["agreement"], 1.0);

    let (_, audit) = e.call("GET", &uri, None, None).await;
    let audit = audit.as_array().unwrap();
    assert_eq!(audit.len(), 2);
    assert_eq!(audit[0]["agree"], false);
    assert_eq!(audit[0]["reason"], "kein Arbeitsbezug");
}

#[tokio::test]
async fn verdict_log_survives_restart() {
    let fixture = review_fixture();
    let e = env(&[fixture[0].0.clone()]);
    let uri = format!("/packets/{}/verdicts", fixture[0].0.id);
    e.call("POST", &uri, Some(TOKENS[1]), Some(json!({"agree": false}))).await;
    let restarted = common::Env {
        app: burnout_service::router(AppState::open(ServiceConfig::new(0, e.data(), e.models())).unwrap()),
        dir: e.dir,
    };
    let (_, report) = restarted.call("GET", "/reports/agreement", None, None).await;
    assert_eq!(report["packets"][0]["agreement"], 0.0);
}

#[tokio::test]
async fn agreement_without_verdicts_is_null() {
    let fixture = review_fixture();
    let e = env(&[fixture[0].0.clone()]);
    let (status, report) = e.call("GET", "/reports/agreement", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(report["packets"][0]["verdicts"], 0);
    assert!(report["packets"][0]["agreement"].is_null());
}

#[tokio::test]
async fn agreement_report_reproduces_the_review_table() {
    let fixture = review_fixture();
    let e = env(&fixture.iter().map(|(p, _)| p.clone()).collect::<Vec<_>>());
    for (p, votes) in &fixture {
        for (token, agree) in TOKENS.iter().zip(votes) {
            let body = json!({"agree": agree, "reason": (!agree).then_some("Arbeitskontext fehlt")});
            let (status, _) = e.call("POST", &format!("/packets/{}/verdicts", p.id), Some(token), Some(body)).await;
            assert_eq!(status, StatusCode::OK);
        }
    }
    let (_, report) = e.call("GET", "/reports/agreement", None, None).await;
    let rows = report["packets"].as_array().unwrap();
    let got: Vec<f64> = rows.iter().map(|r| r["agreement"].as_f64().unwrap()).collect();
    assert_eq!(got, [1.0, 0.8, 1.0, 0.0]);
    let labels: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r["olbi_cutoff"].as_str().unwrap(), r["ai_label"].as_str().unwrap()))
        .collect();
    assert_eq!(
        labels,
        [
            ("No burnout", "No burnout"),
            ("burnout", "burnout"),
            ("2/3 burnout", "No burnout"),
            ("No burnout", "burnout")
        ]
    );
    assert_eq!(rows[3]["reasons"].as_array().unwrap().len(), 5);
    assert_eq!(rows[1]["reasons"], json!(["Arbeitskontext fehlt"]));
}

#[test]
fn missing_model_dir_is_a_startup_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no-models-here");
    let err = AppState::open(ServiceConfig::new(0, dir.path().join("data"), &missing)).err().unwrap();
    assert!(matches!(err, ServiceError::Config(ConfigError::MissingModelDir(_))));
    assert!(err.to_string().contains(&missing.display().to_string()));
}

#[test]
fn configuration_comes_from_the_environment() {
    let vars = |k: &str| match k {
        "BURNOUT_PORT" => Some("9123".to_string()),
        "BURNOUT_DATA_DIR" => Some("/srv/burnout/data".to_string()),
        _ => None,
    };
    let c = ServiceConfig::from_lookup(vars).unwrap();
    assert_eq!(c, ServiceConfig::new(9123, "/srv/burnout/data", "models"));
    let bad = ServiceConfig::from_lookup(|k| (k == "BURNOUT_PORT").then(|| "eighty".to_string()));
    assert!(matches!(bad, Err(ConfigError::Port(_))));
}

#[tokio::test]
async fn serves_real_http() {
    let fixture = review_fixture();
    let e = env(&[fixture[1].0.clone()]);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = e.app.clone();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });

    let client = reqwest::Client::new();
    let base = format!("http://{addr}");
    let resp = client.post(format!("{base}/surveys")).json(&complete_payload()).send().await.unwrap();
    assert_eq!(resp.status().as_u16(), 201);
    let id = resp.json::<Value>().await.unwrap()["respondent_id"].as_str().unwrap().to_string();
    let got: Value = client.get(format!("{base}/surveys/{id}")).send().await.unwrap().json().await.unwrap();
    assert_eq!(got["respondent_id"], id.as_str());

    let uri = format!("{base}/packets/{}/verdicts", fixture[1].0.id);
    for (token, agree) in TOKENS.iter().zip(fixture[1].1) {
        let r = client.post(&uri).bearer_auth(token).json(&json!({"agree": agree})).send().await.unwrap();
        assert_eq!(r.status().as_u16(), 200);
    }
    let report: Value = client.get(format!("{base}/reports/agreement")).send().await.unwrap().json().await.unwrap();
    assert_eq!(report["packets"][0]["agreement"], 0.8);
}

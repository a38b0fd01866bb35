use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use kbshell_cli::http::router;
use kbshell_cli::{KbRegistry, SessionService};
use kbshell_core::Transcript;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(Arc::new(SessionService::new(KbRegistry::builtin())), None)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn new_session(app: &Router) -> String {
    let (status, body) = call(app, "POST", "/api/sessions", Some(json!({ "kb": "sanjeevani" }))).await;
    assert_eq!(status, StatusCode::CREATED);
    body["id"].as_str().unwrap().to_owned()
}

#[tokio::test]
async fn lists_bundled_kb() {
    let (status, body) = call(&app(), "GET", "/api/kbs", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!([{ "name": "sanjeevani", "title": "Sanjeevani" }]));
}

#[tokio::test]
async fn create_returns_first_question() {
    let app = app();
    let (status, body) = call(&app, "POST", "/api/sessions", Some(json!({ "kb": "sanjeevani" }))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["status"], "awaiting_answer");
    assert_eq!(body["question"]["param"], "disease");
    assert_eq!(body["question"]["values"], json!(["diabetes"]));
    assert_eq!(body["advice"], json!([]));
    assert_eq!(body["finished_reason"], Value::Null);
}

#[tokio::test]
async fn unknown_kb_and_session_are_404() {
    let app = app();
    let (status, body) = call(&app, "POST", "/api/sessions", Some(json!({ "kb": "nope" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(body["error"].is_string());
    for (method, uri, body) in [
        ("GET", "/api/sessions/deadbeef", None),
        ("GET", "/api/sessions/deadbeef/transcript", None),
        (
            "POST",
            "/api/sessions/deadbeef/answer",
            Some(json!({ "value": "x" })),
        ),
    ] {
        assert_eq!(
            call(&app, method, uri, body).await.0,
            StatusCode::NOT_FOUND,
            "{uri}"
        );
    }
}

#[tokio::test]
async fn invalid_answer_is_422_and_leaves_state_alone() {
    let app = app();
    let id = new_session(&app).await;
    let (_, before) = call(&app, "GET", &format!("/api/sessions/{id}"), None).await;
    let (status, body) = call(
        &app,
        "POST",
        &format!("/api/sessions/{id}/answer"),
        Some(json!({ "value": "cancer" })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["allowed"], json!(["diabetes"]));
    let (_, after) = call(&app, "GET", &format!("/api/sessions/{id}"), None).await;
    assert_eq!(before, after);
}

#[tokio::test]
async fn get_is_idempotent() {
    let app = app();
    let id = new_session(&app).await;
    let uri = format!("/api/sessions/{id}");
    let first = call(&app, "GET", &uri, None).await;
    let second = call(&app, "GET", &uri, None).await;
    assert_eq!(first, second);
}

#[tokio::test]
async fn answering_finished_session_is_409() {
    let app = app();
    let id = new_session(&app).await;
    let uri = format!("/api/sessions/{id}/answer");
    call(&app, "POST", &uri, Some(json!({ "value": "diabetes" }))).await;
    let (status, body) = call(&app, "POST", &uri, Some(json!({ "value": "massage" }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "finished");
    assert_eq!(body["finished_reason"], "completed");
    assert_eq!(body["advice"].as_array().unwrap().len(), 2);
    let (status, _) = call(&app, "POST", &uri, Some(json!({ "value": "massage" }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn transcript_matches_cli_golden() {
    let app = app();
    let id = new_session(&app).await;
    for value in ["diabetes", "naturalcare"] {
        let (status, _) = call(
            &app,
            "POST",
            &format!("/api/sessions/{id}/answer"),
            Some(json!({ "value": value })),
        )
        .await;
        assert_eq!(status, StatusCode::OK);
    }
    let (status, body) = call(&app, "GET", &format!("/api/sessions/{id}/transcript"), None).await;
    assert_eq!(status, StatusCode::OK);
    let transcript: Transcript = serde_json::from_value(body).unwrap();
    let golden = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../golden/naturalcare.txt"
    ))
    .unwrap();
    assert_eq!(transcript.to_canonical(), golden);
}

#[tokio::test]
async fn advice_in_state_matches_transcript() {
    let app = app();
    let id = new_session(&app).await;
    let answer = format!("/api/sessions/{id}/answer");
    call(&app, "POST", &answer, Some(json!({ "value": "diabetes" }))).await;
    let (_, state) = call(&app, "POST", &answer, Some(json!({ "value": "acupuncture" }))).await;
    let (_, body) = call(&app, "GET", &format!("/api/sessions/{id}/transcript"), None).await;
    let transcript: Transcript = serde_json::from_value(body).unwrap();
    assert_eq!(state["advice"], json!(transcript.advice().collect::<Vec<_>>()));
}

#[tokio::test]
async fn static_fallback_serves_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<p>hi</p>").unwrap();
    let app = router(
        Arc::new(SessionService::new(KbRegistry::builtin())),
        Some(dir.path().to_path_buf()),
    );
    let resp = app
        .oneshot(Request::get("/index.html").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    assert_eq!(&bytes[..], b"<p>hi</p>");
}

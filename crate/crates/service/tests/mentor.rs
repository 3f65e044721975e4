mod common;

use axum::http::{HeaderMap, Method, StatusCode};
use axum::routing::post;
use axum::{Json, Router};
use cadenza_core::explainer::MentorConfig;
use cadenza_service::mentor_http::{ChatRequest, ChatResponse};
use serde_json::json;

async fn fake_endpoint(headers: HeaderMap, Json(req): Json<ChatRequest>) -> Result<Json<ChatResponse>, StatusCode> {
    if headers.get("authorization").and_then(|v| v.to_str().ok()) != Some("Bearer sekrit") {
        return Err(StatusCode::UNAUTHORIZED);
    }
    assert_eq!(req.messages[0].role, "system");
    let q = &req.messages.last().unwrap().content;
    Ok(Json(ChatResponse { content: format!("live answer about {q}") }))
}

async fn spawn_fake() -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, Router::new().route("/chat", post(fake_endpoint))).await.unwrap() });
    format!("http://{addr}/chat")
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn live_endpoint_answers() {
    let url = spawn_fake().await;
    let a = common::app_with(MentorConfig { endpoint: Some(url), api_key: Some("sekrit".into()), ..MentorConfig::default() });
    let r = a.call(Method::POST, "/mentor", Some(json!({"query": "dominant"}))).await;
    assert_eq!(r.status, StatusCode::OK);
    let v = r.json();
    assert_eq!(v["source"], "live");
    assert_eq!(v["response"], "live answer about dominant");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn failing_endpoint_falls_back_to_stub() {
    let url = spawn_fake().await;
    // wrong key → 401 from the endpoint
    let a = common::app_with(MentorConfig { endpoint: Some(url), api_key: Some("wrong".into()), ..MentorConfig::default() });
    let v = a.call(Method::POST, "/mentor", Some(json!({"query": "circle of fifths"}))).await.json();
    assert_eq!(v["source"], "stub");
    assert!(v["warning"].as_str().unwrap().contains("401"));

    // nothing listening
    let a = common::app_with(MentorConfig {
        endpoint: Some("http://127.0.0.1:9/chat".into()),
        timeout_secs: 2,
        ..MentorConfig::default()
    });
    let v = a.call(Method::POST, "/mentor", Some(json!({"query": "trill"}))).await.json();
    assert_eq!(v["source"], "stub");
    assert!(!v["response"].as_str().unwrap().is_empty());
}

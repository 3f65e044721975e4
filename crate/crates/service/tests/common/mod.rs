#![allow(dead_code)]

use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use cadenza_core::corpus::CorpusDb;
use cadenza_core::explainer::MentorConfig;
use cadenza_core::midi::write_score;
use cadenza_core::theory::{beats, Measure, MeasureSource, NoteEvent, Pitch, Score};
use cadenza_service::{router, AppState, ServiceConfig};
use serde_json::Value;
use tower::ServiceExt;

pub struct App {
    pub router: Router,
    pub state: Arc<AppState>,
    pub dir: tempfile::TempDir,
}

pub fn app_with(mentor: MentorConfig) -> App {
    let dir = tempfile::tempdir().unwrap();
    let state = AppState::new(CorpusDb::builtin(), ServiceConfig { data_dir: dir.path().to_path_buf(), mentor });
    App { router: router(state.clone()), state, dir }
}

pub fn app() -> App {
    app_with(MentorConfig::default())
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: Option<String>,
    pub bytes: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.bytes)))
    }
}

impl App {
    pub async fn send(&self, req: Request<Body>) -> Reply {
        let resp = self.router.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let content_type = resp.headers().get("content-type").map(|v| v.to_str().unwrap().to_string());
        let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec();
        Reply { status, content_type, bytes }
    }

    pub async fn call(&self, method: Method, path: &str, body: Option<Value>) -> Reply {
        let mut b = Request::builder().method(method).uri(format!("/api/v1{path}"));
        let body = match body {
            Some(v) => {
                b = b.header("content-type", "application/json");
                Body::from(v.to_string())
            }
            None => Body::empty(),
        };
        self.send(b.body(body).unwrap()).await
    }

    pub async fn upload(&self, id: &str, file_name: &str, bytes: &[u8]) -> Reply {
        let boundary = "cadenzaboundary7";
        let mut body = Vec::new();
        body.extend_from_slice(
            format!(
                "--{boundary}\r\nContent-Disposition: form-data; name=\"file\"; filename=\"{file_name}\"\r\nContent-Type: application/octet-stream\r\n\r\n"
            )
            .as_bytes(),
        );
        body.extend_from_slice(bytes);
        body.extend_from_slice(format!("\r\n--{boundary}--\r\n").as_bytes());
        let req = Request::builder()
            .method(Method::POST)
            .uri(format!("/api/v1/sessions/{id}/upload"))
            .header("content-type", format!("multipart/form-data; boundary={boundary}"))
            .body(Body::from(body))
            .unwrap();
        self.send(req).await
    }

    pub async fn create(&self, config: Value) -> String {
        let r = self.call(Method::POST, "/sessions", Some(config)).await;
        assert_eq!(r.status, StatusCode::CREATED);
        r.json()["id"].as_str().unwrap().to_string()
    }
}

/// D major arpeggio then G major arpeggio, one bar each.
pub fn demo_score() -> Score {
    let m = |i: usize, ps: [u8; 4]| {
        let evs = ps
            .iter()
            .enumerate()
            .map(|(b, &p)| NoteEvent::note(Pitch::new(p).unwrap(), beats(b as i64, 1), beats(1, 1)))
            .collect();
        Measure::from_events(i, evs, MeasureSource::Input).unwrap()
    };
    Score::melody(vec![m(0, [62, 66, 69, 74]), m(1, [67, 71, 74, 79])], 120).unwrap()
}

pub fn demo_midi() -> Vec<u8> {
    write_score(&demo_score()).unwrap()
}

/// Two notes struck together on one track.
pub fn polyphonic_midi() -> Vec<u8> {
    let mut b = b"MThd\0\0\0\x06\0\0\0\x01\x01\xe0MTrk\0\0\0\x15".to_vec();
    b.extend_from_slice(&[0x00, 0x90, 0x3C, 0x50, 0x00, 0x90, 0x40, 0x50, 0x83, 0x60, 0x80, 0x3C, 0x00, 0x00, 0x80, 0x40, 0x00, 0x00, 0xFF, 0x2F, 0x00]);
    b
}

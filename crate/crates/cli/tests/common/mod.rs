#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use axum::body::{to_bytes, Body};
use axum::http::{Method, Request, StatusCode};
use cadenza_core::corpus::CorpusDb;
use cadenza_core::explainer::MentorConfig;
use cadenza_core::midi::write_score;
use cadenza_core::theory::{beats, Measure, MeasureSource, NoteEvent, Pitch, Score};
use cadenza_service::{router, AppState, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn demo_wav() -> PathBuf {
    fixture("demo.wav")
}

pub fn cadenza(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cadenza")).args(args).output().expect("spawn cadenza")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
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

pub fn polyphonic_midi() -> Vec<u8> {
    let mut b = b"MThd\0\0\0\x06\0\0\0\x01\x01\xe0MTrk\0\0\0\x15".to_vec();
    b.extend_from_slice(&[0x00, 0x90, 0x3C, 0x50, 0x00, 0x90, 0x40, 0x50, 0x83, 0x60, 0x80, 0x3C, 0x00, 0x00, 0x80, 0x40, 0x00, 0x00, 0xFF, 0x2F, 0x00]);
    b
}

async fn send(r: &axum::Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = r.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec())
}

async fn call(r: &axum::Router, method: Method, path: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let mut b = Request::builder().method(method).uri(format!("/api/v1{path}"));
    if body.is_some() {
        b = b.header("content-type", "application/json");
    }
    send(r, b.body(body.map_or_else(Body::empty, |v| Body::from(v.to_string()))).unwrap()).await
}

/// The service route for `continue`: create, upload, process, N continues, end, export.
pub async fn service_export(file_name: &str, bytes: &[u8], seed: u64, phrases: usize, bpm: Option<u16>) -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    let state = AppState::new(
        CorpusDb::builtin(),
        ServiceConfig { data_dir: dir.path().to_path_buf(), mentor: MentorConfig::default() },
    );
    let r = router(state);
    let (s, b) = call(&r, Method::POST, "/sessions", Some(json!({ "seed": seed }))).await;
    assert_eq!(s, StatusCode::CREATED);
    let id = serde_json::from_slice::<Value>(&b).unwrap()["id"].as_str().unwrap().to_string();

    let boundary = "cadenzaboundary7";
    let mut body = format!(
        "--{boundary}\r\nContent-Disposition: form-data; name=\"file\"; filename=\"{file_name}\"\r\nContent-Type: application/octet-stream\r\n\r\n"
    )
    .into_bytes();
    body.extend_from_slice(bytes);
    body.extend_from_slice(format!("\r\n--{boundary}--\r\n").as_bytes());
    let req = Request::builder()
        .method(Method::POST)
        .uri(format!("/api/v1/sessions/{id}/upload"))
        .header("content-type", format!("multipart/form-data; boundary={boundary}"))
        .body(Body::from(body))
        .unwrap();
    assert_eq!(send(&r, req).await.0, StatusCode::OK);

    let process = bpm.map(|b| json!({ "bpm": b }));
    assert_eq!(call(&r, Method::POST, &format!("/sessions/{id}/process"), process).await.0, StatusCode::OK);
    for _ in 0..phrases {
        assert_eq!(call(&r, Method::POST, &format!("/sessions/{id}/continue"), None).await.0, StatusCode::OK);
    }
    assert_eq!(call(&r, Method::POST, &format!("/sessions/{id}/end"), None).await.0, StatusCode::OK);
    let (s, midi) = call(&r, Method::GET, &format!("/sessions/{id}/export"), None).await;
    assert_eq!(s, StatusCode::OK);
    midi
}

/// A tonic-anchored melody in a random key, built from corpus rhythms.
pub fn random_melody(seed: u64, db: &CorpusDb) -> Score {
    use cadenza_core::corpus::SlotKind;
    use cadenza_core::theory::Key;
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let key = Key::all().nth(rng.random_range(0..24)).unwrap();
    let scale = key.diatonic_scale();
    let tonic = key.tonic.value() as i32;
    let mut measures = Vec::new();
    for i in 0..rng.random_range(1..=3) {
        let pattern = &db.rhythms[rng.random_range(0..db.rhythms.len())];
        let mut evs = Vec::new();
        let mut step = 0usize;
        for (onset, dur, kind) in pattern.timeline() {
            if kind == SlotKind::Rest {
                evs.push(NoteEvent::rest(onset, dur));
                continue;
            }
            let degree = if i == 0 { [0, 2, 4, 0][step % 4] } else { rng.random_range(0..7) };
            let pc = scale[degree].value() as i32;
            let midi = 60 + tonic + (pc - tonic).rem_euclid(12);
            evs.push(NoteEvent::note(Pitch::from_i32(midi).unwrap(), onset, dur));
            step += 1;
        }
        measures.push(Measure::from_events(i, evs, MeasureSource::Input).unwrap());
    }
    Score::melody(measures, rng.random_range(60..=160)).unwrap()
}

pub fn generated(seed: u64, phrases: usize, end: bool, db: &CorpusDb) -> cadenza_core::piece::Piece {
    let cfg = cadenza_core::generator::GenerationConfig::with_seed(seed);
    let mut p = cadenza_core::piece::Piece::new(random_melody(seed, db), db, cfg).unwrap();
    for _ in 0..phrases {
        p.continue_phrase(db).unwrap();
    }
    if end {
        p.end().unwrap();
    }
    p
}

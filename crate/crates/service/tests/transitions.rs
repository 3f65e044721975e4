mod common;

use axum::http::{Method, StatusCode};
use common::{app, demo_midi, App};
use serde_json::json;

const STATES: [&str; 5] = ["empty", "uploaded", "analyzed", "extended", "ended"];
const OPS: [&str; 10] = ["upload", "process", "continue", "end", "score", "export", "explain", "alternatives", "edit", "save"];

/// The legal moves, written out by hand.
fn expected(state: &str, op: &str) -> Option<&'static str> {
    let stay = |s: &str| -> &'static str { STATES.iter().find(|x| **x == s).copied().unwrap() };
    match (state, op) {
        (_, "save") => Some(stay(state)),
        ("empty", "upload") => Some("uploaded"),
        ("uploaded", "process") => Some("analyzed"),
        ("analyzed" | "extended", "continue") => Some("extended"),
        ("analyzed" | "extended", "end") => Some("ended"),
        ("analyzed" | "extended" | "ended", "score" | "export" | "explain" | "alternatives") => Some(stay(state)),
        ("extended", "edit") => Some("extended"),
        _ => None,
    }
}

async fn session_in(a: &App, state: &str) -> String {
    let id = a.create(json!({"seed": 4, "substitution_probability": 0.0})).await;
    let steps: &[&str] = match state {
        "empty" => &[],
        "uploaded" => &["upload"],
        "analyzed" => &["upload", "process"],
        "extended" => &["upload", "process", "continue"],
        "ended" => &["upload", "process", "continue", "end"],
        _ => unreachable!(),
    };
    for s in steps {
        let r = run(a, &id, s).await;
        assert_eq!(r, StatusCode::OK, "setup {s}");
    }
    id
}

async fn run(a: &App, id: &str, op: &str) -> StatusCode {
    let p = |s: &str| format!("/sessions/{id}/{s}");
    match op {
        "upload" => a.upload(id, "demo.mid", &demo_midi()).await.status,
        "process" => a.call(Method::POST, &p("process"), None).await.status,
        "continue" => a.call(Method::POST, &p("continue"), None).await.status,
        "end" => a.call(Method::POST, &p("end"), None).await.status,
        "score" => a.call(Method::GET, &p("score"), None).await.status,
        "export" => a.call(Method::GET, &p("export"), None).await.status,
        "explain" => a.call(Method::GET, &p("explanation?scope=piece&level=advanced"), None).await.status,
        "alternatives" => a.call(Method::GET, &p("measures/2/alternatives"), None).await.status,
        "edit" => a.call(Method::PATCH, &p("measures/3"), Some(json!({"field": "rhythm", "value": 5}))).await.status,
        "save" => a.call(Method::POST, &p("save"), None).await.status,
        _ => unreachable!(),
    }
}

async fn state_of(a: &App, id: &str) -> String {
    a.call(Method::GET, &format!("/sessions/{id}"), None).await.json()["state"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn full_transition_matrix() {
    let a = app();
    let mut checked = 0;
    for state in STATES {
        for op in OPS {
            let id = session_in(&a, state).await;
            let before = a.call(Method::GET, &format!("/sessions/{id}/export"), None).await.bytes;
            let status = run(&a, &id, op).await;
            let after = state_of(&a, &id).await;
            match expected(state, op) {
                Some(next) => {
                    // alternatives on an input measure is a legal read that is refused per measure
                    let refused = state == "analyzed" && op == "alternatives";
                    let want = if refused { StatusCode::NOT_FOUND } else { StatusCode::OK };
                    assert_eq!(status, want, "{state} × {op}");
                    assert_eq!(after, next, "{state} × {op}");
                }
                None => {
                    assert_eq!(status, StatusCode::CONFLICT, "{state} × {op} must be rejected");
                    assert_eq!(after, state, "{state} × {op} changed state");
                    let now = a.call(Method::GET, &format!("/sessions/{id}/export"), None).await.bytes;
                    assert_eq!(now, before, "{state} × {op} changed the score");
                }
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 50);
}

#[test]
fn model_table_matches_legal_moves() {
    use cadenza_service::{Op, SessionState};
    let name = |s: SessionState| s.to_string();
    for s in SessionState::ALL {
        for op in Op::ALL {
            assert_eq!(op.allowed_in(s), expected(&name(s), &op.to_string()).is_some(), "{s} × {op}");
        }
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_on_one_session_are_serialized() {
    let a = std::sync::Arc::new(app());
    let id = session_in(&a, "analyzed").await;
    let mut handles = Vec::new();
    for _ in 0..8 {
        let (a, id) = (a.clone(), id.clone());
        handles.push(tokio::spawn(async move { run(&a, &id, "continue").await }));
    }
    let mut ok = 0;
    for h in handles {
        if h.await.unwrap() == StatusCode::OK {
            ok += 1;
        }
    }
    assert_eq!(ok, 8);
    let score = a.call(Method::GET, &format!("/sessions/{id}/score"), None).await.json();
    let phrases = score["phrases"].as_array().unwrap();
    assert_eq!(phrases.len(), 8);
    // phrases are contiguous: each starts where the previous ended
    let mut next = 2;
    for p in phrases {
        assert_eq!(p["first_measure"], next);
        next += p["length"].as_u64().unwrap();
    }
    assert_eq!(score["measure_count"], next);
    // the same clicks made one at a time give the same piece
    let serial = session_in(&a, "analyzed").await;
    for _ in 0..8 {
        run(&a, &serial, "continue").await;
    }
    let x = a.call(Method::GET, &format!("/sessions/{id}/export"), None).await.bytes;
    let y = a.call(Method::GET, &format!("/sessions/{serial}/export"), None).await.bytes;
    assert_eq!(x, y);
}

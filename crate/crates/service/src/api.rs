use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use cadenza_core::corpus::CorpusDb;
use cadenza_core::explainer::{mentor_ask, ExplanationDoc, Level, MentorBackend, MentorConfig, MentorExchange, Scope};
use cadenza_core::generator::GenerationConfig;
use cadenza_core::piece::{Alternatives, EditValue};
use serde::{Deserialize, Serialize};

use crate::doc::{AnalysisDoc, MeasureDoc, PhraseDoc, ScoreDoc};
use crate::error::ServiceError;
use crate::mentor_http::HttpMentor;
use crate::session::{Session, SessionSummary};
use crate::store::Store;

pub const OPENAPI: &str = include_str!("../../../docs/openapi.json");
const MAX_UPLOAD: usize = 64 * 1024 * 1024;

pub struct AppState {
    pub db: CorpusDb,
    pub store: Store,
    pub mentor: MentorConfig,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub mentor: MentorConfig,
}

impl ServiceConfig {
    /// Reads COMPOSEON_DATA_DIR, COMPOSEON_MENTOR_URL and COMPOSEON_MENTOR_KEY.
    pub fn from_env() -> Self {
        let var = |k: &str| std::env::var(k).ok().filter(|v| !v.trim().is_empty());
        ServiceConfig {
            data_dir: var("COMPOSEON_DATA_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("cadenza-data")),
            mentor: MentorConfig {
                endpoint: var("COMPOSEON_MENTOR_URL"),
                api_key: var("COMPOSEON_MENTOR_KEY"),
                ..MentorConfig::default()
            },
        }
    }
}

impl AppState {
    pub fn new(db: CorpusDb, config: ServiceConfig) -> Arc<AppState> {
        Arc::new(AppState {
            db,
            store: Store::new(config.data_dir),
            mentor: config.mentor,
            sessions: RwLock::new(HashMap::new()),
        })
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.sessions
            .read()
            .expect("session table lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(format!("session {id}")))
    }

    fn insert(&self, s: Session) -> Arc<Mutex<Session>> {
        let id = s.id.clone();
        let cell = Arc::new(Mutex::new(s));
        self.sessions.write().expect("session table lock").insert(id, cell.clone());
        cell
    }
}

/// Runs `f` on a blocking thread under the session's own lock, so work on
/// one session is serialized and never stalls the others.
async fn with_session<T, F>(state: &Arc<AppState>, id: &str, f: F) -> Result<T, ServiceError>
where
    T: Send + 'static,
    F: FnOnce(&mut Session, &AppState) -> Result<T, ServiceError> + Send + 'static,
{
    let cell = state.session(id)?;
    let state = state.clone();
    tokio::task::spawn_blocking(move || {
        let mut guard = cell.lock().unwrap_or_else(|p| p.into_inner());
        f(&mut guard, &state)
    })
    .await
    .map_err(|e| ServiceError::Io(format!("worker failed: {e}")))?
}

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/health", get(health))
        .route("/openapi.json", get(openapi))
        .route("/mentor", post(mentor))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/upload", post(upload))
        .route("/sessions/{id}/process", post(process))
        .route("/sessions/{id}/continue", post(continue_phrase))
        .route("/sessions/{id}/end", post(end_piece))
        .route("/sessions/{id}/score", get(score))
        .route("/sessions/{id}/export", get(export))
        .route("/sessions/{id}/explanation", get(explanation))
        .route("/sessions/{id}/measures/{measure}/alternatives", get(alternatives))
        .route("/sessions/{id}/measures/{measure}", patch(edit))
        .route("/sessions/{id}/save", post(save))
        .route("/sessions/{id}/load", post(load))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD));
    Router::new().nest("/api/v1", api).with_state(state)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Health {
    pub status: String,
    pub corpus_digest: String,
}

async fn health(State(s): State<Arc<AppState>>) -> Json<Health> {
    Json(Health { status: "ok".into(), corpus_digest: s.db.source_digest.clone() })
}

async fn openapi() -> Response {
    ([(header::CONTENT_TYPE, "application/json")], OPENAPI).into_response()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MentorQuery {
    pub query: String,
}

async fn mentor(State(s): State<Arc<AppState>>, Json(q): Json<MentorQuery>) -> Result<Json<MentorExchange>, ServiceError> {
    let config = s.mentor.clone();
    // network I/O stays off every session lock
    tokio::task::spawn_blocking(move || {
        let live = config
            .endpoint
            .clone()
            .map(|endpoint| HttpMentor { endpoint, api_key: config.api_key.clone() });
        mentor_ask(&q.query, &config, live.as_ref().map(|m| m as &dyn MentorBackend))
    })
    .await
    .map_err(|e| ServiceError::Io(format!("worker failed: {e}")))?
    .map(Json)
    .map_err(Into::into)
}

async fn create_session(
    State(s): State<Arc<AppState>>,
    body: Option<Json<GenerationConfig>>,
) -> Result<(StatusCode, Json<SessionSummary>), ServiceError> {
    let config = body.map(|Json(c)| c).unwrap_or_default();
    let session = Session::new(uuid::Uuid::new_v4().simple().to_string(), config)?;
    let summary = session.summary();
    s.insert(session);
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn get_session(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SessionSummary>, ServiceError> {
    with_session(&s, &id, |sess, _| Ok(sess.summary())).await.map(Json)
}

async fn upload(
    State(s): State<Arc<AppState>>,
    Path(id): Path<String>,
    mut form: Multipart,
) -> Result<Json<SessionSummary>, ServiceError> {
    s.session(&id)?;
    let mut file: Option<(Option<String>, Bytes)> = None;
    while let Some(field) = form.next_field().await.map_err(|e| ServiceError::BadRequest(e.to_string()))? {
        if field.name() == Some("file") {
            let name = field.file_name().map(str::to_string);
            let bytes = field.bytes().await.map_err(|e| ServiceError::BadRequest(e.to_string()))?;
            file = Some((name, bytes));
        }
    }
    let (name, bytes) = file.ok_or_else(|| ServiceError::BadRequest("multipart field `file` is required".into()))?;
    with_session(&s, &id, move |sess, _| sess.upload(bytes.to_vec(), name.as_deref())).await.map(Json)
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct ProcessRequest {
    pub bpm: Option<u16>,
}

async fn process(
    State(s): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Option<Json<ProcessRequest>>,
) -> Result<Json<AnalysisDoc>, ServiceError> {
    let bpm = body.and_then(|Json(b)| b.bpm);
    with_session(&s, &id, move |sess, st| sess.process(bpm, &st.db)).await.map(Json)
}

async fn continue_phrase(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<PhraseDoc>, ServiceError> {
    with_session(&s, &id, |sess, st| sess.continue_phrase(&st.db)).await.map(Json)
}

async fn end_piece(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<MeasureDoc>, ServiceError> {
    with_session(&s, &id, |sess, _| sess.end()).await.map(Json)
}

async fn score(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<ScoreDoc>, ServiceError> {
    with_session(&s, &id, |sess, _| sess.score()).await.map(Json)
}

async fn export(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let bytes = with_session(&s, &id, |sess, _| sess.export()).await?;
    let disposition = format!("attachment; filename=\"{id}.mid\"");
    Ok(([(header::CONTENT_TYPE, "audio/midi".to_string()), (header::CONTENT_DISPOSITION, disposition)], bytes)
        .into_response())
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExplanationQuery {
    pub scope: String,
    pub level: Option<String>,
}

async fn explanation(
    State(s): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ExplanationQuery>,
) -> Result<Json<ExplanationDoc>, ServiceError> {
    let scope: Scope = q.scope.parse()?;
    let level: Level = q.level.as_deref().unwrap_or("beginner").parse()?;
    with_session(&s, &id, move |sess, st| sess.explanation(scope, level, &st.db)).await.map(Json)
}

async fn alternatives(
    State(s): State<Arc<AppState>>,
    Path((id, measure)): Path<(String, usize)>,
) -> Result<Json<Alternatives>, ServiceError> {
    with_session(&s, &id, move |sess, _| sess.alternatives(measure)).await.map(Json)
}

async fn edit(
    State(s): State<Arc<AppState>>,
    Path((id, measure)): Path<(String, usize)>,
    Json(value): Json<EditValue>,
) -> Result<Json<MeasureDoc>, ServiceError> {
    with_session(&s, &id, move |sess, st| sess.edit(measure, value, &st.db)).await.map(Json)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SaveReceipt {
    pub id: String,
    pub path: String,
}

async fn save(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SaveReceipt>, ServiceError> {
    with_session(&s, &id, |sess, st| {
        let path = st.store.save(sess, &st.db)?;
        Ok(SaveReceipt { id: sess.id.clone(), path: path.display().to_string() })
    })
    .await
    .map(Json)
}

/// Restores a saved session from disk, replacing any in-memory copy.
async fn load(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SessionSummary>, ServiceError> {
    let state = s.clone();
    let session = tokio::task::spawn_blocking(move || state.store.load(&id, &state.db))
        .await
        .map_err(|e| ServiceError::Io(format!("worker failed: {e}")))??;
    let summary = session.summary();
    s.insert(session);
    Ok(Json(summary))
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(addr: std::net::SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

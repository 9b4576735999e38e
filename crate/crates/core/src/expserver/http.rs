use std::collections::HashMap;
use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Mutex;
use tower_http::services::ServeDir;

use crate::labels::Answer;
use crate::listing::{read_items, read_lists, DatasetItem};

use super::ledger::{
    grade_qualification, AssignError, AssignPlan, Event, Ledger, Progress, RecordCheck,
};
use super::store::EventLog;
use super::{ResponseRecord, ServerError};

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub items: PathBuf,
    pub lists: PathBuf,
    pub qualification: PathBuf,
    pub log: PathBuf,
    pub static_dir: Option<PathBuf>,
    pub addr: SocketAddr,
    pub fsync: bool,
    pub pending_timeout: Duration,
}

#[derive(Debug, Clone, Serialize)]
struct ItemView {
    id: String,
    premise: String,
    question: String,
}

impl From<&DatasetItem> for ItemView {
    fn from(i: &DatasetItem) -> Self {
        ItemView {
            id: i.id.clone(),
            premise: i.premise.clone(),
            question: i.question.clone(),
        }
    }
}

struct Inner {
    ledger: Ledger,
    log: EventLog,
}

impl Inner {
    fn commit(&mut self, event: Event) -> Result<(), ServerError> {
        self.log.append(&event)?;
        self.ledger.apply(&event);
        Ok(())
    }

    fn expire_stale(&mut self, timeout: chrono::Duration) -> Result<(), ServerError> {
        for e in self.ledger.stale(Utc::now(), timeout) {
            log::info!("expiring {e:?}");
            self.commit(e)?;
        }
        Ok(())
    }
}

/// Shared server state. All mutations go through one lock, and every event
/// is on disk before the ledger sees it.
pub struct AppState {
    inner: Mutex<Inner>,
    items: HashMap<String, ItemView>,
    qualification: Vec<ItemView>,
    gold: HashMap<String, Answer>,
    pending_timeout: chrono::Duration,
}

impl AppState {
    pub fn load(cfg: &ServerConfig) -> Result<AppState, ServerError> {
        let items = read_items(&cfg.items)?;
        let lists = read_lists(&cfg.lists)?;
        let qualification = read_items(&cfg.qualification)?;
        let (log, events) = EventLog::open(&cfg.log, cfg.fsync)?;
        let ledger = Ledger::replay(&lists, &events);
        log::info!(
            "loaded {} items, {} lists, {} qualification items; replayed {} events",
            items.len(),
            lists.len(),
            qualification.len(),
            events.len()
        );
        Ok(AppState {
            inner: Mutex::new(Inner { ledger, log }),
            items: items.iter().map(|i| (i.id.clone(), i.into())).collect(),
            gold: qualification
                .iter()
                .map(|q| (q.id.clone(), q.correct_answer))
                .collect(),
            qualification: qualification.iter().map(Into::into).collect(),
            pending_timeout: chrono::Duration::from_std(cfg.pending_timeout)
                .unwrap_or(chrono::Duration::MAX),
        })
    }

    /// A copy of the current ledger.
    pub async fn ledger(&self) -> Ledger {
        self.inner.lock().await.ledger.clone()
    }

    pub async fn progress(&self) -> Progress {
        self.inner.lock().await.ledger.progress()
    }
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

impl From<ServerError> for ApiError {
    fn from(e: ServerError) -> Self {
        log::error!("{e}");
        ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
    }
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))
}

fn require_worker(id: &str) -> Result<(), ApiError> {
    if id.trim().is_empty() {
        return Err(ApiError(
            StatusCode::BAD_REQUEST,
            "worker_id is empty".into(),
        ));
    }
    Ok(())
}

async fn qualification_items(State(s): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!({ "items": s.qualification }))
}

#[derive(Deserialize)]
struct QualAnswer {
    item_id: String,
    response: Answer,
}

#[derive(Deserialize)]
struct QualSubmission {
    worker_id: String,
    answers: Vec<QualAnswer>,
}

async fn submit_qualification(
    State(s): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let sub: QualSubmission = parse_body(&body)?;
    require_worker(&sub.worker_id)?;
    let answers: Vec<(String, Answer)> = sub
        .answers
        .into_iter()
        .map(|a| (a.item_id, a.response))
        .collect();
    let mut inner = s.inner.lock().await;
    if let Some(existing) = inner.ledger.qualification(&sub.worker_id) {
        return Ok(Json(existing.clone()).into_response());
    }
    let result = grade_qualification(&sub.worker_id, &answers, &s.gold)
        .map_err(|m| ApiError(StatusCode::BAD_REQUEST, m))?;
    inner.commit(Event::Qualification {
        result: result.clone(),
        at: Utc::now(),
    })?;
    Ok(Json(result).into_response())
}

#[derive(Deserialize)]
struct SessionRequest {
    worker_id: String,
}

async fn session(State(s): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: SessionRequest = parse_body(&body)?;
    require_worker(&req.worker_id)?;
    let mut inner = s.inner.lock().await;
    inner.expire_stale(s.pending_timeout)?;
    match inner.ledger.plan_assign(&req.worker_id, Utc::now()) {
        Ok(AssignPlan::Resume) => {}
        Ok(AssignPlan::New(e)) => inner.commit(e)?,
        Err(e @ AssignError::Unqualified(_)) => {
            return Err(ApiError(StatusCode::FORBIDDEN, e.to_string()))
        }
        Err(e @ AssignError::Exhausted(_)) => {
            return Err(ApiError(StatusCode::CONFLICT, e.to_string()))
        }
    }
    let pending = inner
        .ledger
        .pending(&req.worker_id)
        .expect("assignment just made or resumed");
    let items: Vec<&ItemView> = pending
        .open_items()
        .iter()
        .filter_map(|id| s.items.get(id))
        .collect();
    Ok(Json(json!({ "list_id": pending.list_id, "items": items })).into_response())
}

#[derive(Deserialize)]
struct ResponseBody {
    worker_id: String,
    item_id: String,
    list_id: String,
    response: Answer,
    rt_premise_ms: u64,
    rt_question_ms: u64,
    #[serde(default)]
    timestamp: Option<DateTime<Utc>>,
}

#[derive(Serialize)]
struct Ack {
    stored: bool,
    duplicate: bool,
}

async fn response(State(s): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let b: ResponseBody = parse_body(&body)?;
    require_worker(&b.worker_id)?;
    let now = Utc::now();
    let rec = ResponseRecord {
        worker_id: b.worker_id,
        item_id: b.item_id,
        list_id: b.list_id,
        response: b.response,
        rt_premise_ms: b.rt_premise_ms,
        rt_question_ms: b.rt_question_ms,
        timestamp: b.timestamp.unwrap_or(now),
    };
    let mut inner = s.inner.lock().await;
    inner.expire_stale(s.pending_timeout)?;
    let ack = match inner.ledger.check_record(&rec) {
        Ok(RecordCheck::Duplicate) => Ack {
            stored: false,
            duplicate: true,
        },
        Ok(RecordCheck::Fresh) => {
            inner.commit(Event::Response {
                record: rec,
                at: now,
            })?;
            Ack {
                stored: true,
                duplicate: false,
            }
        }
        Err(e) => return Err(ApiError(StatusCode::CONFLICT, e.to_string())),
    };
    Ok(Json(ack).into_response())
}

async fn progress(State(s): State<Arc<AppState>>) -> Json<Progress> {
    Json(s.progress().await)
}

pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route(
            "/api/qualification",
            get(qualification_items).post(submit_qualification),
        )
        .route("/api/session", post(session))
        .route("/api/response", post(response))
        .route("/api/progress", get(progress))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// A bound, not yet running server.
pub struct Server {
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    router: Router,
}

impl Server {
    pub async fn bind(cfg: &ServerConfig) -> Result<Server, ServerError> {
        let state = Arc::new(AppState::load(cfg)?);
        let listener =
            tokio::net::TcpListener::bind(cfg.addr)
                .await
                .map_err(|e| ServerError::Io {
                    path: cfg.addr.to_string(),
                    source: e,
                })?;
        Ok(Server {
            router: router(state.clone(), cfg.static_dir.clone()),
            listener,
            state,
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener.local_addr().expect("bound socket")
    }

    pub fn state(&self) -> Arc<AppState> {
        self.state.clone()
    }

    pub async fn run_until(
        self,
        shutdown: impl Future<Output = ()> + Send + 'static,
    ) -> std::io::Result<()> {
        axum::serve(self.listener, self.router)
            .with_graceful_shutdown(shutdown)
            .await
    }
}

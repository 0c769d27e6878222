//! JSON session API for interactive exploration.
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/session` | `{topology, n}` |
//! | GET | `/session/{id}/state` | |
//! | POST | `/session/{id}/toggle` | `{cell: {row, col}, color: "black"/"white"/null, force?}` |
//! | POST | `/session/{id}/swap` | `{line: "row 3"}` or `{line: {kind, index}}` |
//! | POST | `/session/{id}/run` | `{target, seed, budget?, restarts?}` |
//! | POST | `/session/{id}/step` | |
//! | POST | `/session/{id}/stop` | |
//! | DELETE | `/session/{id}` | |
//! | GET | `/session/{id}/events?since=k` | |
//!
//! Errors are `{error, code}` with status 404 (unknown session), 409
//! (a search is running) or 422 (bad cell, line or size, or a placement
//! that breaks peace, in which case `witness` is included).
//!
//! Each session sits behind its own mutex, so mutations are serialized per
//! session. A running search owns the battle: it applies its events to the
//! session as they happen, and every mutating endpoint answers 409 until it
//! stops. The event log is append-only, and [`replay_log`] rebuilds the
//! current battle from it.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread::JoinHandle;
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::battle::{is_peaceful, swap_on, Battle, Color, Witness};
use crate::board::{Board, Cell, LineRef, Topology};
use crate::swap_search::{apply_event, improve_step, run_until, SearchConfig, SearchEvent};

/// Largest board a session may hold.
pub const MAX_SESSION_N: usize = 400;
/// Search budget when a run request gives none.
pub const DEFAULT_RUN_BUDGET: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SessionEvent {
    Search { event: SearchEvent },
    Toggled { cell: Cell, color: Option<Color> },
    Swapped { line: LineRef },
    /// A finished search leaves its best battle in place.
    Adopted { black: Vec<Cell>, white: Vec<Cell> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoggedEvent {
    pub seq: usize,
    #[serde(flatten)]
    pub event: SessionEvent,
}

/// Rebuild a session's battle from its log.
pub fn replay_log(board: Board, events: &[SessionEvent]) -> Option<Battle> {
    events.iter().try_fold(Battle::empty(board), |b, ev| match ev {
        SessionEvent::Search { event } => apply_event(&b, event),
        SessionEvent::Toggled { cell, color } => {
            let mut next = b;
            next.set(*cell, *color).ok()?;
            Some(next)
        }
        SessionEvent::Swapped { line } => swap_on(&b, *line).ok(),
        SessionEvent::Adopted { black, white } => Battle::new(board, black.clone(), white.clone()).ok(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum SearchStatus {
    Idle,
    Running { target: usize, seed: u64 },
    Finished { reached_target: bool, min: usize, restarts: u64 },
    Stopped { min: usize, restarts: u64 },
}

struct Session {
    battle: Battle,
    log: Vec<SessionEvent>,
    status: SearchStatus,
    stop: Arc<AtomicBool>,
    worker: Option<JoinHandle<()>>,
}

impl Session {
    fn push(&mut self, event: SessionEvent) {
        self.log.push(event);
    }

    fn is_running(&self) -> bool {
        matches!(self.status, SearchStatus::Running { .. })
    }

    fn view(&self, id: &str) -> Value {
        let board = self.battle.board();
        let verdict = is_peaceful(&self.battle);
        json!({
            "id": id,
            "n": board.n(),
            "topology": board.topology(),
            "black": self.battle.black_cells(),
            "white": self.battle.white_cells(),
            "counts": self.battle.counts(),
            "search_status": self.status,
            "peaceful": verdict.peaceful,
            "witness": verdict.witness,
            "event_count": self.log.len(),
        })
    }
}

type SharedSession = Arc<Mutex<Session>>;

#[derive(Default)]
pub struct Store {
    sessions: Mutex<HashMap<String, SharedSession>>,
    next_id: AtomicU64,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

impl Store {
    fn get(&self, id: &str) -> Result<SharedSession, ApiError> {
        lock(&self.sessions).get(id).cloned().ok_or(ApiError::NotFound)
    }
}

#[derive(Debug)]
pub enum ApiError {
    NotFound,
    Running,
    Invalid(String),
    Breaks(Witness),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::NotFound => (
                StatusCode::NOT_FOUND,
                json!({"error": "unknown session", "code": "not_found"}),
            ),
            ApiError::Running => (
                StatusCode::CONFLICT,
                json!({"error": "a search is running on this session", "code": "search_running"}),
            ),
            ApiError::Invalid(msg) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"error": msg, "code": "invalid"}),
            ),
            ApiError::Breaks(w) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({
                    "error": format!("{} holds black {} and white {}", w.line, w.black, w.white),
                    "code": "not_peaceful",
                    "witness": w,
                }),
            ),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult = Result<(StatusCode, Json<Value>), ApiError>;

fn ok(v: Value) -> ApiResult {
    Ok((StatusCode::OK, Json(v)))
}

#[derive(Deserialize)]
struct CreateRequest {
    topology: Topology,
    n: usize,
}

#[derive(Deserialize)]
struct ToggleRequest {
    cell: Cell,
    color: Option<Color>,
    #[serde(default)]
    force: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LineSpec {
    Text(String),
    Ref(LineRef),
}

#[derive(Deserialize)]
struct SwapRequest {
    line: LineSpec,
}

#[derive(Deserialize)]
struct RunRequest {
    target: usize,
    seed: u64,
    /// Seconds.
    budget: Option<f64>,
    restarts: Option<u64>,
}

#[derive(Deserialize)]
struct EventsQuery {
    #[serde(default)]
    since: usize,
}

pub fn router() -> Router {
    router_with(Arc::new(Store::default()))
}

pub fn router_with(store: Arc<Store>) -> Router {
    Router::new()
        .route("/session", post(create))
        .route("/session/{id}", axum::routing::delete(remove))
        .route("/session/{id}/state", get(state))
        .route("/session/{id}/toggle", post(toggle))
        .route("/session/{id}/swap", post(swap))
        .route("/session/{id}/run", post(run))
        .route("/session/{id}/step", post(step))
        .route("/session/{id}/stop", post(stop))
        .route("/session/{id}/events", get(events))
        .with_state(store)
}

/// Serve the API until the process ends.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router()).await
}

async fn create(State(store): State<Arc<Store>>, Json(req): Json<CreateRequest>) -> ApiResult {
    if req.n == 0 || req.n > MAX_SESSION_N {
        return Err(ApiError::Invalid(format!("n must be in 1..={MAX_SESSION_N}")));
    }
    let board = Board::new(req.n, req.topology).map_err(|e| ApiError::Invalid(e.to_string()))?;
    let id = format!("s{}", store.next_id.fetch_add(1, Ordering::Relaxed) + 1);
    let session = Session {
        battle: Battle::empty(board),
        log: vec![],
        status: SearchStatus::Idle,
        stop: Arc::new(AtomicBool::new(false)),
        worker: None,
    };
    let view = session.view(&id);
    lock(&store.sessions).insert(id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(json!({"id": id, "state": view}))))
}

async fn state(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult {
    let s = store.get(&id)?;
    let view = lock(&s).view(&id);
    ok(view)
}

async fn toggle(State(store): State<Arc<Store>>, Path(id): Path<String>, Json(req): Json<ToggleRequest>) -> ApiResult {
    let s = store.get(&id)?;
    let mut s = lock(&s);
    if s.is_running() {
        return Err(ApiError::Running);
    }
    let mut next = s.battle.clone();
    next.set(req.cell, req.color).map_err(|e| ApiError::Invalid(e.to_string()))?;
    if !req.force {
        if let Some(w) = is_peaceful(&next).witness {
            return Err(ApiError::Breaks(w));
        }
    }
    s.battle = next;
    s.push(SessionEvent::Toggled {
        cell: req.cell,
        color: req.color,
    });
    ok(s.view(&id))
}

async fn swap(State(store): State<Arc<Store>>, Path(id): Path<String>, Json(req): Json<SwapRequest>) -> ApiResult {
    let line = match req.line {
        LineSpec::Text(t) => t.parse::<LineRef>().map_err(ApiError::Invalid)?,
        LineSpec::Ref(r) => r,
    };
    let s = store.get(&id)?;
    let mut s = lock(&s);
    if s.is_running() {
        return Err(ApiError::Running);
    }
    s.battle = swap_on(&s.battle, line).map_err(|e| ApiError::Invalid(e.to_string()))?;
    s.push(SessionEvent::Swapped { line });
    ok(s.view(&id))
}

async fn step(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult {
    let s = store.get(&id)?;
    let mut s = lock(&s);
    if s.is_running() {
        return Err(ApiError::Running);
    }
    let result = improve_step(&s.battle);
    if result.colors_swapped {
        s.push(SessionEvent::Search {
            event: SearchEvent::ColorsSwapped,
        });
    }
    let moved = result.applied.is_some();
    if let Some(event) = result.applied {
        s.push(SessionEvent::Search { event });
    }
    s.battle = result.battle;
    let mut view = s.view(&id);
    view["moved"] = json!(moved);
    ok(view)
}

async fn run(State(store): State<Arc<Store>>, Path(id): Path<String>, Json(req): Json<RunRequest>) -> ApiResult {
    let budget = match req.budget {
        None => DEFAULT_RUN_BUDGET,
        Some(b) if b.is_finite() && b > 0.0 => Duration::from_secs_f64(b),
        Some(_) => return Err(ApiError::Invalid("budget must be a positive number of seconds".into())),
    };
    let shared = store.get(&id)?;
    let mut s = lock(&shared);
    if s.is_running() {
        return Err(ApiError::Running);
    }
    let mut config = SearchConfig::new(*s.battle.board(), req.target, req.seed).with_time_budget(budget);
    if let Some(r) = req.restarts {
        config = config.with_max_restarts(r);
    }
    let stop_flag = Arc::new(AtomicBool::new(false));
    s.stop = stop_flag.clone();
    s.status = SearchStatus::Running {
        target: req.target,
        seed: req.seed,
    };
    let worker_session = shared.clone();
    s.worker = Some(std::thread::spawn(move || {
        let stop_poll = stop_flag.clone();
        let outcome = run_until(&config, &move || stop_poll.load(Ordering::Relaxed), &mut |ev| {
            let mut s = lock(&worker_session);
            if let Some(next) = apply_event(&s.battle, ev) {
                s.battle = next;
            }
            s.push(SessionEvent::Search { event: ev.clone() });
        });
        let mut s = lock(&worker_session);
        if s.battle != outcome.battle {
            s.push(SessionEvent::Adopted {
                black: outcome.battle.black_cells(),
                white: outcome.battle.white_cells(),
            });
            s.battle = outcome.battle.clone();
        }
        let min = outcome.battle.min_count();
        s.status = if stop_flag.load(Ordering::Relaxed) && !outcome.reached_target {
            SearchStatus::Stopped {
                min,
                restarts: outcome.restarts,
            }
        } else {
            SearchStatus::Finished {
                reached_target: outcome.reached_target,
                min,
                restarts: outcome.restarts,
            }
        };
    }));
    let view = s.view(&id);
    Ok((StatusCode::ACCEPTED, Json(view)))
}

/// Signal the worker and wait for it without holding the session lock.
async fn halt(session: &SharedSession) {
    let worker = {
        let mut s = lock(session);
        s.stop.store(true, Ordering::Relaxed);
        s.worker.take()
    };
    if let Some(handle) = worker {
        let _ = tokio::task::spawn_blocking(move || handle.join()).await;
    }
}

async fn stop(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult {
    let s = store.get(&id)?;
    halt(&s).await;
    let view = lock(&s).view(&id);
    ok(view)
}

async fn remove(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    let s = store.get(&id)?;
    halt(&s).await;
    lock(&store.sessions).remove(&id);
    Ok(StatusCode::NO_CONTENT)
}

async fn events(State(store): State<Arc<Store>>, Path(id): Path<String>, Query(q): Query<EventsQuery>) -> ApiResult {
    let s = store.get(&id)?;
    let s = lock(&s);
    let tail: Vec<LoggedEvent> = s
        .log
        .iter()
        .enumerate()
        .skip(q.since)
        .map(|(seq, e)| LoggedEvent { seq, event: e.clone() })
        .collect();
    ok(json!({"events": tail, "next": s.log.len()}))
}

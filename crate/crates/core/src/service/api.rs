use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::{SinkExt, StreamExt};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::Semaphore;

use super::config::{HintLevel, ServiceConfig};
use super::session::{ActionError, ServerFrame, SessionHub};
use super::store::{valid_id, CheckOverrides, ExerciseRecord, Store, StoreError, StudentSpec, SubmissionRecord};
use crate::check::{check_specs, CheckConfig, CheckError, CheckReport};
use crate::dsl::{parse_checked, spec_from_doc, typecheck, Diagnostic, Specification};
use crate::eval::SplitMix64;
use crate::game::{new_session, Action, Board};
use crate::problem::Side;
use crate::verdict::{BlobKind, Implication, Overall, SideVerdict, Status, Verdict};

#[derive(Clone)]
pub struct AppState {
    pub config: Arc<ServiceConfig>,
    pub store: Arc<Store>,
    pub hub: Arc<SessionHub>,
    smt_permits: Arc<Semaphore>,
}

impl AppState {
    pub fn new(config: ServiceConfig, store: Store) -> AppState {
        let permits = config.smt_concurrency.max(1);
        AppState {
            config: Arc::new(config),
            store: Arc::new(store),
            hub: Arc::new(SessionHub::default()),
            smt_permits: Arc::new(Semaphore::new(permits)),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/exercises", post(create_exercise).get(list_exercises))
        .route("/api/exercises/{id}", get(get_exercise))
        .route("/api/exercises/{id}/submissions", post(submit))
        .route("/api/sessions/{id}", get(session_channel))
        .with_state(state)
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("missing or invalid teacher token")]
    Unauthorized,
    #[error("{0} not found")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("specification is invalid")]
    Diagnostics(Vec<Diagnostic>),
    #[error("{0}")]
    Validation(String),
    #[error("internal error (trace {trace_id})")]
    Internal { trace_id: String },
}

fn trace_id() -> String {
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos() as u64).unwrap_or(0);
    format!("{:016x}", SplitMix64::new(nanos).next_u64())
}

impl ApiError {
    fn internal(err: &dyn std::fmt::Display) -> ApiError {
        let trace_id = trace_id();
        tracing::error!(%trace_id, error = %err, "request failed");
        ApiError::Internal { trace_id }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> ApiError {
        match e {
            StoreError::Duplicate(id) => ApiError::Conflict(format!("record `{id}` already exists")),
            StoreError::BadId(_) => ApiError::Validation(e.to_string()),
            other => ApiError::internal(&other),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code) = match &self {
            ApiError::Unauthorized => (StatusCode::UNAUTHORIZED, "unauthorized"),
            ApiError::NotFound(_) => (StatusCode::NOT_FOUND, "notFound"),
            ApiError::Conflict(_) => (StatusCode::CONFLICT, "conflict"),
            ApiError::Diagnostics(_) => (StatusCode::UNPROCESSABLE_ENTITY, "diagnostics"),
            ApiError::Validation(_) => (StatusCode::UNPROCESSABLE_ENTITY, "validation"),
            ApiError::Internal { .. } => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        let mut body = json!({"error": code, "message": self.to_string()});
        match &self {
            ApiError::Diagnostics(ds) => body["diagnostics"] = json!(ds),
            ApiError::Internal { trace_id } => body["traceId"] = json!(trace_id),
            _ => {}
        }
        (status, Json(body)).into_response()
    }
}

fn require_teacher(state: &AppState, headers: &HeaderMap) -> Result<(), ApiError> {
    let token = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .ok_or(ApiError::Unauthorized)?;
    if state.config.teacher_tokens.iter().any(|t| t == token) {
        Ok(())
    } else {
        Err(ApiError::Unauthorized)
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CreateExercise {
    #[serde(default)]
    pub id: Option<String>,
    pub title: String,
    #[serde(default)]
    pub description: String,
    /// Optional method header; must match the one in `modelSpec`.
    #[serde(default)]
    pub signature: Option<String>,
    pub model_spec: String,
    #[serde(default)]
    pub check_overrides: CheckOverrides,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SelfCheckSummary {
    pub overall: Overall,
    pub pre: Status,
    pub post: Status,
}

/// Student-facing view of an exercise. Never carries the model specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExerciseView {
    pub id: String,
    pub title: String,
    pub description: String,
    pub signature: String,
    pub created_at: u64,
    pub self_check: SelfCheckSummary,
}

impl From<&ExerciseRecord> for ExerciseView {
    fn from(r: &ExerciseRecord) -> ExerciseView {
        ExerciseView {
            id: r.id.clone(),
            title: r.title.clone(),
            description: r.description.clone(),
            signature: r.signature.clone(),
            created_at: r.created_at,
            self_check: SelfCheckSummary {
                overall: r.self_check.overall,
                pre: r.self_check.pre.status,
                post: r.self_check.post.status,
            },
        }
    }
}

fn check_config(base: &CheckConfig, o: &CheckOverrides) -> CheckConfig {
    let mut cfg = base.clone();
    if let Some(t) = o.trials {
        cfg.trials = t;
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    cfg
}

/// Runs a check on the blocking pool, holding a solver permit when a solver is configured.
async fn run_check(state: &AppState, model: Specification, student: Specification, cfg: CheckConfig) -> Result<CheckReport, ApiError> {
    let _permit = match cfg.solver {
        Some(_) => Some(state.smt_permits.clone().acquire_owned().await.map_err(|e| ApiError::internal(&e))?),
        None => None,
    };
    let joined = tokio::task::spawn_blocking(move || check_specs(&model, &student, &cfg)).await;
    match joined.map_err(|e| ApiError::internal(&e))? {
        Ok(r) => Ok(r),
        Err(e @ CheckError::SignatureMismatch { .. }) => Err(ApiError::Validation(e.to_string())),
        Err(e @ CheckError::Conflict { .. }) => Err(ApiError::internal(&e)),
    }
}

async fn create_exercise(
    State(state): State<AppState>,
    headers: HeaderMap,
    Json(req): Json<CreateExercise>,
) -> Result<(StatusCode, Json<ExerciseView>), ApiError> {
    require_teacher(&state, &headers)?;
    let model = parse_checked(&req.model_spec).map_err(|d| ApiError::Diagnostics(d.0))?;
    if let Some(sig) = &req.signature {
        let header = parse_checked(sig).map_err(|d| ApiError::Diagnostics(d.0))?;
        if header.signature != model.signature {
            return Err(ApiError::Validation(format!(
                "signature `{}` does not match the model's `{}`",
                header.signature, model.signature
            )));
        }
    }
    let id = match req.id {
        Some(id) if !valid_id(&id) => return Err(StoreError::BadId(id).into()),
        Some(id) if state.store.has_exercise(&id) => return Err(StoreError::Duplicate(id).into()),
        Some(id) => id,
        None => state.store.fresh_id("ex")?,
    };
    let cfg = check_config(&state.config.check, &req.check_overrides);
    let report = run_check(&state, model.clone(), model.clone(), cfg).await?;
    if report.verdict.overall == Overall::NotEquivalent {
        return Err(ApiError::Validation("model specification is not equivalent to itself".into()));
    }
    let rec = ExerciseRecord {
        id,
        title: req.title,
        description: req.description,
        signature: model.signature.to_string(),
        model_spec: req.model_spec,
        created_at: now_ms(),
        check_overrides: req.check_overrides,
        self_check: report.verdict,
    };
    state.store.insert_exercise(rec.clone())?;
    tracing::info!(exercise = %rec.id, overall = ?rec.self_check.overall, "exercise created");
    Ok((StatusCode::CREATED, Json(ExerciseView::from(&rec))))
}

async fn list_exercises(State(state): State<AppState>) -> Json<Vec<ExerciseView>> {
    Json(state.store.exercises().iter().map(ExerciseView::from).collect())
}

async fn get_exercise(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<ExerciseView>, ApiError> {
    let rec = state.store.exercise(&id).ok_or_else(|| ApiError::NotFound(format!("exercise `{id}`")))?;
    Ok(Json(ExerciseView::from(&rec)))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SubmitRequest {
    #[serde(default)]
    pub spec_text: Option<String>,
    #[serde(default)]
    pub spec_ast: Option<Value>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlobCount {
    pub side: Side,
    pub kind: BlobKind,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubmitResponse {
    pub submission_id: String,
    pub session_id: String,
    pub verdict: Verdict,
    pub blob_summary: Vec<BlobCount>,
}

/// Drops concrete witness values unless the hint level allows them.
pub fn redact(verdict: &Verdict, level: HintLevel) -> Verdict {
    let mut v = verdict.clone();
    if level == HintLevel::Values {
        return v;
    }
    let strip = |side: &mut SideVerdict| {
        for q in side.quadrants.values_mut() {
            q.witnesses.clear();
            q.rendered.clear();
        }
        for imp in [&mut side.s_imp_m, &mut side.m_imp_s] {
            if let Implication::Refuted { witness } = imp {
                *witness = None;
            }
        }
    };
    strip(&mut v.pre);
    strip(&mut v.post);
    v
}

fn student_spec(req: &SubmitRequest, model: &Specification) -> Result<(StudentSpec, Specification), ApiError> {
    match (&req.spec_text, &req.spec_ast) {
        (Some(text), None) => {
            let spec = parse_checked(text).map_err(|d| ApiError::Diagnostics(d.0))?;
            Ok((StudentSpec::Text(text.clone()), spec))
        }
        (None, Some(doc)) => {
            let raw = spec_from_doc(doc, Some(&model.signature)).map_err(|e| ApiError::Validation(e.to_string()))?;
            let spec = typecheck(&raw).map_err(|d| ApiError::Diagnostics(d.0))?;
            Ok((StudentSpec::Ast(doc.clone()), spec))
        }
        _ => Err(ApiError::Validation("exactly one of `specText` and `specAst` is required".into())),
    }
}

async fn submit(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<SubmitRequest>,
) -> Result<Json<SubmitResponse>, ApiError> {
    let exercise = state.store.exercise(&id).ok_or_else(|| ApiError::NotFound(format!("exercise `{id}`")))?;
    let model = parse_checked(&exercise.model_spec).map_err(|e| ApiError::internal(&e))?;
    let (raw, student) = student_spec(&req, &model)?;
    let mut cfg = check_config(&state.config.check, &exercise.check_overrides);
    if let Some(seed) = req.seed {
        cfg.seed = seed;
    }
    let seed = cfg.seed;
    let report = run_check(&state, model, student, cfg).await?;

    let mut blob_summary: Vec<BlobCount> = Vec::new();
    for e in &report.plan.entries {
        match blob_summary.iter_mut().find(|c| c.side == e.side && c.kind == e.kind) {
            Some(c) => c.count += 1,
            None => blob_summary.push(BlobCount { side: e.side, kind: e.kind, count: 1 }),
        }
    }
    blob_summary.sort_by_key(|c| (c.side, c.kind));

    let game = new_session(report.plan, Board::standard(), state.config.game.clone(), seed).map_err(|e| ApiError::internal(&e))?;
    let submission_id = state.store.fresh_id("sub")?;
    let session_id = state.store.fresh_id("ses")?;
    state.store.insert_submission(SubmissionRecord {
        id: submission_id.clone(),
        exercise_id: id,
        student_spec: raw,
        verdict: report.verdict.clone(),
        timestamp: now_ms(),
        session_seed: seed,
        session_id: session_id.clone(),
    })?;
    state.hub.start(session_id.clone(), game, state.store.clone());
    tracing::info!(submission = %submission_id, session = %session_id, overall = ?report.verdict.overall, "submission checked");
    Ok(Json(SubmitResponse {
        submission_id,
        session_id,
        verdict: redact(&report.verdict, state.config.hint_level),
        blob_summary,
    }))
}

async fn session_channel(State(state): State<AppState>, Path(id): Path<String>, ws: WebSocketUpgrade) -> Response {
    ws.on_upgrade(move |socket| drive_socket(state, id, socket))
}

fn frame(f: &ServerFrame) -> Message {
    Message::Text(serde_json::to_string(f).expect("frame serializes").into())
}

/// Streams snapshots to one client and forwards its actions. Reconnecting clients start
/// from the session's current state.
async fn drive_socket(state: AppState, id: String, socket: WebSocket) {
    let (mut tx, mut rx) = socket.split();
    let Some(handle) = state.hub.get(&id) else {
        let _ = tx.send(frame(&ServerFrame::error("unknownSession", format!("no session `{id}`")))).await;
        let _ = tx.close().await;
        return;
    };
    let mut view = handle.subscribe();
    let mut pending = Some(view.borrow_and_update().clone());
    loop {
        if let Some(v) = pending.take() {
            if tx.send(frame(&ServerFrame::Snapshot { snapshot: v.snapshot })).await.is_err() {
                return;
            }
            if let Some(score) = v.score {
                let _ = tx.send(frame(&ServerFrame::Score { score })).await;
                let _ = tx.close().await;
                return;
            }
        }
        tokio::select! {
            changed = view.changed() => {
                if changed.is_err() {
                    // Session task finished; its last view carries the score.
                    pending = Some(view.borrow().clone());
                    if pending.as_ref().is_some_and(|v| v.score.is_none()) {
                        return;
                    }
                } else {
                    pending = Some(view.borrow_and_update().clone());
                }
            }
            msg = rx.next() => {
                let text = match msg {
                    Some(Ok(Message::Text(t))) => t,
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                    Some(Ok(_)) => continue,
                };
                let reply = match serde_json::from_str::<Action>(&text) {
                    Err(e) => Some(ServerFrame::error("malformedAction", e.to_string())),
                    Ok(action) => match handle.send(action).await {
                        Ok(()) => None,
                        Err(ActionError::Rejected(e)) => Some(ServerFrame::from(&e)),
                        Err(e @ ActionError::Ended) => Some(ServerFrame::error("sessionEnded", e.to_string())),
                    },
                };
                if let Some(f) = reply {
                    if tx.send(frame(&f)).await.is_err() {
                        return;
                    }
                }
            }
        }
    }
}

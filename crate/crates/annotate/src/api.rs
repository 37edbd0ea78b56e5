//! HTTP routes.
//!
//! Annotator-facing payloads are built from [`AnnotatorTaskView`], which has
//! no field able to carry a stored label or another annotator's verdict.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::config::{AnnotateConfig, Role, TokenEntry};
use crate::store::Store;
use crate::task::{Status, Task, Verdict};
use crate::AnnotateError;

#[derive(Clone)]
struct AppState {
    store: Arc<Store>,
    tokens: Arc<BTreeMap<String, TokenEntry>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotatorTaskView {
    pub id: String,
    pub document: String,
    pub claim: String,
    pub my_verdict: Option<Verdict>,
}

impl AnnotatorTaskView {
    fn of(task: &Task, annotator: &str) -> Self {
        Self {
            id: task.id().to_string(),
            document: task.spec.document.clone(),
            claim: task.spec.claim.clone(),
            my_verdict: task.verdict_of(annotator),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjudicatorTaskView {
    pub id: String,
    pub document: String,
    pub claim: String,
    pub status: Status,
    pub verdicts: BTreeMap<String, Verdict>,
    pub adjudicated: Option<Verdict>,
}

impl AdjudicatorTaskView {
    fn of(task: &Task) -> Self {
        Self {
            id: task.id().to_string(),
            document: task.spec.document.clone(),
            claim: task.spec.claim.clone(),
            status: task.status(),
            verdicts: task.verdicts().iter().map(|(k, v)| (k.clone(), v.verdict)).collect(),
            adjudicated: task.adjudicated(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictBody {
    pub verdict: Verdict,
    #[serde(default)]
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjudicationBody {
    pub verdict: Verdict,
}

#[derive(Debug, Deserialize)]
struct TaskQuery {
    annotator: Option<String>,
    status: Option<Status>,
}

enum ApiError {
    Unauthorized,
    Forbidden(String),
    Domain(AnnotateError),
}

impl From<AnnotateError> for ApiError {
    fn from(e: AnnotateError) -> Self {
        ApiError::Domain(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::Unauthorized => (
                StatusCode::UNAUTHORIZED,
                json!({"error": "missing or unknown bearer token"}),
            ),
            ApiError::Forbidden(why) => (StatusCode::FORBIDDEN, json!({"error": why})),
            ApiError::Domain(e) => {
                let status = match &e {
                    AnnotateError::UnknownTask(_) => StatusCode::NOT_FOUND,
                    AnnotateError::DuplicateVerdict { .. }
                    | AnnotateError::Closed { .. }
                    | AnnotateError::NotAdjudicable { .. }
                    | AnnotateError::Unresolved(_) => StatusCode::CONFLICT,
                    _ => StatusCode::INTERNAL_SERVER_ERROR,
                };
                let mut body = json!({"error": e.to_string()});
                if let AnnotateError::Unresolved(ids) = &e {
                    body["unresolved"] = json!(ids);
                }
                (status, body)
            }
        };
        (status, Json(body)).into_response()
    }
}

struct Caller(TokenEntry);

impl FromRequestParts<AppState> for Caller {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, Self::Rejection> {
        let token = parts
            .headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .ok_or(ApiError::Unauthorized)?;
        state
            .tokens
            .get(token.trim())
            .cloned()
            .map(Caller)
            .ok_or(ApiError::Unauthorized)
    }
}

impl Caller {
    fn require(&self, role: Role) -> Result<&str, ApiError> {
        if self.0.role == role {
            Ok(&self.0.name)
        } else {
            Err(ApiError::Forbidden(format!("{} is not an {role:?}", self.0.name).to_lowercase()))
        }
    }
}

async fn list_tasks(
    State(state): State<AppState>,
    caller: Caller,
    Query(q): Query<TaskQuery>,
) -> Result<Response, ApiError> {
    let tasks = state.store.tasks();
    match caller.0.role {
        Role::Annotator => {
            let me = caller.0.name.as_str();
            if q.annotator.as_deref().is_some_and(|a| a != me) {
                return Err(ApiError::Forbidden(format!("{me} may only list their own tasks")));
            }
            let views: Vec<AnnotatorTaskView> = tasks
                .iter()
                .filter(|t| t.verdict_of(me).is_some() || t.status() == Status::Open)
                .map(|t| AnnotatorTaskView::of(t, me))
                .collect();
            Ok(Json(views).into_response())
        }
        Role::Adjudicator => {
            let views: Vec<AdjudicatorTaskView> = tasks
                .iter()
                .filter(|t| q.status.is_none_or(|s| t.status() == s))
                .filter(|t| q.annotator.as_deref().is_none_or(|a| t.verdict_of(a).is_some()))
                .map(AdjudicatorTaskView::of)
                .collect();
            Ok(Json(views).into_response())
        }
    }
}

async fn submit_verdict(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
    Json(body): Json<VerdictBody>,
) -> Result<Json<AnnotatorTaskView>, ApiError> {
    let me = caller.require(Role::Annotator)?;
    let task = state.store.submit(&id, me, body.verdict, body.elapsed_ms)?;
    Ok(Json(AnnotatorTaskView::of(&task, me)))
}

async fn adjudicate(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
    Json(body): Json<AdjudicationBody>,
) -> Result<Json<AdjudicatorTaskView>, ApiError> {
    let me = caller.require(Role::Adjudicator)?;
    let task = state.store.adjudicate(&id, me, body.verdict)?;
    Ok(Json(AdjudicatorTaskView::of(&task)))
}

async fn report(State(state): State<AppState>, caller: Caller) -> Result<Response, ApiError> {
    caller.require(Role::Adjudicator)?;
    Ok(Json(state.store.report()?).into_response())
}

/// Routes over `store`, authenticated with the tokens in `config`. When
/// `config.static_dir` is set, unmatched paths are served from it.
pub fn router(store: Arc<Store>, config: &AnnotateConfig) -> Router {
    let state = AppState {
        store,
        tokens: Arc::new(config.tokens.clone()),
    };
    let api = Router::new()
        .route("/tasks", get(list_tasks))
        .route("/tasks/{id}/verdict", post(submit_verdict))
        .route("/tasks/{id}/adjudication", post(adjudicate))
        .route("/report", get(report))
        .with_state(state);
    match &config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

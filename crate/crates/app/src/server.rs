//! JSON over HTTP. Learner-level outcomes (a rejected translation, an
//! unparsable sentence, an unknown word) come back as 422 with the full
//! diagnosis; lookups of things that do not exist are 404; bodies that do
//! not decode are 400.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use prepdiag_core::diagnostics::{DiagnosisError, Diagnostician, Verdict};
use prepdiag_core::exercise::Bank;
use prepdiag_core::pipeline::{analyze, logical_form, PipelineError};
use prepdiag_core::term::{parse_literal, EntitySource};
use prepdiag_core::Language;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::store::{now, valid_session_id, Record, SessionStore, StoreError};

pub struct AppState {
    pub diagnostician: Diagnostician,
    pub bank: Bank,
    pub store: SessionStore,
}

impl AppState {
    pub fn new(diagnostician: Diagnostician, bank: Bank, sessions: Option<PathBuf>) -> AppState {
        AppState { diagnostician, bank, store: SessionStore::new(sessions) }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        ApiError::Internal(e.to_string())
    }
}

impl From<DiagnosisError> for ApiError {
    fn from(e: DiagnosisError) -> Self {
        match e {
            DiagnosisError::UnknownDiagnosis(_) => ApiError::NotFound(e.to_string()),
            DiagnosisError::NotMissing { .. } => ApiError::BadRequest(e.to_string()),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

type ApiResult = Result<Response, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/exercises", get(exercises))
        .route("/api/parse", post(parse))
        .route("/api/model", post(model))
        .route("/api/diagnose", post(diagnose))
        .route("/api/why", post(why))
        .route("/api/compare", get(compare))
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::BadRequest(format!("invalid request body: {e}")))
}

fn session_id(id: &str) -> Result<(), ApiError> {
    if valid_session_id(id) {
        Ok(())
    } else {
        Err(ApiError::BadRequest(format!("invalid session id '{id}'")))
    }
}

async fn blocking<F>(f: F) -> ApiResult
where
    F: FnOnce() -> ApiResult + Send + 'static,
{
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::Internal(e.to_string()))?
}

fn learner_error(e: &PipelineError) -> Response {
    let (verdict, token) = match e {
        PipelineError::UnknownWord { token, .. } => (Verdict::UnknownWord, Some(token.clone())),
        _ => (Verdict::NoParse, None),
    };
    let body = json!({ "verdict": verdict, "token": token, "message": e.to_string() });
    (StatusCode::UNPROCESSABLE_ENTITY, Json(body)).into_response()
}

fn verdict_status(v: Verdict) -> StatusCode {
    if v == Verdict::Accepted {
        StatusCode::OK
    } else {
        StatusCode::UNPROCESSABLE_ENTITY
    }
}

async fn exercises(State(state): State<Arc<AppState>>) -> Json<Value> {
    let list: Vec<Value> = state
        .bank
        .exercises()
        .iter()
        .map(|e| {
            json!({
                "id": e.id,
                "source_language": e.source_language,
                "source_text": e.source_text,
                "target_language": e.target_language(),
                "lexical_scope": e.lexical_scope,
            })
        })
        .collect();
    Json(Value::Array(list))
}

#[derive(Deserialize)]
struct TextRequest {
    language: Language,
    text: String,
}

async fn parse(State(state): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let req: TextRequest = body(&bytes)?;
    blocking(move || match logical_form(&req.text, req.language, state.diagnostician.lexicon()) {
        Ok((tokens, lf)) => Ok(Json(json!({ "language": req.language, "tokens": tokens, "lf": lf })).into_response()),
        Err(e) if e.is_learner_error() => Ok(learner_error(&e)),
        Err(e) => Err(ApiError::Internal(e.to_string())),
    })
    .await
}

async fn model(State(state): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let req: TextRequest = body(&bytes)?;
    blocking(move || {
        let dx = &state.diagnostician;
        match analyze(&req.text, req.language, dx.kb(), dx.lexicon(), &EntitySource::new()) {
            Ok(a) => Ok(Json(json!({ "language": req.language, "lf": a.lf, "facts": a.model })).into_response()),
            Err(e) if e.is_learner_error() => Ok(learner_error(&e)),
            Err(e) => Err(ApiError::Internal(e.to_string())),
        }
    })
    .await
}

#[derive(Deserialize)]
struct DiagnoseRequest {
    session: String,
    exercise_id: String,
    text: String,
    #[serde(default)]
    trace: bool,
}

async fn diagnose(State(state): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let req: DiagnoseRequest = body(&bytes)?;
    session_id(&req.session)?;
    blocking(move || {
        let exercise = state
            .bank
            .get(&req.exercise_id)
            .ok_or_else(|| ApiError::NotFound(format!("unknown exercise '{}'", req.exercise_id)))?;
        let handle = state.store.get(&req.session, true, &state.diagnostician, &state.bank)?.expect("created");
        let _order = handle.lock();
        let d = state.diagnostician.diagnose(&handle.session, exercise, &req.text, req.trace)?;
        state.store.append(
            &req.session,
            &Record::Diagnose {
                exercise_id: req.exercise_id.clone(),
                text: req.text.clone(),
                trace: req.trace,
                diagnosis_id: d.id.clone(),
                verdict: d.verdict,
                timestamp: now(),
            },
        )?;
        Ok((verdict_status(d.verdict), Json(d)).into_response())
    })
    .await
}

#[derive(Deserialize)]
struct WhyRequest {
    session: String,
    diagnosis_id: String,
    missing_literal: String,
    #[serde(default)]
    trace: bool,
}

async fn why(State(state): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let req: WhyRequest = body(&bytes)?;
    session_id(&req.session)?;
    let literal = parse_literal(&req.missing_literal).map_err(|e| ApiError::BadRequest(format!("missing_literal: {e}")))?;
    blocking(move || {
        let handle = state
            .store
            .get(&req.session, false, &state.diagnostician, &state.bank)?
            .ok_or_else(|| ApiError::NotFound(format!("unknown session '{}'", req.session)))?;
        let _order = handle.lock();
        let d = state.diagnostician.why(&handle.session, &req.diagnosis_id, &literal, req.trace)?;
        state.store.append(
            &req.session,
            &Record::Why {
                diagnosis_id: req.diagnosis_id.clone(),
                missing_literal: req.missing_literal.clone(),
                trace: req.trace,
                child_id: d.id.clone(),
            },
        )?;
        Ok(Json(d).into_response())
    })
    .await
}

#[derive(Deserialize)]
struct CompareQuery {
    session: String,
    diagnosis_id: String,
}

async fn compare(State(state): State<Arc<AppState>>, query: Result<Query<CompareQuery>, axum::extract::rejection::QueryRejection>) -> ApiResult {
    let Query(q) = query.map_err(|e| ApiError::BadRequest(e.body_text()))?;
    session_id(&q.session)?;
    blocking(move || {
        let handle = state
            .store
            .get(&q.session, false, &state.diagnostician, &state.bank)?
            .ok_or_else(|| ApiError::NotFound(format!("unknown session '{}'", q.session)))?;
        let c = state.diagnostician.compare(&handle.session, &q.diagnosis_id)?;
        Ok(Json(c).into_response())
    })
    .await
}

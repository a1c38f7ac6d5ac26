//! HTTP facade over dialectic sessions and the prover.
//!
//! Sessions live in one JSON file each under the data directory. An event
//! is acknowledged only after the rewritten file has been synced and
//! renamed into place.

mod error;
mod oracle_job;
mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use serde::Deserialize;
use serde_json::{json, Value};

use elenchus_core::base::{load_base_value, MaterialBase};
use elenchus_core::dialectic::{extract_base, export_issues, NewEvent, Session};
use elenchus_core::formula::parse_sequent;
use elenchus_core::opponent::{apply_proposal, validate_proposal, Oracle, OracleError};
use elenchus_core::prover::{
    containment_audit, derivable_with, monotonicity_defeats, transitivity_gaps, ProverConfig,
};

pub use error::ApiError;
pub use oracle_job::OracleStatus;
pub use store::{write_atomic, Store, StoreError};

pub struct AppState {
    pub store: Store,
    pub oracle: Option<Arc<dyn Oracle>>,
}

impl AppState {
    pub fn new(data_dir: impl Into<PathBuf>, oracle: Option<Arc<dyn Oracle>>) -> std::io::Result<Self> {
        Ok(AppState {
            store: Store::open(data_dir)?,
            oracle,
        })
    }
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/events", post(post_event).get(get_events))
        .route("/sessions/{id}/oracle", post(start_oracle).delete(cancel_oracle))
        .route("/sessions/{id}/proposals", get(get_proposals))
        .route("/sessions/{id}/base", get(get_base))
        .route("/sessions/{id}/analysis", get(get_analysis))
        .route("/sessions/{id}/issues", get(get_issues))
        .route("/prove", post(prove))
        .with_state(state)
}

/// Binds and serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(Arc::new(state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    payload.map(|Json(v)| v).map_err(|e| {
        if e.status() == StatusCode::UNSUPPORTED_MEDIA_TYPE {
            ApiError::new(e.status(), "UnsupportedMediaType", e.body_text())
        } else {
            ApiError::bad_request("InvalidBody", e.body_text())
        }
    })
}

/// Full state of a session as served by `GET /sessions/{id}`.
pub fn snapshot(id: &str, session: &Session) -> Value {
    let state = session.state();
    let implications: Vec<Value> = state
        .implications()
        .iter()
        .map(|(imp, rec)| {
            json!({
                "lhs": imp.lhs,
                "rhs": imp.rhs,
                "tension": rec.tension,
                "acceptedAt": rec.accepted_at,
            })
        })
        .collect();
    json!({
        "sessionId": id,
        "name": session.name(),
        "lastSeq": state.last_seq(),
        "propositions": state.propositions().values().collect::<Vec<_>>(),
        "position": state.position(),
        "tensions": state.tensions().collect::<Vec<_>>(),
        "openTensions": state.open_tensions().map(|t| &t.id).collect::<Vec<_>>(),
        "implications": implications,
        "challenges": state.challenges().collect::<Vec<_>>(),
        "openChallenges": state.open_challenges().collect::<Vec<_>>(),
        "pruned": state.pruned(),
    })
}

#[derive(Deserialize)]
struct CreateSession {
    name: String,
}

async fn create_session(
    State(app): State<Shared>,
    payload: Result<Json<CreateSession>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let req = body(payload)?;
    if req.name.trim().is_empty() {
        return Err(ApiError::bad_request("InvalidBody", "session name is empty"));
    }
    let id = app.store.create(&req.name)?;
    Ok((StatusCode::CREATED, Json(json!({"sessionId": id}))))
}

async fn list_sessions(State(app): State<Shared>) -> ApiResult<Json<Value>> {
    Ok(Json(json!({"sessions": app.store.list()?})))
}

async fn get_session(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let handle = app.store.get(&id)?;
    let entry = handle.lock().await;
    Ok(Json(snapshot(&id, &entry.session)))
}

async fn get_events(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let handle = app.store.get(&id)?;
    let entry = handle.lock().await;
    Ok(Json(json!(entry.session.to_document())))
}

async fn post_event(
    State(app): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<NewEvent>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let handle = app.store.get(&id)?;
    let event = body(payload)?;
    let mut entry = handle.lock().await;
    let mut next = entry.session.clone();
    let applied = next
        .append_at(event.actor, event.kind, Some(event.timestamp.unwrap_or_else(Utc::now)))?
        .clone();
    entry.persist(&next.to_document())?;
    entry.session = next;
    Ok((StatusCode::CREATED, Json(applied)))
}

async fn start_oracle(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let handle = app.store.get(&id)?;
    let Some(oracle) = app.oracle.clone() else {
        return Err(ApiError::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "OracleUnavailable",
            "no oracle is configured",
        ));
    };
    let (generation, state, events) = {
        let mut entry = handle.lock().await;
        if matches!(entry.oracle.status, OracleStatus::Pending) {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "OraclePending",
                "an oracle call is already in flight",
            ));
        }
        entry.oracle.generation += 1;
        entry.oracle.status = OracleStatus::Pending;
        (
            entry.oracle.generation,
            entry.session.state().clone(),
            entry.session.events().to_vec(),
        )
    };

    tokio::spawn(async move {
        let result = tokio::task::spawn_blocking(move || oracle.propose(&state, &events))
            .await
            .unwrap_or_else(|e| Err(OracleError::Unavailable(e.to_string())));
        let mut entry = handle.lock().await;
        if entry.oracle.generation != generation {
            return;
        }
        entry.oracle.status = match result {
            Err(e) => OracleStatus::Failed {
                error: e.code(),
                message: e.to_string(),
            },
            Ok(raw) => {
                // Validated against the log as it is now, which may have
                // moved on while the oracle was thinking.
                let proposal = validate_proposal(entry.session.state(), &raw);
                let mut next = entry.session.clone();
                match apply_proposal(&mut next, &proposal) {
                    Err(e) => OracleStatus::Failed {
                        error: e.code(),
                        message: e.to_string(),
                    },
                    Ok(applied) => match entry.persist(&next.to_document()) {
                        Err(e) => OracleStatus::Failed {
                            error: "StorageError",
                            message: e.to_string(),
                        },
                        Ok(()) => {
                            entry.session = next;
                            OracleStatus::Ready { proposal, applied }
                        }
                    },
                }
            }
        };
    });
    Ok((StatusCode::ACCEPTED, Json(json!({"status": "pending"}))))
}

async fn cancel_oracle(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let handle = app.store.get(&id)?;
    let mut entry = handle.lock().await;
    let was_pending = matches!(entry.oracle.status, OracleStatus::Pending);
    if was_pending {
        entry.oracle.generation += 1;
        entry.oracle.status = OracleStatus::Idle;
    }
    Ok(Json(json!({"cancelled": was_pending})))
}

async fn get_proposals(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let handle = app.store.get(&id)?;
    let entry = handle.lock().await;
    let status = match &entry.oracle.status {
        OracleStatus::Failed { error: "OracleUnavailable", .. } => StatusCode::SERVICE_UNAVAILABLE,
        OracleStatus::Failed { error: "MalformedResponse", .. } => StatusCode::BAD_GATEWAY,
        OracleStatus::Failed { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::OK,
    };
    Ok((status, Json(json!(entry.oracle.status))))
}

async fn get_base(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let handle = app.store.get(&id)?;
    let entry = handle.lock().await;
    Ok(Json(extract_base(entry.session.state()).to_document()))
}

async fn get_issues(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let handle = app.store.get(&id)?;
    let entry = handle.lock().await;
    let s = &entry.session;
    Ok(Json(json!(export_issues(s.events(), s.state()))))
}

async fn base_of_session(app: &AppState, id: &str) -> ApiResult<MaterialBase> {
    let handle = app.store.get(id)?;
    let entry = handle.lock().await;
    Ok(extract_base(entry.session.state()))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f).await.map_err(|e| {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string())
    })?
}

async fn get_analysis(State(app): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let base = base_of_session(&app, &id).await?;
    blocking(move || {
        Ok(Json(json!({
            "containmentAudit": containment_audit(&base),
            "transitivityGaps": transitivity_gaps(&base),
            "monotonicityDefeats": monotonicity_defeats(&base),
        })))
    })
    .await
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct ProveRequest {
    #[serde(default)]
    base: Option<Value>,
    #[serde(default)]
    session_id: Option<String>,
    sequent: String,
    #[serde(default = "yes")]
    proof: bool,
}

fn yes() -> bool {
    true
}

async fn prove(
    State(app): State<Shared>,
    payload: Result<Json<ProveRequest>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let req = body(payload)?;
    let base = match (req.base, req.session_id) {
        (Some(doc), None) => load_base_value(doc)?,
        (None, Some(id)) => base_of_session(&app, &id).await?,
        _ => {
            return Err(ApiError::bad_request(
                "InvalidBody",
                "give exactly one of `base` and `sessionId`",
            ))
        }
    };
    let sequent = parse_sequent(&req.sequent)?;
    blocking(move || {
        let r = derivable_with(&base, &sequent, ProverConfig::default())?;
        let mut out = json!({
            "sequent": sequent.canonical(),
            "derivable": r.derivable,
            "stats": r.stats,
        });
        if req.proof {
            if let Some(p) = &r.proof {
                out["proof"] = p.to_json();
            }
        }
        Ok(Json(out))
    })
    .await
}

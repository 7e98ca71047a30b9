//! HTTP API over the registrar and validator.
//!
//! Bodies are JSON except the batch endpoints, which take the envelope CSV
//! and return the plain-text report produced by
//! [`BatchReport::to_text`](sigcode_core::validation::BatchReport::to_text).
//! `docs/api.md` lists every route and field.

mod auth;
mod error;
mod limiter;
pub mod wire;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use sigcode_core::registrar::Actor;
use sigcode_core::validation::{
    notification_list, parse_envelope_csv, validate_batch, validate_envelope, BatchReport, Notification,
};
use sigcode_core::{CodeFormat, EnvelopeRecord, Registrar, RegistrationFields, ValidationConfig, ValidationResult};

pub use auth::{ApiSession, Principal, Sessions};
pub use error::ApiError;
pub use limiter::RateLimiter;
use wire::*;

pub const DEFAULT_CODE_READS_PER_MINUTE: u32 = 10;
pub const OFFICIAL_TOKEN_ENV: &str = "SIGCODE_OFFICIAL_TOKEN";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub official_token: String,
    pub validation: ValidationConfig,
    pub code_reads_per_minute: u32,
    pub session_ttl: Duration,
    /// Store file rewritten after every mutation, if set.
    pub store_path: Option<PathBuf>,
    /// Directory where batch reports are archived, if set.
    pub batch_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            official_token: String::new(),
            validation: ValidationConfig::default(),
            code_reads_per_minute: DEFAULT_CODE_READS_PER_MINUTE,
            session_ttl: Duration::hours(12),
            store_path: None,
            batch_dir: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ArchivedBatch {
    summary: BatchSummary,
    report: BatchReport,
}

struct Inner {
    registrar: RwLock<Registrar>,
    sessions: Mutex<Sessions>,
    limiter: Mutex<RateLimiter>,
    batches: Mutex<BTreeMap<String, ArchivedBatch>>,
    config: ServiceConfig,
}

/// Shared handle passed to every handler.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(registrar: Registrar, config: ServiceConfig) -> std::io::Result<Self> {
        let mut batches = BTreeMap::new();
        if let Some(dir) = &config.batch_dir {
            std::fs::create_dir_all(dir)?;
            for batch in read_archive(dir)? {
                batches.insert(batch.summary.batch_id.clone(), batch);
            }
        }
        Ok(AppState(Arc::new(Inner {
            sessions: Mutex::new(Sessions::new(config.official_token.clone(), config.session_ttl)),
            limiter: Mutex::new(RateLimiter::per_minute(config.code_reads_per_minute)),
            registrar: RwLock::new(registrar),
            batches: Mutex::new(batches),
            config,
        })))
    }

    /// Read access to the registrar, e.g. for tests comparing against direct calls.
    pub fn with_registrar<R>(&self, f: impl FnOnce(&Registrar) -> R) -> R {
        f(&self.0.registrar.read().expect("registrar lock"))
    }

    fn now(&self) -> DateTime<Utc> {
        self.with_registrar(|r| r.clock().now())
    }

    fn principal(&self, headers: &HeaderMap) -> Result<Principal, ApiError> {
        let token = headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .ok_or(ApiError::Unauthenticated)?;
        let now = self.now();
        self.0
            .sessions
            .lock()
            .expect("session lock")
            .authenticate(token.trim(), now)
            .ok_or(ApiError::Unauthenticated)
    }

    fn official(&self, headers: &HeaderMap) -> Result<(), ApiError> {
        match self.principal(headers)? {
            Principal::Official => Ok(()),
            Principal::Voter(_) => Err(ApiError::Unauthenticated),
        }
    }

    fn for_voter(&self, headers: &HeaderMap, voter_id: &str) -> Result<Principal, ApiError> {
        let p = self.principal(headers)?;
        if p.may_access(voter_id) {
            Ok(p)
        } else {
            Err(ApiError::Forbidden(voter_id.to_owned()))
        }
    }

    fn persist(&self, registrar: &Registrar) -> Result<(), ApiError> {
        if let Some(path) = &self.0.config.store_path {
            registrar.save_store(path)?;
        }
        Ok(())
    }

    fn issue_session(&self, voter_id: &str, now: DateTime<Utc>) -> ApiSession {
        self.0.sessions.lock().expect("session lock").issue_voter(voter_id, now)
    }
}

fn read_archive(dir: &Path) -> std::io::Result<Vec<ArchivedBatch>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let batch = serde_json::from_slice(&std::fs::read(&path)?).map_err(|e| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", path.display()))
            })?;
            out.push(batch);
        }
    }
    Ok(out)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/voters", post(register))
        .route("/v1/voters/{voter_id}", get(get_voter))
        .route("/v1/voters/{voter_id}/sessions", post(new_session))
        .route("/v1/voters/{voter_id}/rotate", post(rotate))
        .route("/v1/voters/{voter_id}/elections/{election_id}/code", get(current_code))
        .route("/v1/voters/{voter_id}/elections/{election_id}/advance", post(advance))
        .route("/v1/elections", post(open_election))
        .route("/v1/envelopes", post(validate_one))
        .route("/v1/batches", post(validate_batch_route).get(list_batches))
        .route("/v1/batches/{batch_id}", get(get_batch))
        .route("/v1/batches/{batch_id}/notifications", get(get_notifications))
        .with_state(state)
}

/// Serves until the listener fails or the future is dropped.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    tracing::info!(addr = ?listener.local_addr().ok(), "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn health() -> &'static str {
    "ok\n"
}

async fn register(
    State(s): State<AppState>,
    headers: HeaderMap,
    Json(req): Json<RegisterRequest>,
) -> Result<(StatusCode, Json<SecretDisclosure>), ApiError> {
    s.official(&headers)?;
    let mut r = s.0.registrar.write().expect("registrar lock");
    let reg = r.register_voter(RegistrationFields::new(req.name, req.address, req.dob))?;
    s.persist(&r)?;
    let session = s.issue_session(&reg.voter_id, r.clock().now());
    Ok((
        StatusCode::CREATED,
        Json(SecretDisclosure {
            voter_id: reg.voter_id,
            secret_hex: reg.secret.to_hex(),
            secret_version: reg.secret.version(),
            voter_token: session.token,
            token_expires_at: session.expires_at,
        }),
    ))
}

async fn get_voter(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath(voter_id): UrlPath<String>,
) -> Result<Json<VoterView>, ApiError> {
    s.for_voter(&headers, &voter_id)?;
    s.with_registrar(|r| {
        r.voter(&voter_id)
            .map(|v| Json(VoterView::from(v)))
            .ok_or_else(|| ApiError::NotFound(format!("unknown voter {voter_id}")))
    })
}

async fn new_session(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath(voter_id): UrlPath<String>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    s.official(&headers)?;
    if s.with_registrar(|r| r.voter(&voter_id).is_none()) {
        return Err(ApiError::NotFound(format!("unknown voter {voter_id}")));
    }
    let session = s.issue_session(&voter_id, s.now());
    Ok((
        StatusCode::CREATED,
        Json(SessionView {
            voter_id,
            voter_token: session.token,
            token_expires_at: session.expires_at,
        }),
    ))
}

async fn rotate(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath(voter_id): UrlPath<String>,
) -> Result<Json<SecretDisclosure>, ApiError> {
    let principal = s.principal(&headers)?;
    let mut r = s.0.registrar.write().expect("registrar lock");
    if r.voter(&voter_id).is_none() {
        return Err(ApiError::NotFound(format!("unknown voter {voter_id}")));
    }
    let actor = match &principal {
        Principal::Official => Actor::Official,
        Principal::Voter(own) if *own == voter_id => Actor::Voter,
        Principal::Voter(_) => return Err(ApiError::Forbidden(voter_id)),
    };
    let secret = r.rotate_secret(&voter_id, actor)?;
    s.persist(&r)?;
    let session = s.issue_session(&voter_id, r.clock().now());
    Ok(Json(SecretDisclosure {
        voter_id,
        secret_hex: secret.to_hex(),
        secret_version: secret.version(),
        voter_token: session.token,
        token_expires_at: session.expires_at,
    }))
}

fn code_view(r: &Registrar, voter_id: &str, election_id: &str) -> Result<CodeView, ApiError> {
    let numeric = r.current_code(voter_id, election_id, CodeFormat::NUMERIC_20)?;
    let words = r.current_code(voter_id, election_id, CodeFormat::WORDS_6)?;
    Ok(CodeView::new(voter_id, numeric, words))
}

async fn current_code(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath((voter_id, election_id)): UrlPath<(String, String)>,
) -> Result<Json<CodeView>, ApiError> {
    s.for_voter(&headers, &voter_id)?;
    let now = s.now();
    s.0.limiter
        .lock()
        .expect("limiter lock")
        .check(&voter_id, now)
        .map_err(|retry_after| ApiError::RateLimited { retry_after })?;
    s.with_registrar(|r| code_view(r, &voter_id, &election_id)).map(Json)
}

async fn advance(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath((voter_id, election_id)): UrlPath<(String, String)>,
) -> Result<Json<CodeView>, ApiError> {
    s.for_voter(&headers, &voter_id)?;
    let mut r = s.0.registrar.write().expect("registrar lock");
    r.advance_index(&voter_id, &election_id)?;
    s.persist(&r)?;
    code_view(&r, &voter_id, &election_id).map(Json)
}

async fn open_election(
    State(s): State<AppState>,
    headers: HeaderMap,
    Json(req): Json<ElectionRequest>,
) -> Result<(StatusCode, Json<ElectionCreated>), ApiError> {
    s.official(&headers)?;
    if req.election_id.trim().is_empty() {
        return Err(ApiError::BadRequest("election_id is empty".into()));
    }
    let mut r = s.0.registrar.write().expect("registrar lock");
    r.open_election(&req.election_id)?;
    s.persist(&r)?;
    Ok((
        StatusCode::CREATED,
        Json(ElectionCreated {
            election_id: req.election_id,
        }),
    ))
}

#[derive(Debug, Deserialize)]
struct ValidationParams {
    window: Option<u32>,
    back_scan: Option<u32>,
}

impl ValidationParams {
    fn apply(&self, base: &ValidationConfig) -> ValidationConfig {
        ValidationConfig::new(
            self.window.unwrap_or(base.window),
            self.back_scan.unwrap_or(base.back_scan),
        )
        .with_execution(base.execution)
    }
}

async fn validate_one(
    State(s): State<AppState>,
    headers: HeaderMap,
    Query(params): Query<ValidationParams>,
    Json(req): Json<EnvelopeRequest>,
) -> Result<Json<ValidationResult>, ApiError> {
    s.official(&headers)?;
    let config = params.apply(&s.0.config.validation);
    let mut r = s.0.registrar.write().expect("registrar lock");
    let envelope = EnvelopeRecord {
        envelope_id: req
            .envelope_id
            .unwrap_or_else(|| format!("SINGLE-{}", r.audit().len() + 1)),
        voter_id: req.voter_id,
        election_id: req.election_id,
        code_text: req.code_text,
        received_at: r.clock().now(),
    };
    let result = validate_envelope(&mut r, &envelope, &config);
    s.persist(&r)?;
    Ok(Json(result))
}

fn text_response(status: StatusCode, body: String, batch_id: Option<&str>) -> Response {
    let mut resp = (status, body).into_response();
    let headers = resp.headers_mut();
    headers.insert(
        header::CONTENT_TYPE,
        HeaderValue::from_static("text/plain; charset=utf-8"),
    );
    if let Some(id) = batch_id.and_then(|id| HeaderValue::from_str(id).ok()) {
        headers.insert("x-batch-id", id);
    }
    resp
}

async fn validate_batch_route(
    State(s): State<AppState>,
    headers: HeaderMap,
    Query(params): Query<ValidationParams>,
    body: String,
) -> Result<Response, ApiError> {
    s.official(&headers)?;
    let envelopes = parse_envelope_csv(body.as_bytes())?;
    let config = params.apply(&s.0.config.validation);
    let (report, created_at): (BatchReport, _) = {
        let mut r = s.0.registrar.write().expect("registrar lock");
        let report = validate_batch(&mut r, envelopes, &config);
        s.persist(&r)?;
        let now = r.clock().now();
        (report, now)
    };
    let text = report.to_text();
    let mut batches = s.0.batches.lock().expect("batch lock");
    let batch_id = format!("B{:06}", batches.len() + 1);
    let batch = ArchivedBatch {
        summary: BatchSummary {
            batch_id: batch_id.clone(),
            created_at,
            envelopes: report.results.len(),
            counts: report.summary.iter().map(|(d, n)| (d.as_str().to_owned(), n)).collect(),
        },
        report,
    };
    if let Some(dir) = &s.0.config.batch_dir {
        let json = serde_json::to_vec_pretty(&batch).map_err(|e| ApiError::Internal(e.to_string()))?;
        std::fs::write(dir.join(format!("{batch_id}.json")), json).map_err(|e| ApiError::Internal(e.to_string()))?;
    }
    let envelopes = batch.report.results.len();
    batches.insert(batch_id.clone(), batch);
    tracing::info!(%batch_id, envelopes, "batch validated");
    Ok(text_response(StatusCode::OK, text, Some(&batch_id)))
}

fn archived(s: &AppState, batch_id: &str) -> Result<ArchivedBatch, ApiError> {
    s.0.batches
        .lock()
        .expect("batch lock")
        .get(batch_id)
        .cloned()
        .ok_or_else(|| ApiError::NotFound(format!("unknown batch {batch_id}")))
}

async fn get_batch(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath(batch_id): UrlPath<String>,
) -> Result<Response, ApiError> {
    s.official(&headers)?;
    let batch = archived(&s, &batch_id)?;
    Ok(text_response(
        StatusCode::OK,
        batch.report.to_text(),
        Some(&batch.summary.batch_id),
    ))
}

async fn get_notifications(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath(batch_id): UrlPath<String>,
) -> Result<Json<Vec<Notification>>, ApiError> {
    s.official(&headers)?;
    Ok(Json(notification_list(&archived(&s, &batch_id)?.report)))
}

async fn list_batches(State(s): State<AppState>, headers: HeaderMap) -> Result<Json<Vec<BatchSummary>>, ApiError> {
    s.official(&headers)?;
    Ok(Json(
        s.0.batches
            .lock()
            .expect("batch lock")
            .values()
            .map(|b| b.summary.clone())
            .collect(),
    ))
}

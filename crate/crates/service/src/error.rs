use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use sigcode_core::registrar::RegistrarError;
use sigcode_core::validation::BatchInputError;

use crate::wire::ErrorBody;

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("missing or invalid bearer token")]
    Unauthenticated,
    #[error("principal may not access voter {0}")]
    Forbidden(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("batch line {line}: {message}")]
    BadBatch { line: u64, message: String },
    #[error("rate limit exceeded; retry in {retry_after}s")]
    RateLimited { retry_after: u64 },
    #[error("internal error: {0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            // A voter touching another record is treated as unauthenticated for it.
            ApiError::Unauthenticated | ApiError::Forbidden(_) => StatusCode::UNAUTHORIZED,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Conflict(_) => StatusCode::CONFLICT,
            ApiError::BadRequest(_) | ApiError::BadBatch { .. } => StatusCode::BAD_REQUEST,
            ApiError::RateLimited { .. } => StatusCode::TOO_MANY_REQUESTS,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ApiError::Unauthenticated => "unauthenticated",
            ApiError::Forbidden(_) => "wrong_principal",
            ApiError::NotFound(_) => "not_found",
            ApiError::Conflict(_) => "conflict",
            ApiError::BadRequest(_) => "bad_request",
            ApiError::BadBatch { .. } => "bad_batch",
            ApiError::RateLimited { .. } => "rate_limited",
            ApiError::Internal(_) => "internal",
        }
    }
}

impl From<RegistrarError> for ApiError {
    fn from(e: RegistrarError) -> Self {
        use RegistrarError::*;
        match e {
            UnknownVoter(_) | UnknownElection(_) => ApiError::NotFound(e.to_string()),
            DuplicateRegistration { .. } | DuplicateElection(_) | ChainExhausted { .. } | VoterSuspended(_) => {
                ApiError::Conflict(e.to_string())
            }
            MissingField(_) | Codegen(_) => ApiError::BadRequest(e.to_string()),
            StoreCorrupt { .. } | WordlistMismatch { .. } | ReplayDivergence { .. } | Io(_) => {
                ApiError::Internal(e.to_string())
            }
        }
    }
}

impl From<BatchInputError> for ApiError {
    fn from(e: BatchInputError) -> Self {
        ApiError::BadBatch {
            line: e.line,
            message: e.message,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code().to_owned(),
            message: self.to_string(),
            line: match &self {
                ApiError::BadBatch { line, .. } => Some(*line),
                _ => None,
            },
        };
        let mut resp = (self.status(), Json(body)).into_response();
        if let ApiError::RateLimited { retry_after } = self {
            if let Ok(v) = HeaderValue::from_str(&retry_after.to_string()) {
                resp.headers_mut().insert(header::RETRY_AFTER, v);
            }
        }
        resp
    }
}

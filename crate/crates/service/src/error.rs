use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use thiserror::Error;
use tw_core::env::EnvError;

use crate::protocol::{ErrorBody, ErrorResponse, PROTOCOL_VERSION};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("unsupported protocol version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown message kind `{0}`")]
    UnknownKind(String),
    #[error("invalid game")]
    InvalidGame(Vec<String>),
    #[error("session limit of {0} reached")]
    QuotaExceeded(usize),
    #[error("no session `{0}`")]
    UnknownSession(String),
    #[error("the session is finished")]
    SessionFinished,
    #[error("choice {index} out of range ({len} choices)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("input does not match the session mode: {0}")]
    WrongMode(String),
    #[error("the map needs a session created with full_state observability")]
    ObservabilityDenied,
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::InvalidRequest(_) => "invalid_request",
            ServiceError::UnsupportedVersion(_) => "unsupported_version",
            ServiceError::UnknownKind(_) => "unknown_kind",
            ServiceError::InvalidGame(_) => "invalid_game",
            ServiceError::QuotaExceeded(_) => "quota_exceeded",
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::SessionFinished => "session_finished",
            ServiceError::IndexOutOfRange { .. } => "index_out_of_range",
            ServiceError::WrongMode(_) => "wrong_mode",
            ServiceError::ObservabilityDenied => "observability_denied",
            ServiceError::Internal(_) => "internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::InvalidRequest(_)
            | ServiceError::UnsupportedVersion(_)
            | ServiceError::UnknownKind(_)
            | ServiceError::IndexOutOfRange { .. }
            | ServiceError::WrongMode(_) => StatusCode::BAD_REQUEST,
            ServiceError::InvalidGame(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::QuotaExceeded(_) => StatusCode::TOO_MANY_REQUESTS,
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::SessionFinished => StatusCode::CONFLICT,
            ServiceError::ObservabilityDenied => StatusCode::FORBIDDEN,
            ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            code: self.code().to_string(),
            message: self.to_string(),
            diagnostics: match self {
                ServiceError::InvalidGame(d) => d.clone(),
                _ => Vec::new(),
            },
        }
    }
}

impl From<EnvError> for ServiceError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::InvalidGame(d) => ServiceError::InvalidGame(d),
            EnvError::UnsupportedFormat(_) | EnvError::Load(_) => {
                ServiceError::InvalidGame(vec![e.to_string()])
            }
            EnvError::SessionFinished => ServiceError::SessionFinished,
            EnvError::IndexOutOfRange { index, len } => {
                ServiceError::IndexOutOfRange { index, len }
            }
            EnvError::WrongMode(m) => {
                ServiceError::WrongMode(format!("this input needs {m:?} mode"))
            }
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let body = ErrorResponse {
            protocol_version: PROTOCOL_VERSION,
            error: self.body(),
        };
        (self.status(), Json(body)).into_response()
    }
}

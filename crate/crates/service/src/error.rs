use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use f1champ_core::championship::{EngineError, Violation};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("missing or unknown session token")]
    Unauthorized,
    #[error("this action needs the {0} role")]
    Forbidden(&'static str),
    #[error("{0} not found")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("request rejected")]
    Rejected(Vec<Violation>),
    #[error("{0}")]
    Invalid(String),
    #[error("storage error: {0}")]
    Storage(#[from] std::io::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::UnknownTeam(id) => ApiError::NotFound(format!("team {id}")),
            EngineError::BadTeamName => ApiError::Invalid(e.to_string()),
            EngineError::RegistrationClosed | EngineError::RaceClosed { .. } | EngineError::RaceNotOpen { .. } => {
                ApiError::Conflict(e.to_string())
            }
            EngineError::Rejected(v) => ApiError::Rejected(v),
        }
    }
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::Unauthorized => StatusCode::UNAUTHORIZED,
            ApiError::Forbidden(_) => StatusCode::FORBIDDEN,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Conflict(_) => StatusCode::CONFLICT,
            ApiError::Rejected(_) | ApiError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Storage(_) | ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = self.status();
        if status.is_server_error() {
            tracing::error!("{self}");
        }
        let body = match &self {
            ApiError::Rejected(v) => json!({ "error": self.to_string(), "violations": v }),
            _ => json!({ "error": self.to_string() }),
        };
        (status, Json(body)).into_response()
    }
}

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use scoutbench_core::{AnalyticsError, ScoringError};

/// Error body returned by every endpoint: `{status, code, message, detail?}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(rename = "status")]
    pub http_status: u16,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            http_status: status.as_u16(),
            code,
            message: message.into(),
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn bad_param(param: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_parameter", message).with_detail(param)
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn status(&self) -> StatusCode {
        StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self)).into_response()
    }
}

impl From<ScoringError> for ApiError {
    fn from(err: ScoringError) -> Self {
        let msg = err.to_string();
        match err {
            ScoringError::UnknownFeature(f) => {
                Self::new(StatusCode::BAD_REQUEST, "unknown_feature", msg).with_detail(f)
            }
            ScoringError::NonFiniteWeight { feature } => {
                Self::new(StatusCode::BAD_REQUEST, "invalid_weight", msg).with_detail(feature)
            }
            ScoringError::EmptyName => Self::new(StatusCode::BAD_REQUEST, "invalid_name", msg),
            ScoringError::DuplicateName(name) => {
                Self::new(StatusCode::CONFLICT, "duplicate_name", msg).with_detail(name)
            }
            ScoringError::ProfileNotFound(id) => {
                Self::not_found("profile_not_found", msg).with_detail(id)
            }
            ScoringError::NoRecords(_) | ScoringError::EmptyRole(_) => {
                Self::not_found("no_records", msg)
            }
            ScoringError::Misaligned { .. } | ScoringError::Store { .. } => {
                tracing::error!(error = %msg, "scoring failure");
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", msg)
            }
        }
    }
}

impl From<AnalyticsError> for ApiError {
    fn from(err: AnalyticsError) -> Self {
        let msg = err.to_string();
        match err {
            AnalyticsError::InvalidArgument(_) => {
                Self::new(StatusCode::BAD_REQUEST, "invalid_parameter", msg)
            }
            AnalyticsError::PlayerNotFound(id) => {
                Self::not_found("player_not_found", msg).with_detail(id.to_string())
            }
            AnalyticsError::NoEvents(id) => {
                Self::not_found("no_events", msg).with_detail(id.to_string())
            }
            AnalyticsError::UndefinedTrend(_) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "undefined_trend", msg)
            }
        }
    }
}

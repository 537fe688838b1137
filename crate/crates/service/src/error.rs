use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use provrisk_core::{DistributionDiagnostic, Error as CoreError};
use provrisk_store::StoreError;
use serde::Serialize;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub error: String,
    /// Name of the violated invariant, for 400 responses.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Vec<DistributionDiagnostic>>,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: message.into(),
                invariant: None,
                diagnostics: None,
            },
        }
    }

    pub fn bad_request(invariant: &str, message: impl Into<String>) -> Self {
        let mut err = Self::new(StatusCode::BAD_REQUEST, message);
        err.body.invariant = Some(invariant.to_owned());
        err
    }

    pub fn conflict(expected: u64, current: u64) -> Self {
        Self::new(
            StatusCode::CONFLICT,
            format!("stale write: expected version {expected}, current version is {current}"),
        )
    }
}

impl From<CoreError> for ApiError {
    fn from(err: CoreError) -> Self {
        let message = err.to_string();
        match err {
            CoreError::Rejected(diagnostics) => {
                let mut api = Self::new(StatusCode::UNPROCESSABLE_ENTITY, message);
                api.body.diagnostics = Some(diagnostics);
                api
            }
            CoreError::UnknownId { kind, .. } if kind != "factor" => {
                Self::new(StatusCode::NOT_FOUND, message)
            }
            CoreError::Invariant { invariant, .. } => Self::bad_request(invariant, message),
            CoreError::LengthMismatch { .. } => {
                Self::bad_request("lengths match the pocket scale", message)
            }
            CoreError::FactorSetMismatch { .. } | CoreError::UnknownId { .. } => {
                Self::bad_request("every catalog factor is covered exactly once", message)
            }
            CoreError::DuplicateId { .. } => Self::bad_request("ids are unique", message),
            CoreError::Degenerate(_) | CoreError::Empty(_) | CoreError::UndefinedCorrelation(_) => {
                Self::bad_request("input is non-degenerate", message)
            }
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(err: StoreError) -> Self {
        match err {
            StoreError::Domain(e) => e.into(),
            StoreError::Integrity(_) => Self::new(StatusCode::CONFLICT, err.to_string()),
            StoreError::Io { .. } if err.is_not_found() => {
                Self::new(StatusCode::NOT_FOUND, err.to_string())
            }
            _ => Self::new(StatusCode::INTERNAL_SERVER_ERROR, err.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

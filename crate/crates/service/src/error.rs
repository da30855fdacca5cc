use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use tagstock_core::InventoryError;

/// Error body: `{"code": "...", "message": "..."}` with a matching status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "BAD_REQUEST", message)
    }
}

/// Status for each core error code. Caller faults are 4xx; 500 is kept for
/// storage failures, which are not modelled outcomes.
pub fn status_for(code: &str) -> StatusCode {
    match code {
        "DUPLICATE_SKU" | "ALREADY_SOLD" | "ITEM_SOLD" => StatusCode::CONFLICT,
        "UNKNOWN_PRODUCT" | "UNKNOWN_CARRIER" | "UNKNOWN_SKU" => StatusCode::NOT_FOUND,
        "TAG_LOCKED" => StatusCode::LOCKED,
        "INVALID_NAME"
        | "INVALID_DATES"
        | "CAPACITY_EXCEEDED"
        | "SCAN_FAILED"
        | "MALFORMED_PAYLOAD"
        | "IMMUTABLE_CARRIER"
        | "NOT_BARCODE_CARRIER" => StatusCode::UNPROCESSABLE_ENTITY,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl From<InventoryError> for ApiError {
    fn from(err: InventoryError) -> Self {
        let code = err.code();
        let status = status_for(code);
        if status.is_server_error() {
            tracing::error!(%err, "store failure");
        }
        ApiError::new(status, code, err.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(rejection: JsonRejection) -> Self {
        ApiError::bad_request(rejection.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(rejection: QueryRejection) -> Self {
        ApiError::bad_request(rejection.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.code.to_owned(),
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

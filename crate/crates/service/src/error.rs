use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use manasik_core::retrieval::RetrievalError;
use serde::Serialize;
use serde_json::Value;

/// The one error body every endpoint uses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code,
                message: message.into(),
                detail: Value::Null,
            },
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.body.detail = detail;
        self
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn unprocessable(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }
}

impl From<RetrievalError> for ApiError {
    fn from(e: RetrievalError) -> Self {
        let message = e.to_string();
        match e {
            RetrievalError::InvalidK => ApiError::bad_request("invalid_k", message),
            RetrievalError::Alpha(_) => ApiError::bad_request("invalid_alpha", message),
            RetrievalError::UnknownContext(id) => {
                ApiError::unprocessable("unknown_context", message).with_detail(id.into())
            }
            RetrievalError::UnknownConcept(id) => {
                ApiError::unprocessable("unknown_concept", message).with_detail(id.into())
            }
            RetrievalError::Overlap(v) => ApiError::unprocessable("judgment_overlap", message)
                .with_detail(v.iter().map(|v| v.as_str()).collect::<Vec<_>>().into()),
            RetrievalError::NotPresented(v) => ApiError::unprocessable("not_presented", message)
                .with_detail(v.iter().map(|v| v.as_str()).collect::<Vec<_>>().into()),
        }
    }
}

impl From<manasik_core::Error> for ApiError {
    fn from(e: manasik_core::Error) -> Self {
        match e {
            manasik_core::Error::Retrieval(r) => r.into(),
            other => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

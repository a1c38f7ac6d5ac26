use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

use elenchus_core::base::BaseError;
use elenchus_core::dialectic::DialecticError;
use elenchus_core::formula::ParseError;
use elenchus_core::opponent::OracleError;
use elenchus_core::prover::ProverError;

use crate::store::StoreError;

/// Every error body is `{"error": CODE, "message": TEXT}`, plus `offset`
/// for parse errors.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub offset: Option<usize>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            offset: None,
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({"error": self.code, "message": self.message});
        if let Some(o) = self.offset {
            body["offset"] = json!(o);
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<DialecticError> for ApiError {
    fn from(e: DialecticError) -> Self {
        Self::new(StatusCode::CONFLICT, e.code(), e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(_) => Self::new(StatusCode::NOT_FOUND, "UnknownSession", e.to_string()),
            StoreError::Corrupt(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "CorruptSession", e.to_string()),
            StoreError::Io(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "StorageError", e.to_string()),
        }
    }
}

impl From<std::io::Error> for ApiError {
    fn from(e: std::io::Error) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "StorageError", e.to_string())
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> Self {
        ApiError {
            offset: e.offset(),
            ..Self::bad_request("ParseError", e.to_string())
        }
    }
}

impl From<BaseError> for ApiError {
    fn from(e: BaseError) -> Self {
        match e {
            BaseError::Format(_) => Self::bad_request("InvalidBase", e.to_string()),
            BaseError::UnknownAtom(_) => Self::bad_request("UnknownAtom", e.to_string()),
        }
    }
}

impl From<ProverError> for ApiError {
    fn from(e: ProverError) -> Self {
        match e {
            ProverError::UnknownAtom(_) => Self::bad_request("UnknownAtom", e.to_string()),
            ProverError::ResourceLimit(_) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "ResourceLimit", e.to_string())
            }
        }
    }
}

impl From<OracleError> for ApiError {
    fn from(e: OracleError) -> Self {
        let status = match e {
            OracleError::Unavailable(_) => StatusCode::SERVICE_UNAVAILABLE,
            OracleError::MalformedResponse(_) => StatusCode::BAD_GATEWAY,
            OracleError::EmptyDocument => StatusCode::BAD_REQUEST,
        };
        Self::new(status, e.code(), e.to_string())
    }
}

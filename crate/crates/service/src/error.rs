use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use vibrancy_core::Error;

use crate::query::QueryError;

/// JSON error response: `{"error": <kind>, "message": <text>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct Body<'a> {
    error: &'a str,
    message: &'a str,
}

impl ApiError {
    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            kind: "invalid_parameter",
            message: message.into(),
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(err: QueryError) -> Self {
        let message = err.to_string();
        let (status, kind) = match &err {
            QueryError::BadParameter(_) => (StatusCode::BAD_REQUEST, "invalid_parameter"),
            QueryError::UnknownCountry(_) => (StatusCode::NOT_FOUND, "unknown_country"),
            QueryError::Core(core) => match core {
                Error::UnknownYear(_) => (StatusCode::NOT_FOUND, "unknown_year"),
                Error::UnknownSubIndex(_) => (StatusCode::NOT_FOUND, "unknown_sub_index"),
                Error::UnknownIndicator(_) => (StatusCode::NOT_FOUND, "unknown_indicator"),
                Error::UnknownPillar(_) => (StatusCode::BAD_REQUEST, "invalid_parameter"),
                Error::WeightOutOfRange { .. } => (StatusCode::BAD_REQUEST, "weight_out_of_range"),
                Error::EmptyYearRange { .. } => (StatusCode::BAD_REQUEST, "invalid_parameter"),
                Error::ZeroWeightSum { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "zero_weight_sum"),
                Error::MissingPopulation { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "missing_population"),
                _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
            },
        };
        ApiError { status, kind, message }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            error: self.kind,
            message: &self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

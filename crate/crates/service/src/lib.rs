//! Read-only JSON API over one loaded [`DatasetBundle`].
//!
//! The bundle is shared behind an `Arc` and never mutated; weight overrides
//! live only for the request that carries them.

mod error;
pub mod query;

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::routing::get;
use axum::{Json, Router};
use serde::Deserialize;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;
use vibrancy_core::ingest::{compute_coverage, CoverageReport};
use vibrancy_core::{DatasetBundle, RankTrajectory, RankingTable, WeightOverrides, Year};

pub use error::ApiError;
use query::{MetaResponse, MetricSeries};

type Shared = Arc<DatasetBundle>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankingParams {
    pub year: Option<Year>,
    #[serde(default)]
    pub per_capita: bool,
    pub sub_index: Option<String>,
}

/// Body of `POST /api/v1/rankings`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankingRequest {
    pub year: Option<Year>,
    #[serde(default)]
    pub per_capita: bool,
    pub sub_index: Option<String>,
    #[serde(default)]
    pub indicator_weights: BTreeMap<String, f64>,
    #[serde(default)]
    pub pillar_weights: BTreeMap<String, f64>,
}

impl RankingRequest {
    pub fn overrides(&self) -> WeightOverrides {
        WeightOverrides {
            indicator_weights: self.indicator_weights.clone(),
            pillar_weights: self.pillar_weights.clone(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricParams {
    pub country: Option<String>,
    pub from: Option<Year>,
    pub to: Option<Year>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryParams {
    pub from: Option<Year>,
    pub to: Option<Year>,
    #[serde(default)]
    pub per_capita: bool,
}

fn params<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    q.map(|Query(t)| t).map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn get_rankings(
    State(bundle): State<Shared>,
    q: Result<Query<RankingParams>, QueryRejection>,
) -> Result<Json<RankingTable>, ApiError> {
    let p = params(q)?;
    let year = query::resolve_year(&bundle, p.year)?;
    let table = query::rankings(&bundle, &bundle.default_weights, year, p.per_capita, p.sub_index.as_deref())?;
    Ok(Json(table))
}

async fn post_rankings(
    State(bundle): State<Shared>,
    body: Result<Json<RankingRequest>, JsonRejection>,
) -> Result<Json<RankingTable>, ApiError> {
    let Json(req) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let weights = query::effective_weights(&bundle, &req.overrides())?;
    let year = query::resolve_year(&bundle, req.year)?;
    let table = query::rankings(&bundle, &weights, year, req.per_capita, req.sub_index.as_deref())?;
    Ok(Json(table))
}

async fn get_metric(
    State(bundle): State<Shared>,
    Path(indicator): Path<String>,
    q: Result<Query<MetricParams>, QueryRejection>,
) -> Result<Json<MetricSeries>, ApiError> {
    let p = params(q)?;
    let series = query::metric_series(&bundle, &indicator, p.country.as_deref(), p.from, p.to)?;
    Ok(Json(series))
}

async fn get_trajectories(
    State(bundle): State<Shared>,
    q: Result<Query<TrajectoryParams>, QueryRejection>,
) -> Result<Json<Vec<RankTrajectory>>, ApiError> {
    let p = params(q)?;
    let (from, to) = query::resolve_range(&bundle, p.from, p.to)?;
    let out = query::trajectories(&bundle, &bundle.default_weights, from, to, p.per_capita)?;
    Ok(Json(out))
}

async fn get_coverage(State(bundle): State<Shared>) -> Json<CoverageReport> {
    Json(compute_coverage(&bundle.observations, &bundle.metadata))
}

async fn get_meta(State(bundle): State<Shared>) -> Result<Json<MetaResponse>, ApiError> {
    Ok(Json(query::meta(&bundle)?))
}

/// All `/api/v1` routes with permissive CORS.
pub fn router(bundle: Shared) -> Router {
    Router::new()
        .route("/api/v1/rankings", get(get_rankings).post(post_rankings))
        .route("/api/v1/metrics/{indicator_id}", get(get_metric))
        .route("/api/v1/trajectories", get(get_trajectories))
        .route("/api/v1/coverage", get(get_coverage))
        .route("/api/v1/meta", get(get_meta))
        .layer(CorsLayer::permissive())
        .with_state(bundle)
}

/// Like [`router`], additionally serving a static UI bundle at `/`.
pub fn app(bundle: Shared, ui_dir: Option<PathBuf>) -> Router {
    let api = router(bundle);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(bundle: Shared, addr: SocketAddr, ui_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app(bundle, ui_dir)).await
}

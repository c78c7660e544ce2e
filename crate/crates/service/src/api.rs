//! Read-only HTTP endpoints. Every handler takes the current snapshot once
//! and stamps its version on the response and on each nested payload.

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use gridiron_core::distribution::{curve, CURVE_POINTS};
use gridiron_core::insights::{EvidenceItem, PlayerInsight};
use gridiron_core::roster::PlayerBio;
use serde::{Deserialize, Serialize};

use crate::snapshot::{Snapshot, SnapshotHandle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn not_found(message: String) -> ApiError {
        ApiError {
            status: StatusCode::NOT_FOUND,
            message,
        }
    }

    fn bad_request(message: String) -> ApiError {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message,
        }
    }

    fn internal(message: String) -> ApiError {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { error: self.message })).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerList {
    pub version: String,
    pub weeks: Vec<u32>,
    pub players: Vec<PlayerBio>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsightResponse {
    pub version: String,
    pub insight: PlayerInsight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub pdf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparePanel {
    pub version: String,
    pub insight: PlayerInsight,
    pub curve: Vec<CurvePoint>,
    pub p15: f64,
    pub p85: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareResult {
    pub version: String,
    pub week: u32,
    pub a: ComparePanel,
    pub b: ComparePanel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceResponse {
    pub version: String,
    pub player_id: String,
    pub week: u32,
    pub evidence: Vec<EvidenceItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineupEntry {
    pub version: String,
    pub player_id: String,
    pub combined_projection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineupProjection {
    pub version: String,
    pub week: u32,
    pub total: f64,
    pub players: Vec<LineupEntry>,
}

pub fn router(handle: Arc<SnapshotHandle>) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/players", get(players))
        .route("/v1/players/{id}/insight", get(insight))
        .route("/v1/players/{id}/evidence", get(evidence))
        .route("/v1/compare", get(compare))
        .route("/v1/lineup/project", post(lineup))
        .with_state(handle)
}

fn week_param(params: &HashMap<String, String>) -> Result<u32, ApiError> {
    let raw = params
        .get("week")
        .ok_or_else(|| ApiError::bad_request("missing query parameter week".into()))?;
    raw.parse()
        .map_err(|_| ApiError::bad_request(format!("week must be a non-negative integer, got {raw:?}")))
}

fn find_insight<'a>(snap: &'a Snapshot, id: &str, week: u32) -> Result<&'a PlayerInsight, ApiError> {
    if snap.player(id).is_none() {
        return Err(ApiError::not_found(format!("unknown player {id}")));
    }
    snap.insight(id, week)
        .ok_or_else(|| ApiError::not_found(format!("no insight for {id} in week {week}")))
}

async fn health(State(handle): State<Arc<SnapshotHandle>>) -> Json<Health> {
    Json(Health {
        version: handle.current().version.clone(),
    })
}

async fn players(State(handle): State<Arc<SnapshotHandle>>) -> Json<PlayerList> {
    let snap = handle.current();
    Json(PlayerList {
        version: snap.version.clone(),
        weeks: snap.weeks(),
        players: snap.roster.clone(),
    })
}

async fn insight(
    State(handle): State<Arc<SnapshotHandle>>,
    Path(id): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<InsightResponse> {
    let snap = handle.current();
    let week = week_param(&params)?;
    Ok(Json(InsightResponse {
        version: snap.version.clone(),
        insight: find_insight(&snap, &id, week)?.clone(),
    }))
}

async fn evidence(
    State(handle): State<Arc<SnapshotHandle>>,
    Path(id): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<EvidenceResponse> {
    let snap = handle.current();
    let week = week_param(&params)?;
    let i = find_insight(&snap, &id, week)?;
    Ok(Json(EvidenceResponse {
        version: snap.version.clone(),
        player_id: id,
        week,
        evidence: i.evidence.clone(),
    }))
}

/// One compare panel: the insight and its density trace over the sample
/// range.
pub fn compare_panel(snap: &Snapshot, insight: &PlayerInsight) -> Result<ComparePanel, ApiError> {
    let points = curve(&insight.fit, &insight.sample.values, CURVE_POINTS).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(ComparePanel {
        version: snap.version.clone(),
        insight: insight.clone(),
        curve: points.into_iter().map(|(x, pdf)| CurvePoint { x, pdf }).collect(),
        p15: insight.p15,
        p85: insight.p85,
    })
}

async fn compare(State(handle): State<Arc<SnapshotHandle>>, Query(params): Query<HashMap<String, String>>) -> ApiResult<CompareResult> {
    let snap = handle.current();
    let week = week_param(&params)?;
    let id = |k: &str| {
        params
            .get(k)
            .cloned()
            .ok_or_else(|| ApiError::bad_request(format!("missing query parameter {k}")))
    };
    let (a, b) = (id("a")?, id("b")?);
    let a = compare_panel(&snap, find_insight(&snap, &a, week)?)?;
    let b = compare_panel(&snap, find_insight(&snap, &b, week)?)?;
    Ok(Json(CompareResult {
        version: snap.version.clone(),
        week,
        a,
        b,
    }))
}

async fn lineup(
    State(handle): State<Arc<SnapshotHandle>>,
    Query(params): Query<HashMap<String, String>>,
    Json(ids): Json<Vec<String>>,
) -> ApiResult<LineupProjection> {
    let snap = handle.current();
    let week = week_param(&params)?;
    let mut players = Vec::with_capacity(ids.len());
    for id in &ids {
        let i = find_insight(&snap, id, week)?;
        players.push(LineupEntry {
            version: snap.version.clone(),
            player_id: id.clone(),
            combined_projection: i.combined_projection,
        });
    }
    Ok(Json(LineupProjection {
        version: snap.version.clone(),
        week,
        total: players.iter().map(|p| p.combined_projection).sum(),
        players,
    }))
}

/// Binds and serves until the process is stopped.
pub async fn serve(handle: Arc<SnapshotHandle>, bind: &str) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    eprintln!("serving {} on {}", handle.current().version, listener.local_addr()?);
    axum::serve(listener, router(handle)).await?;
    Ok(())
}

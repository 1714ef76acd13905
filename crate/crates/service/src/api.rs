use std::sync::atomic::Ordering;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use epf_core::equivalency::Matcher;
use epf_core::metrics::{full_report, AttributeReport};
use epf_core::raster::{decode_image, downscale_to_fit, encode_png};
use epf_core::{FilterDescriptor, MatchResult};
use serde::{Deserialize, Serialize};

use crate::session::{image_key, level_key, CacheKey, Entry, Session};
use crate::AppState;

type AppStateRef = State<Arc<AppState>>;

#[derive(Debug)]
pub(crate) struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionResponse {
    pub session_id: String,
    /// Dimensions of the image the session works on.
    pub width: usize,
    pub height: usize,
    pub original_width: usize,
    pub original_height: usize,
    /// Factor applied to the upload (1 when it was not downscaled).
    pub scale: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatchRequest {
    pub session_id: String,
    pub filter_id: String,
    pub level: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatchResponse {
    #[serde(rename = "match")]
    pub result: MatchResult,
    pub image_url: String,
    pub report: AttributeReport,
    /// Resolution factor of the session image relative to the upload.
    pub scale: f64,
    /// The response was served from the session cache.
    pub cached: bool,
}

pub(crate) async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not found")
}

pub(crate) async fn filters(State(state): AppStateRef) -> Json<Vec<FilterDescriptor>> {
    Json(state.registry.descriptors())
}

pub(crate) async fn create_session(State(state): AppStateRef, body: Bytes) -> Result<Json<SessionResponse>, ApiError> {
    let max_side = state.config.max_side;
    let decoded = tokio::task::spawn_blocking(move || {
        decode_image(&body).map(|img| {
            let original = img.dims();
            let (img, scale) = downscale_to_fit(&img, max_side);
            (img, original, scale)
        })
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let (img, (ow, oh), scale) = decoded.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let (width, height) = img.dims();
    let session = state.sessions.create(img, scale).map_err(|_| {
        ApiError::new(
            StatusCode::SERVICE_UNAVAILABLE,
            format!("session table is full ({} sessions)", state.sessions.limits().max_sessions),
        )
    })?;
    log::info!("session {} created ({width}x{height}, scale {scale})", session.id);
    Ok(Json(SessionResponse {
        session_id: session.id.clone(),
        width,
        height,
        original_width: ow,
        original_height: oh,
        scale,
    }))
}

fn session(state: &AppState, id: &str) -> Result<Arc<Session>, ApiError> {
    state
        .sessions
        .get(id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown session `{id}`")))
}

fn response(session: &Session, key: &CacheKey, entry: &Entry, cached: bool) -> MatchResponse {
    MatchResponse {
        result: entry.result.clone(),
        image_url: format!("/api/image/{}/{}", session.id, image_key(key)),
        report: entry.report,
        scale: session.scale,
        cached,
    }
}

/// Holds one admission slot of the compute queue.
struct Admission<'a>(&'a AppState);

impl Drop for Admission<'_> {
    fn drop(&mut self) {
        self.0.admitted.fetch_sub(1, Ordering::SeqCst);
    }
}

pub(crate) async fn match_level(
    State(state): AppStateRef,
    request: Result<Json<MatchRequest>, JsonRejection>,
) -> Result<Json<MatchResponse>, ApiError> {
    let Json(req) = request.map_err(|e| ApiError::new(e.status(), e.body_text()))?;
    if !(req.level.is_finite() && (0.0..=1.0).contains(&req.level)) {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            format!("level {} is outside [0, 1]", req.level),
        ));
    }
    let session = session(&state, &req.session_id)?;
    let filter = state
        .registry
        .get(&req.filter_id)
        .map_err(|e| ApiError::new(StatusCode::NOT_FOUND, e.to_string()))?
        .clone();
    let key: CacheKey = (req.filter_id.clone(), level_key(req.level));
    if let Some(entry) = session.get(&key) {
        return Ok(Json(response(&session, &key, &entry, true)));
    }

    if state.admitted.fetch_add(1, Ordering::SeqCst) >= state.config.queue_capacity {
        state.admitted.fetch_sub(1, Ordering::SeqCst);
        return Err(ApiError::new(StatusCode::TOO_MANY_REQUESTS, "compute queue is full"));
    }
    let _admission = Admission(&state);
    let _permit = state
        .workers
        .acquire()
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;

    // Matching uses the rounded level so that the cache key describes the
    // result exactly.
    let target = key.1 as f64 / 1000.0;
    let image = Arc::clone(&session.image);
    let computed = tokio::task::spawn_blocking(move || -> epf_core::Result<Entry> {
        let (result, out) = Matcher::new(&filter, &image).find_with_output(target)?;
        let report = full_report(&image, &out)?;
        Ok(Entry {
            result,
            report,
            png: encode_png(&out)?,
        })
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
    .map_err(|e| {
        log::warn!("match {} at {target} failed: {e}", req.filter_id);
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
    })?;
    let entry = session.insert(key.clone(), computed);
    Ok(Json(response(&session, &key, &entry, false)))
}

pub(crate) async fn image(
    State(state): AppStateRef,
    Path((session_id, key)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let session = session(&state, &session_id)?;
    let entry = session
        .get_by_image_key(&key)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no image `{key}` in this session")))?;
    Ok(([(header::CONTENT_TYPE, "image/png")], entry.png.clone()).into_response())
}

pub(crate) async fn report(
    State(state): AppStateRef,
    Path((session_id, filter, level)): Path<(String, String, String)>,
) -> Result<Json<AttributeReport>, ApiError> {
    let session = session(&state, &session_id)?;
    let level: f64 = level
        .parse()
        .ok()
        .filter(|l: &f64| (0.0..=1.0).contains(l))
        .ok_or_else(|| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, format!("invalid level `{level}`")))?;
    let entry = session
        .get(&(filter.clone(), level_key(level)))
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no match computed for {filter} at {level}")))?;
    Ok(Json(entry.report))
}

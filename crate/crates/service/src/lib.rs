//! HTTP service for exploring equivalently smoothed images: upload an
//! image, request matched smoothing per filter and level, fetch the outputs
//! and their attribute reports.
//!
//! Endpoints:
//! - `POST /api/session` with the raw PNG/JPEG bytes as body
//! - `POST /api/match` with `{session_id, filter_id, level}`
//! - `GET /api/filters`
//! - `GET /api/image/{session}/{key}`
//! - `GET /api/report/{session}/{filter}/{level}`
//!
//! Everything else is served from the static asset directory.

mod api;
pub mod session;

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::AtomicUsize;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::DefaultBodyLimit;
use axum::http::{HeaderValue, Method};
use axum::routing::{any, get, post};
use axum::Router;
use epf_core::Registry;
use tokio::net::TcpListener;
use tokio::sync::Semaphore;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

pub use api::{MatchRequest, MatchResponse, SessionResponse};
use session::{SessionLimits, SessionTable};

const INDEX_HTML: &str = include_str!("../static/index.html");

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub max_sessions: usize,
    pub idle_timeout: Duration,
    pub max_cache_entries: usize,
    /// Evict the least recently used session when full instead of
    /// answering 503.
    pub evict_sessions: bool,
    pub max_upload_bytes: usize,
    /// Uploads are downscaled so that their longer side fits.
    pub max_side: usize,
    /// Concurrent searches.
    pub compute_workers: usize,
    /// Searches admitted at once, running or waiting; more get 429.
    pub queue_capacity: usize,
    /// Built web UI; a minimal page is served when unset.
    pub static_dir: Option<PathBuf>,
    /// Origins allowed by CORS.
    pub cors_origins: Vec<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        let workers = std::thread::available_parallelism().map_or(4, |n| n.get());
        Self {
            max_sessions: 32,
            idle_timeout: Duration::from_secs(30 * 60),
            max_cache_entries: 256,
            evict_sessions: true,
            max_upload_bytes: 16 * 1024 * 1024,
            max_side: 1024,
            compute_workers: workers,
            queue_capacity: 4 * workers,
            static_dir: None,
            cors_origins: vec![
                "http://localhost:5173".into(),
                "http://127.0.0.1:5173".into(),
            ],
        }
    }
}

pub(crate) struct AppState {
    pub registry: Registry,
    pub sessions: SessionTable,
    pub config: ServiceConfig,
    pub workers: Semaphore,
    pub admitted: AtomicUsize,
}

/// Builds the application router.
pub fn router(registry: Registry, config: ServiceConfig) -> Router {
    let limits = SessionLimits {
        max_sessions: config.max_sessions,
        idle_timeout: config.idle_timeout,
        max_cache_entries: config.max_cache_entries,
        evict: config.evict_sessions,
    };
    let origins: Vec<HeaderValue> = config.cors_origins.iter().filter_map(|o| o.parse().ok()).collect();
    let cors = CorsLayer::new()
        .allow_origin(origins)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers(Any);
    let state = Arc::new(AppState {
        registry,
        sessions: SessionTable::new(limits),
        workers: Semaphore::new(config.compute_workers.max(1)),
        admitted: AtomicUsize::new(0),
        config: config.clone(),
    });

    let api = Router::new()
        .route(
            "/api/session",
            post(api::create_session).layer(DefaultBodyLimit::max(config.max_upload_bytes)),
        )
        .route("/api/match", post(api::match_level))
        .route("/api/filters", get(api::filters))
        .route("/api/image/{session}/{key}", get(api::image))
        .route("/api/report/{session}/{filter}/{level}", get(api::report))
        .route("/api/{*rest}", any(api::not_found))
        .with_state(state);

    let app = match &config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api
            .route("/", get(|| async { axum::response::Html(INDEX_HTML) }))
            .fallback(api::not_found),
    };
    app.layer(cors)
}

/// Binds `addr`. Fails when the port is taken.
pub async fn bind(addr: SocketAddr) -> std::io::Result<TcpListener> {
    TcpListener::bind(addr).await
}

/// Serves `app` on `listener` until `shutdown` resolves; in-flight requests
/// are completed first.
pub async fn serve<F>(listener: TcpListener, app: Router, shutdown: F) -> std::io::Result<()>
where
    F: Future<Output = ()> + Send + 'static,
{
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}

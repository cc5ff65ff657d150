//! HTTP interface over a loaded [`Engine`].

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::routing::get;
use axum::Router;
use tokio::net::TcpListener;

use scoutbench_core::Engine;

pub mod error;
pub mod params;
pub mod routes;

pub use error::ApiError;
pub use routes::AppState;

/// JSON Schema (draft 2020-12) for every response body, one `$defs` entry per endpoint.
pub const RESPONSE_SCHEMA: &str = include_str!("../schema/responses.schema.json");

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/api/health", get(routes::health))
        .route("/api/players", get(routes::players))
        .route("/api/players/{id}", get(routes::player))
        .route("/api/players/{id}/scores", get(routes::player_scores))
        .route("/api/players/{id}/trend", get(routes::player_trend))
        .route("/api/players/{id}/similar", get(routes::player_similar))
        .route("/api/roles", get(routes::roles))
        .route(
            "/api/stats/score-distribution",
            get(routes::score_distribution_stats),
        )
        .route(
            "/api/profiles",
            get(routes::list_profiles).post(routes::create_profile),
        )
        .fallback(routes::not_found)
        .with_state(engine)
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

pub async fn bind(addr: &str) -> Result<TcpListener, ServeError> {
    TcpListener::bind(addr).await.map_err(|source| ServeError::Bind {
        addr: addr.to_string(),
        source,
    })
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(
    listener: TcpListener,
    engine: Arc<Engine>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    let addr: SocketAddr = listener.local_addr()?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(engine))
        .with_graceful_shutdown(shutdown)
        .await?;
    tracing::info!("server stopped");
    Ok(())
}

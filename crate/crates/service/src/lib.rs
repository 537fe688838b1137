//! HTTP JSON API over one provrisk workspace.
//!
//! All writes go through a single [`Workspace`] handle behind a lock, so
//! they are serialized; reads share the lock and only ever see committed
//! files. Every mutating endpoint returns the new version counter and
//! accepts an optional `expected_version`, rejecting stale writes with 409.

mod error;
mod handlers;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::routing::{get, post, put};
use axum::Router;
use provrisk_store::Workspace;
use tokio::sync::RwLock;

pub use error::ApiError;

pub const DEFAULT_PORT: u16 = 8080;

pub(crate) type SharedWorkspace = Arc<RwLock<Workspace>>;

pub fn router(workspace: Workspace) -> Router {
    let state: SharedWorkspace = Arc::new(RwLock::new(workspace));
    Router::new()
        .route("/api/factors", get(handlers::factors))
        .route("/api/scale", get(handlers::scale))
        .route("/api/surveys/{panel}", put(handlers::put_survey))
        .route(
            "/api/weights",
            get(handlers::get_weights).post(handlers::post_weights),
        )
        .route("/api/providers", get(handlers::providers))
        .route(
            "/api/providers/{id}/assessment",
            put(handlers::put_assessment),
        )
        .route("/api/rank", get(handlers::rank))
        .route("/api/whatif", post(handlers::what_if))
        .with_state(state)
}

/// Serves `workspace` on `addr` until the process is stopped.
pub async fn serve(workspace: Workspace, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(workspace)).await
}

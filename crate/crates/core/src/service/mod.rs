//! HTTP/WebSocket service: exercise authoring, submission checking and live game
//! sessions, backed by a file-per-record JSON store.

mod api;
mod config;
mod session;
mod store;

use std::net::SocketAddr;

use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

pub use api::{redact, router, AppState, ApiError, BlobCount, CreateExercise, ExerciseView, SelfCheckSummary, SubmitRequest, SubmitResponse};
pub use config::{ConfigFileError, HintLevel, ServiceConfig};
pub use session::{ActionError, ServerFrame, SessionHandle, SessionHub, SessionView};
pub use store::{CheckOverrides, ExerciseRecord, Store, StoreError, StudentSpec, SubmissionRecord};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Config(#[from] ConfigFileError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot listen on {address}: {source}")]
    Bind { address: String, source: std::io::Error },
    #[error("server failed: {0}")]
    Serve(std::io::Error),
}

/// A server running in the background.
pub struct RunningService {
    pub addr: SocketAddr,
    pub state: AppState,
    stop: oneshot::Sender<()>,
    task: JoinHandle<Result<(), std::io::Error>>,
}

impl RunningService {
    /// Stops accepting requests and waits for the server to wind down.
    pub async fn shutdown(self) -> Result<(), ServiceError> {
        let _ = self.stop.send(());
        match self.task.await {
            Ok(r) => r.map_err(ServiceError::Serve),
            Err(e) => Err(ServiceError::Serve(std::io::Error::other(e))),
        }
    }
}

/// Opens the store, binds `config.address` (port 0 picks a free port) and serves in a
/// background task.
pub async fn spawn(config: ServiceConfig) -> Result<RunningService, ServiceError> {
    config.validate()?;
    let store = Store::open(&config.store_dir)?;
    let address = config.address.clone();
    let listener = TcpListener::bind(&address).await.map_err(|source| ServiceError::Bind { address, source })?;
    let addr = listener.local_addr().map_err(ServiceError::Serve)?;
    let state = AppState::new(config, store);
    let app = router(state.clone());
    let (stop, stopped) = oneshot::channel::<()>();
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async move {
                let _ = stopped.await;
            })
            .await
    });
    tracing::info!(%addr, "listening");
    Ok(RunningService { addr, state, stop, task })
}

/// Serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let running = spawn(config).await?;
    let _ = tokio::signal::ctrl_c().await;
    tracing::info!("shutting down");
    running.shutdown().await
}

//! HTTP API: anonymous survey intake, review packets, expert verdicts and
//! the live distribution / cross-evaluation / agreement reports.

mod api;
pub mod config;
pub mod review;

pub use api::{router, AppState, SurveySubmission, SubmitResponse};
pub use config::{ConfigError, ServiceConfig};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot open verdict log: {0}")]
    Store(#[from] burnout_core::jsonl::JsonlError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Validates the configuration, builds the state and serves until the
/// process is stopped.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let state = AppState::open(config.clone())?;
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", config.port)).await?;
    log::info!(
        "listening on http://{} (data {}, models {})",
        listener.local_addr()?,
        config.data_dir.display(),
        config.model_dir.display()
    );
    axum::serve(listener, router(state)).await?;
    Ok(())
}

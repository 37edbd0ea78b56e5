//! HTTP service for the human evaluation of synthetic (document, claim)
//! pairs.
//!
//! Annotators see tasks without any stored label, submit independent
//! verdicts, and an adjudicator settles tasks whose verdicts disagree. Every
//! verdict and adjudication is appended to a JSONL event log that is replayed
//! at startup. `GET /report` computes Fleiss' kappa over the verdicts as
//! submitted, before adjudication, plus label accuracy against the resolved
//! verdicts.
//!
//! | Method | Path | Role |
//! |---|---|---|
//! | `GET` | `/tasks?annotator=NAME` | annotator (own name) or adjudicator |
//! | `POST` | `/tasks/{id}/verdict` | annotator |
//! | `POST` | `/tasks/{id}/adjudication` | adjudicator |
//! | `GET` | `/report` | adjudicator |
//!
//! All requests carry `Authorization: Bearer <token>`; tokens and roles come
//! from the service config.

pub mod api;
pub mod config;
mod error;
pub mod report;
pub mod store;
pub mod task;

use std::net::SocketAddr;
use std::sync::Arc;

pub use api::router;
pub use config::{AnnotateConfig, Role, TokenEntry};
pub use error::AnnotateError;
pub use report::{AgreementReport, PipelineAgreement};
pub use store::{Event, Store};
pub use task::{Status, Task, TaskSpec, Verdict};

/// Loads tasks, replays the event log and serves until the process is
/// interrupted.
pub async fn serve(config: AnnotateConfig, addr: SocketAddr) -> Result<(), AnnotateError> {
    let store = Arc::new(Store::open(&config.tasks, &config.log, config.annotators_per_task)?);
    let app = router(store, &config);
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(AnnotateError::Io)?;
    tracing::info!(addr = %listener.local_addr().map_err(AnnotateError::Io)?, "annotation service listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(AnnotateError::Io)
}

//! Annotation service for building fact-synset gold standards: serves
//! sentences with candidate-token highlights, stores draft synsets per
//! session with optimistic revision checks, and exports gold files.

pub mod api;
pub mod error;
pub mod session;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

pub use api::router;
pub use error::{AnnotateError, Result};
pub use session::{AnnotationSession, DraftPattern, DraftSynset, Highlight, SelectedToken};
pub use store::{SessionStore, SessionSummary};

/// Serves the API on `0.0.0.0:port` until the process is stopped.
pub async fn serve(data_dir: PathBuf, port: u16) -> std::io::Result<()> {
    let store = SessionStore::open(&data_dir).map_err(std::io::Error::other)?;
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([0, 0, 0, 0], port))).await?;
    eprintln!(
        "serving {} on http://{}",
        data_dir.display(),
        listener.local_addr()?
    );
    axum::serve(listener, router(Arc::new(store))).await
}

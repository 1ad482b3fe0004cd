//! HTTP routes.
//!
//! | method | path | body | response |
//! |---|---|---|---|
//! | GET | `/sessions` | | session summaries |
//! | POST | `/sessions` | `{id?, tagged, gold?}` | summary, 201 |
//! | GET | `/sessions/{s}/sentences` | | revision and sentence summaries |
//! | GET | `/sessions/{s}/sentences/{id}` | | tokens, highlights, drafts, revision |
//! | PUT | `/sessions/{s}/sentences/{id}/annotation` | `{expected_revision, drafts}` | `{revision}` |
//! | POST | `/sessions/{s}/sentences/{id}/preview` | `{drafts}` | variant count per draft |
//! | GET | `/sessions/{s}/export` | | gold file, `text/plain` |
//!
//! Errors carry `{"error": message}`; a revision conflict (409) also
//! carries `current_revision`.

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use benchie::gold::parse_gold;
use benchie::ingest::read_tagged;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::AnnotateError;
use crate::session::{AnnotationSession, DraftSynset, Highlight};
use crate::store::{SessionStore, SessionSummary};

impl IntoResponse for AnnotateError {
    fn into_response(self) -> Response {
        let status = match &self {
            AnnotateError::NotFound(_) => StatusCode::NOT_FOUND,
            AnnotateError::Conflict { .. } => StatusCode::CONFLICT,
            AnnotateError::Invalid(_) | AnnotateError::Gold(_) => StatusCode::UNPROCESSABLE_ENTITY,
            AnnotateError::Io { .. } | AnnotateError::Corrupt { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let body = match &self {
            AnnotateError::Conflict { current, .. } => json!({"error": self.to_string(), "current_revision": current}),
            _ => json!({"error": self.to_string()}),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, AnnotateError>;

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", get(list_sessions).post(create_session))
        .route("/sessions/{s}/sentences", get(list_sentences))
        .route("/sessions/{s}/sentences/{id}", get(get_sentence))
        .route("/sessions/{s}/sentences/{id}/annotation", put(put_annotation))
        .route("/sessions/{s}/sentences/{id}/preview", post(preview))
        .route("/sessions/{s}/export", get(export))
        .with_state(store)
}

async fn list_sessions(State(store): State<Arc<SessionStore>>) -> Json<Vec<SessionSummary>> {
    Json(store.list())
}

#[derive(Deserialize)]
pub struct CreateSession {
    pub id: Option<String>,
    /// CoNLL-U or `token<TAB>POS[<TAB>deprel]` rows.
    pub tagged: String,
    /// Existing gold to load as drafts.
    pub gold: Option<String>,
}

async fn create_session(
    State(store): State<Arc<SessionStore>>,
    Json(req): Json<CreateSession>,
) -> ApiResult<(StatusCode, Json<SessionSummary>)> {
    let tagged = read_tagged(&req.tagged)?;
    let id = req.id.unwrap_or_else(|| uuid::Uuid::new_v4().simple().to_string());
    let mut session = AnnotationSession::new(id, tagged)?;
    if let Some(gold) = req.gold {
        session.import_gold(&parse_gold(&gold)?)?;
    }
    Ok((StatusCode::CREATED, Json(store.create(session)?)))
}

#[derive(Serialize)]
struct SentenceSummary {
    id: String,
    text: String,
    tokens: usize,
    synsets: usize,
}

#[derive(Serialize)]
struct SentenceList {
    session: String,
    revision: u64,
    sentences: Vec<SentenceSummary>,
}

async fn list_sentences(State(store): State<Arc<SessionStore>>, Path(s): Path<String>) -> ApiResult<Json<SentenceList>> {
    store.read(&s, |session| {
        Ok(Json(SentenceList {
            session: session.id.clone(),
            revision: session.revision,
            sentences: session
                .sentences
                .iter()
                .map(|r| SentenceSummary {
                    id: r.id().to_owned(),
                    text: r.tagged.sentence.text.clone(),
                    tokens: r.tagged.sentence.tokens.len(),
                    synsets: r.drafts.len(),
                })
                .collect(),
        }))
    })
}

#[derive(Serialize)]
struct TokenView {
    index: usize,
    surface: String,
    pos: String,
    highlight: Highlight,
}

#[derive(Serialize)]
struct SentenceView {
    session: String,
    revision: u64,
    id: String,
    text: String,
    tokens: Vec<TokenView>,
    drafts: Vec<DraftSynset>,
}

async fn get_sentence(
    State(store): State<Arc<SessionStore>>,
    Path((s, id)): Path<(String, String)>,
) -> ApiResult<Json<SentenceView>> {
    store.read(&s, |session| {
        let record = session.sentence(&id)?;
        let tokens = record
            .tagged
            .sentence
            .tokens
            .iter()
            .zip(&record.tagged.pos)
            .zip(record.highlights())
            .enumerate()
            .map(|(index, ((tok, pos), highlight))| TokenView {
                index,
                surface: tok.surface().to_owned(),
                pos: pos.clone(),
                highlight,
            })
            .collect();
        Ok(Json(SentenceView {
            session: session.id.clone(),
            revision: session.revision,
            id: record.id().to_owned(),
            text: record.tagged.sentence.text.clone(),
            tokens,
            drafts: record.drafts.clone(),
        }))
    })
}

#[derive(Deserialize)]
pub struct PutAnnotation {
    pub expected_revision: u64,
    pub drafts: Vec<DraftSynset>,
}

async fn put_annotation(
    State(store): State<Arc<SessionStore>>,
    Path((s, id)): Path<(String, String)>,
    Json(req): Json<PutAnnotation>,
) -> ApiResult<Json<serde_json::Value>> {
    let revision = store.update(&s, |session| session.put_annotation(&id, req.drafts, req.expected_revision))?;
    Ok(Json(json!({ "revision": revision })))
}

#[derive(Deserialize)]
pub struct PreviewRequest {
    pub drafts: Vec<DraftSynset>,
}

#[derive(Serialize)]
struct PreviewEntry {
    id: String,
    variants: usize,
}

async fn preview(
    State(store): State<Arc<SessionStore>>,
    Path((s, id)): Path<(String, String)>,
    Json(req): Json<PreviewRequest>,
) -> ApiResult<Json<Vec<PreviewEntry>>> {
    store.read(&s, |session| {
        Ok(Json(
            session
                .preview(&id, &req.drafts)?
                .into_iter()
                .map(|(id, variants)| PreviewEntry { id, variants })
                .collect(),
        ))
    })
}

async fn export(State(store): State<Arc<SessionStore>>, Path(s): Path<String>) -> ApiResult<Response> {
    let text = store.read(&s, |session| session.export_gold())?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

//! JSON over HTTP. Errors come back as `{"error": {"code", "message"}}`.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{FromRequest, Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use mindforge_core::mindmap::Mindmap;
use mindforge_core::ErrorCode;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::service::{ImportRequest, PreviewRequest, SearchRequest, ServiceError, SupportRequest, Workbench};

/// `Json` with rejections turned into the common error body.
#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
pub struct Json<T>(pub T);

impl<T: Serialize> IntoResponse for Json<T> {
    fn into_response(self) -> Response {
        axum::Json(self.0).into_response()
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_string(),
            message: message.into(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "InvalidRequest", r.body_text())
    }
}

/// HTTP status for an error code.
pub fn status_for(code: &str) -> StatusCode {
    match code {
        "UnknownNode" | "SessionNotFound" | "UnknownSource" => StatusCode::NOT_FOUND,
        "InvalidRequest"
        | "InvalidTask"
        | "ZeroLevel"
        | "EmptySelection"
        | "InvalidFacet"
        | "InvalidRegex"
        | "DuplicateId"
        | "EmptyId"
        | "RecordIndexOutOfRange"
        | "InvalidWeight" => StatusCode::BAD_REQUEST,
        "AllSourcesFailed" => StatusCode::BAD_GATEWAY,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let code = e.code();
        ApiError::new(status_for(code), code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, axum::Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;
type Shared = State<Arc<Workbench>>;

/// Runs blocking service work off the async workers.
async fn blocking<T, F>(wb: Arc<Workbench>, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&Workbench) -> Result<T, ServiceError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&wb))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?
        .map(Json)
        .map_err(ApiError::from)
}

async fn get_mindmap(State(wb): Shared) -> Json<Mindmap> {
    Json(wb.mindmap())
}

async fn put_mindmap(State(wb): Shared, Json(map): Json<Mindmap>) -> Result<StatusCode, ApiError> {
    wb.replace_mindmap(map)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn save_mindmap(State(wb): Shared) -> ApiResult<crate::service::SaveResponse> {
    blocking(wb, |wb| wb.save()).await
}

async fn preview(State(wb): Shared, Json(req): Json<PreviewRequest>) -> ApiResult<crate::service::PreviewResponse> {
    Ok(Json(wb.preview(&req)?))
}

async fn search(State(wb): Shared, Json(req): Json<SearchRequest>) -> ApiResult<crate::service::SearchSummary> {
    blocking(wb, move |wb| wb.search(&req)).await
}

#[derive(Debug, Deserialize)]
struct FacetQuery {
    facet: Option<String>,
}

async fn results(
    State(wb): Shared,
    Path(id): Path<String>,
    Query(q): Query<FacetQuery>,
) -> ApiResult<crate::service::ResultsView> {
    Ok(Json(wb.results(&id, q.facet.as_deref())?))
}

async fn support(
    State(wb): Shared,
    Path(id): Path<String>,
    Json(req): Json<SupportRequest>,
) -> ApiResult<mindforge_core::orchestrator::SupportReport> {
    blocking(wb, move |wb| wb.support(&id, &req)).await
}

async fn import(State(wb): Shared, Json(req): Json<ImportRequest>) -> ApiResult<crate::service::ImportResponse> {
    Ok(Json(wb.import(&req)?))
}

async fn venues(State(wb): Shared) -> Json<Vec<mindforge_core::VenueRef>> {
    Json(wb.venues())
}

async fn sources(State(wb): Shared) -> Json<crate::service::SourcesView> {
    Json(wb.sources())
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "NotFound", "no such endpoint")
}

pub fn router(wb: Arc<Workbench>) -> Router {
    let api = Router::new()
        .route("/api/mindmap", get(get_mindmap).put(put_mindmap))
        .route("/api/mindmap/save", post(save_mindmap))
        .route("/api/expansion/preview", post(preview))
        .route("/api/search", post(search))
        .route("/api/search/{id}/results", get(results))
        .route("/api/search/{id}/support", post(support))
        .route("/api/import", post(import))
        .route("/api/catalog/venues", get(venues))
        .route("/api/sources", get(sources));
    let static_dir = wb.config().static_dir.clone();
    let api = api.with_state(wb);
    match static_dir {
        Some(dir) => api
            .route("/api/{*rest}", axum::routing::any(not_found))
            .fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api.fallback(not_found),
    }
}

/// Serves until ctrl-c.
pub async fn serve(wb: Arc<Workbench>, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(wb))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

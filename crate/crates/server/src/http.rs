//! HTTP front end: `/api/{endpoint}` plus static UI assets under `/`.

use std::sync::Arc;
use std::time::Instant;

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

use crate::api::{ApiError, Params, Service};
use crate::config::ServiceConfig;

/// Header carrying the server-side handling time; kept out of the body so
/// bodies stay byte-identical across repeated requests.
pub const ELAPSED_HEADER: &str = "x-elapsed-ms";

pub fn router(service: Arc<Service>, cfg: &ServiceConfig) -> anyhow::Result<Router> {
    let mut app = Router::new()
        .route("/api/{endpoint}", get(api))
        .with_state(service);
    if let Some(dir) = &cfg.static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    if let Some(origin) = &cfg.cors_origin {
        let allow = if origin == "*" {
            AllowOrigin::any()
        } else {
            AllowOrigin::exact(HeaderValue::from_str(origin)?)
        };
        app = app.layer(
            CorsLayer::new()
                .allow_origin(allow)
                .allow_methods([Method::GET]),
        );
    }
    Ok(app)
}

async fn api(
    State(service): State<Arc<Service>>,
    Path(endpoint): Path<String>,
    Query(params): Query<Params>,
) -> Response {
    let start = Instant::now();
    let result = tokio::task::spawn_blocking(move || service.handle(&endpoint, &params)).await;
    let (status, body) = match result {
        Ok(Ok(body)) => (StatusCode::OK, body),
        Ok(Err(e)) => (status_of(&e), e.body()),
        Err(join) => (
            StatusCode::INTERNAL_SERVER_ERROR,
            ApiError {
                status: 500,
                error: join.to_string(),
                offset: None,
            }
            .body(),
        ),
    };
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    (
        status,
        [
            (
                header::CONTENT_TYPE,
                "application/json; charset=utf-8".to_string(),
            ),
            (
                header::HeaderName::from_static(ELAPSED_HEADER),
                format!("{elapsed:.3}"),
            ),
        ],
        body,
    )
        .into_response()
}

fn status_of(e: &ApiError) -> StatusCode {
    StatusCode::from_u16(e.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR)
}

pub async fn serve(cfg: ServiceConfig) -> anyhow::Result<()> {
    let service = Arc::new(tokio::task::block_in_place(|| Service::from_config(&cfg))?);
    let app = router(service.clone(), &cfg)?;
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", cfg.port())).await?;
    eprintln!(
        "serving {} documents on http://{}",
        service.index().doc_count(),
        listener.local_addr()?
    );
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

//! Read-only HTTP JSON API over a [`Database`].
//!
//! Routes: `/languages`, `/entries/{id}`, `/search`, `/geo`, `/healthz`.
//! Errors come back as `{"error": kind, "message": text}`.

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Serialize;
use tower_http::cors::{Any, CorsLayer};

use crate::model::{CognateSet, Database, Form, Language, SearchField, SearchQuery};
use crate::reflex::clade_path;
use crate::text::search_key;

pub const DEFAULT_LIMIT: usize = 50;
pub const MAX_LIMIT: usize = 500;

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Allowed CORS origin; `"*"` allows any. No CORS headers when unset.
    pub cors_origin: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub kind: &'static str,
    pub message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, kind: "bad-request", message: message.into() }
    }

    fn not_found(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::NOT_FOUND, kind: "not-found", message: message.into() }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody { error: self.kind, message: &self.message };
        (self.status, Json(body)).into_response()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PageRequest {
    pub limit: usize,
    pub offset: usize,
}

impl Default for PageRequest {
    fn default() -> Self {
        PageRequest { limit: DEFAULT_LIMIT, offset: 0 }
    }
}

impl PageRequest {
    pub fn from_params(params: &HashMap<String, String>) -> Result<Self, ApiError> {
        let mut p = PageRequest::default();
        if let Some(v) = params.get("limit") {
            p.limit = v
                .parse()
                .ok()
                .filter(|l| (1..=MAX_LIMIT).contains(l))
                .ok_or_else(|| ApiError::bad_request(format!("limit must be an integer in 1..={MAX_LIMIT}, got {v:?}")))?;
        }
        if let Some(v) = params.get("offset") {
            p.offset = v
                .parse()
                .map_err(|_| ApiError::bad_request(format!("offset must be a non-negative integer, got {v:?}")))?;
        }
        Ok(p)
    }

    fn apply<T>(&self, items: impl Iterator<Item = T>) -> Vec<T> {
        items.skip(self.offset).take(self.limit).collect()
    }
}

#[derive(Debug, Serialize)]
pub struct Page<T> {
    pub total: usize,
    pub limit: usize,
    pub offset: usize,
    pub items: Vec<T>,
}

#[derive(Debug, Serialize)]
pub struct LanguageRow<'a> {
    pub id: &'a str,
    pub name: &'a str,
    pub clade: &'a [String],
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    pub form_count: usize,
}

fn language_row<'a>(db: &'a Database, l: &'a Language) -> LanguageRow<'a> {
    LanguageRow {
        id: &l.id,
        name: &l.name,
        clade: &l.clade,
        latitude: l.latitude,
        longitude: l.longitude,
        form_count: db.form_count(&l.id),
    }
}

#[derive(Debug, Serialize)]
pub struct LanguageGroup<'a> {
    pub language: LanguageRow<'a>,
    pub forms: Vec<&'a Form>,
}

#[derive(Debug, Serialize)]
pub struct EntryView<'a> {
    pub cognateset: &'a CognateSet,
    pub form_count: usize,
    pub languages: Vec<LanguageGroup<'a>>,
}

#[derive(Debug, Serialize)]
pub struct SearchRow<'a> {
    pub form_id: &'a str,
    pub form: &'a str,
    pub gloss: &'a str,
    pub language_id: &'a str,
    pub language_name: Option<&'a str>,
    pub cognateset_id: &'a str,
    pub headword: Option<&'a str>,
    pub position: usize,
}

#[derive(Debug, Serialize)]
pub struct GeoFeature<'a> {
    pub id: &'a str,
    pub name: &'a str,
    pub clade_root: Option<&'a str>,
    pub form_count: usize,
    pub latitude: f64,
    pub longitude: f64,
}

#[derive(Debug, Serialize)]
pub struct GeoView<'a> {
    pub features: Vec<GeoFeature<'a>>,
    /// Languages without both coordinates.
    pub omitted: usize,
}

/// The handlers as plain functions, so they can be used without HTTP.
pub mod views {
    use super::*;

    pub fn languages<'a>(
        db: &'a Database,
        clade: Option<&str>,
        q: Option<&str>,
        page: PageRequest,
    ) -> Page<LanguageRow<'a>> {
        let prefix = clade.map(clade_path).unwrap_or_default();
        let needle = q.map(search_key).filter(|s| !s.is_empty());
        let matching: Vec<&Language> = db
            .languages()
            .iter()
            .filter(|l| l.in_clade(&prefix))
            .filter(|l| needle.as_ref().is_none_or(|n| search_key(&l.name).contains(n.as_str())))
            .collect();
        Page {
            total: matching.len(),
            limit: page.limit,
            offset: page.offset,
            items: page.apply(matching.into_iter().map(|l| language_row(db, l))),
        }
    }

    pub fn entry<'a>(db: &'a Database, id: &str) -> Result<EntryView<'a>, ApiError> {
        let set = db
            .cognateset(id)
            .ok_or_else(|| ApiError::not_found(format!("no cognate set {id:?}")))?;
        let mut groups: Vec<LanguageGroup<'a>> = Vec::new();
        let mut form_count = 0;
        for f in db.cognateset_members(id) {
            form_count += 1;
            match groups.iter_mut().find(|g| g.language.id == f.language_id) {
                Some(g) => g.forms.push(f),
                None => {
                    let language = match db.language(&f.language_id) {
                        Some(l) => language_row(db, l),
                        // validated data never gets here; keep the form visible anyway
                        None => LanguageRow {
                            id: &f.language_id,
                            name: &f.language_id,
                            clade: &[],
                            latitude: None,
                            longitude: None,
                            form_count: db.form_count(&f.language_id),
                        },
                    };
                    groups.push(LanguageGroup { language, forms: vec![f] });
                }
            }
        }
        Ok(EntryView { cognateset: set, form_count, languages: groups })
    }

    pub fn search<'a>(db: &'a Database, params: &HashMap<String, String>) -> Result<Page<SearchRow<'a>>, ApiError> {
        let page = PageRequest::from_params(params)?;
        let text = params
            .get("q")
            .map(String::as_str)
            .filter(|q| !q.trim().is_empty())
            .ok_or_else(|| ApiError::bad_request("missing query parameter q"))?;
        let field = match params.get("field").map(String::as_str) {
            None | Some("form") => SearchField::Form,
            Some("gloss") => SearchField::Gloss,
            Some("headword") => SearchField::Headword,
            Some(other) => {
                return Err(ApiError::bad_request(format!(
                    "field must be one of form, gloss, headword; got {other:?}"
                )))
            }
        };
        let fold = match params.get("fold").map(String::as_str) {
            None | Some("0") | Some("false") | Some("") => false,
            Some("1") | Some("true") => true,
            Some(other) => return Err(ApiError::bad_request(format!("fold must be 0 or 1, got {other:?}"))),
        };
        let query = SearchQuery {
            text,
            field,
            language: params.get("lang").map(String::as_str).filter(|l| !l.is_empty()),
            fold,
            limit: page.limit,
            offset: page.offset,
        };
        let result = db
            .search_with(&query)
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        let items = result
            .hits
            .iter()
            .map(|h| SearchRow {
                form_id: &h.form.id,
                form: &h.form.form,
                gloss: &h.form.gloss,
                language_id: &h.form.language_id,
                language_name: db.language(&h.form.language_id).map(|l| l.name.as_str()),
                cognateset_id: &h.form.cognateset_id,
                headword: db.cognateset(&h.form.cognateset_id).map(|s| s.headword.as_str()),
                position: h.position,
            })
            .collect();
        Ok(Page { total: result.total, limit: page.limit, offset: page.offset, items })
    }

    pub fn geo(db: &Database) -> GeoView<'_> {
        let mut features = Vec::new();
        let mut omitted = 0;
        for l in db.languages() {
            match l.coordinates() {
                Some((latitude, longitude)) => features.push(GeoFeature {
                    id: &l.id,
                    name: &l.name,
                    clade_root: l.family(),
                    form_count: db.form_count(&l.id),
                    latitude,
                    longitude,
                }),
                None => omitted += 1,
            }
        }
        GeoView { features, omitted }
    }
}

type Db = State<Arc<Database>>;
type Params = Query<HashMap<String, String>>;

async fn languages(State(db): Db, Query(params): Params) -> Result<Response, ApiError> {
    let page = PageRequest::from_params(&params)?;
    let view = views::languages(
        &db,
        params.get("clade").map(String::as_str),
        params.get("q").map(String::as_str),
        page,
    );
    Ok(Json(view).into_response())
}

async fn entry(State(db): Db, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(views::entry(&db, &id)?).into_response())
}

async fn search(State(db): Db, Query(params): Params) -> Result<Response, ApiError> {
    Ok(Json(views::search(&db, &params)?).into_response())
}

async fn geo(State(db): Db) -> Response {
    Json(views::geo(&db)).into_response()
}

async fn healthz() -> &'static str {
    "ok"
}

async fn fallback() -> ApiError {
    ApiError::not_found("no such route")
}

pub fn router(db: Arc<Database>, config: &ServiceConfig) -> Router {
    let mut app = Router::new()
        .route("/languages", get(languages))
        .route("/entries/{id}", get(entry))
        .route("/search", get(search))
        .route("/geo", get(geo))
        .route("/healthz", get(healthz))
        .fallback(fallback)
        .with_state(db);
    if let Some(origin) = &config.cors_origin {
        let cors = CorsLayer::new().allow_methods(Any).allow_headers(Any);
        let cors = match origin.as_str() {
            "*" => cors.allow_origin(Any),
            o => match HeaderValue::from_str(o) {
                Ok(v) => cors.allow_origin(v),
                Err(_) => {
                    log::warn!("ignoring invalid CORS origin {o:?}");
                    cors
                }
            },
        };
        app = app.layer(cors);
    }
    app
}

/// Serves `router` on `listener` until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{fig2, language};
    use axum::body::Body;
    use axum::http::Request;
    use http_body_util::BodyExt;
    use tower::ServiceExt;

    async fn get_json(app: &Router, uri: &str) -> (StatusCode, serde_json::Value) {
        let resp = app
            .clone()
            .oneshot(Request::builder().uri(uri).body(Body::empty()).unwrap())
            .await
            .unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, serde_json::from_slice(&bytes).unwrap_or(serde_json::Value::Null))
    }

    fn app() -> Router {
        router(Arc::new(fig2()), &ServiceConfig::default())
    }

    #[tokio::test]
    async fn entry_groups_by_language() {
        let (s, v) = get_json(&app(), "/entries/454").await;
        assert_eq!(s, StatusCode::OK);
        assert_eq!(v["cognateset"]["headword"], "ápavartayati");
        assert_eq!(v["form_count"], 6);
        let langs: Vec<_> = v["languages"].as_array().unwrap().iter().map(|g| g["language"]["id"].clone()).collect();
        assert_eq!(langs, vec!["OIA", "Pk", "S", "G"]);
        let g = &v["languages"][3]["forms"];
        assert_eq!(g[0]["form"], "oṭvũ");
        assert_eq!(g[1]["form"], "oṭī");
    }

    #[tokio::test]
    async fn unknown_entry_is_json_404() {
        let (s, v) = get_json(&app(), "/entries/does-not-exist").await;
        assert_eq!(s, StatusCode::NOT_FOUND);
        assert_eq!(v["error"], "not-found");
        assert!(v["message"].as_str().unwrap().contains("does-not-exist"));
        let (s, v) = get_json(&app(), "/nope").await;
        assert_eq!(s, StatusCode::NOT_FOUND);
        assert_eq!(v["error"], "not-found");
    }

    #[tokio::test]
    async fn search_filters() {
        let (s, v) = get_json(&app(), "/search?q=o%E1%B9%AD%C4%AB&field=form").await;
        assert_eq!(s, StatusCode::OK);
        assert_eq!(v["total"], 2);
        let langs: Vec<_> = v["items"].as_array().unwrap().iter().map(|h| h["language_id"].clone()).collect();
        assert_eq!(langs, vec!["S", "G"]);
        assert_eq!(v["items"][0]["headword"], "ápavartayati");
        let (_, v) = get_json(&app(), "/search?q=o%E1%B9%AD%C4%AB&field=form&lang=S").await;
        assert_eq!(v["total"], 1);
        let (_, v) = get_json(&app(), "/search?q=oti&fold=1").await;
        assert_eq!(v["total"], 2);
        let (_, v) = get_json(&app(), "/search?q=hem&field=gloss").await;
        assert_eq!(v["total"], 2);
    }

    #[tokio::test]
    async fn bad_requests() {
        for uri in [
            "/search",
            "/search?q=",
            "/search?q=a&field=nope",
            "/search?q=a&limit=0",
            "/search?q=a&fold=maybe",
            "/languages?limit=501",
            "/languages?offset=-1",
            "/languages?limit=x",
        ] {
            let (s, v) = get_json(&app(), uri).await;
            assert_eq!(s, StatusCode::BAD_REQUEST, "{uri}");
            assert_eq!(v["error"], "bad-request", "{uri}");
        }
    }

    #[tokio::test]
    async fn languages_filter_and_page() {
        let (_, v) = get_json(&app(), "/languages").await;
        assert_eq!(v["total"], 4);
        let ids: Vec<_> = v["items"].as_array().unwrap().iter().map(|l| l["id"].clone()).collect();
        assert_eq!(ids, vec!["G", "OIA", "Pk", "S"]);
        assert_eq!(v["items"][0]["form_count"], 2);
        let (_, v) = get_json(&app(), "/languages?q=ZZZZ").await;
        assert_eq!(v["total"], 0);
        assert!(v["items"].as_array().unwrap().is_empty());
        let (_, v) = get_json(&app(), "/languages?q=SIND").await;
        assert_eq!(v["total"], 1);
        let (_, v) = get_json(&app(), "/languages?clade=Indo-Aryan;Western").await;
        assert_eq!(v["total"], 1);
        let (_, v) = get_json(&app(), "/languages?limit=3&offset=3").await;
        assert_eq!(v["total"], 4);
        assert_eq!(v["items"].as_array().unwrap().len(), 1);
    }

    #[tokio::test]
    async fn geo_counts_omitted() {
        let mut located = language("A", "Located", &["Indo-Aryan"]);
        located.latitude = Some(24.0);
        located.longitude = Some(68.0);
        let db = Database::new(vec![], vec![], vec![located, language("B", "Unlocated", &[])], vec![]);
        let app = router(Arc::new(db), &ServiceConfig::default());
        let (_, v) = get_json(&app, "/geo").await;
        assert_eq!(v["features"].as_array().unwrap().len(), 1);
        assert_eq!(v["features"][0]["clade_root"], "Indo-Aryan");
        assert_eq!(v["omitted"], 1);
        let empty = router(Arc::new(Database::empty()), &ServiceConfig::default());
        let (_, v) = get_json(&empty, "/geo").await;
        assert!(v["features"].as_array().unwrap().is_empty());
        assert_eq!(v["omitted"], 0);
    }

    #[tokio::test]
    async fn healthz_and_cors() {
        let app = router(Arc::new(fig2()), &ServiceConfig { cors_origin: Some("http://localhost:5173".into()) });
        let resp = app
            .oneshot(
                Request::builder()
                    .uri("/healthz")
                    .header("origin", "http://localhost:5173")
                    .body(Body::empty())
                    .unwrap(),
            )
            .await
            .unwrap();
        assert_eq!(resp.status(), StatusCode::OK);
        assert_eq!(resp.headers()["access-control-allow-origin"], "http://localhost:5173");
        let body = resp.into_body().collect().await.unwrap().to_bytes();
        assert_eq!(&body[..], b"ok");
    }
}

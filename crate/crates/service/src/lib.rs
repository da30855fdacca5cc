//! HTTP/JSON API for the cashier station.
//!
//! | method | path | body / query | response |
//! |---|---|---|---|
//! | GET  | `/api/items` | `?status=IN_STOCK\|SOLD&limit=N` | `[InventoryItem]` |
//! | POST | `/api/items` | `{record, carrier_kind}` | `201 InventoryItem` |
//! | POST | `/api/scan` | `{carrier_ref, tilt_deg, distance_cm, damage}` | `{scan_token, success, failure_reason, latency_ms, payload}` |
//! | POST | `/api/checkout` | `{scan_token}` | `Receipt` |
//! | POST | `/api/items/{sku}/reprice` | `{new_price_minor}` | `InventoryItem` |
//! | POST | `/api/items/{sku}/replace-label` | `{new_price_minor}` | `InventoryItem` |
//! | GET  | `/api/receipts/{id}` | | `Receipt` |
//! | GET  | `/api/experiments/angle-sweep` | `?technology=barcode\|nfc&step=N` | CSV |
//!
//! Failed reads are ordinary `200` scan results. Errors are
//! `{"code", "message"}` bodies; see [`error::status_for`].

pub mod error;
mod writer;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{FromRequest, Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tagstock_core::experiments::table2_csv;
use tagstock_core::inventory::persist::open_store;
use tagstock_core::inventory::{Clock, ScanTarget, SystemClock};
use tagstock_core::scan::{scan_barcode_with, scan_nfc, sweep_angles, sweep_csv, ScanError};
use tagstock_core::{
    BarcodeLabel, CarrierKind, CarrierRef, Damage, InventoryError, InventoryItem, ItemStatus,
    ProductRecord, ReaderKind, Receipt, ScanContext, ScanMode, ScanOutcome, Sku, Store, Technology,
    Type2Tag,
};
use uuid::Uuid;

pub use error::ApiError;
pub use writer::StoreHandle;

pub const DEFAULT_TOKEN_TTL: Duration = Duration::from_secs(60);
/// Expired tokens are kept this much longer so late checkouts get 410, not 404.
const TOKEN_GRACE: Duration = Duration::from_secs(600);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Event log and snapshot location; in-memory store when `None`.
    pub data_dir: Option<PathBuf>,
    pub scan_mode: ScanMode,
    pub seed: u64,
    pub token_ttl: Duration,
    pub snapshot_every: Option<u64>,
    pub clock: Arc<dyn Clock>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            data_dir: None,
            scan_mode: ScanMode::Deterministic,
            seed: 0,
            token_ttl: DEFAULT_TOKEN_TTL,
            snapshot_every: Some(100),
            clock: Arc::new(SystemClock),
        }
    }
}

#[derive(Debug)]
struct IssuedScan {
    outcome: ScanOutcome,
    issued: Instant,
}

#[derive(Debug)]
struct Shared {
    store: StoreHandle,
    tokens: Mutex<HashMap<String, IssuedScan>>,
    rng: Mutex<ChaCha8Rng>,
    scan_mode: ScanMode,
    token_ttl: Duration,
}

#[derive(Debug, Clone)]
pub struct AppState(Arc<Shared>);

impl AppState {
    pub fn new(config: ServiceConfig) -> Result<Self, InventoryError> {
        let store = match &config.data_dir {
            Some(dir) => open_store(dir, config.clock.clone(), config.snapshot_every)?,
            None => Store::with_clock(config.clock.clone()),
        };
        Ok(Self::with_store(store, &config))
    }

    pub fn with_store(store: Store, config: &ServiceConfig) -> Self {
        AppState(Arc::new(Shared {
            store: StoreHandle::spawn(store),
            tokens: Mutex::new(HashMap::new()),
            rng: Mutex::new(ChaCha8Rng::seed_from_u64(config.seed)),
            scan_mode: config.scan_mode,
            token_ttl: config.token_ttl,
        }))
    }

    pub fn store(&self) -> &StoreHandle {
        &self.0.store
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/items", get(list_items).post(provision))
        .route("/api/items/{sku}/reprice", post(reprice))
        .route("/api/items/{sku}/replace-label", post(replace_label))
        .route("/api/scan", post(scan))
        .route("/api/checkout", post(checkout))
        .route("/api/receipts/{id}", get(receipt))
        .route("/api/experiments/angle-sweep", get(angle_sweep))
        .with_state(state)
}

/// JSON body extractor whose rejections are `400` [`ApiError`]s.
pub struct ApiJson<T>(pub T);

impl<S, T> FromRequest<S> for ApiJson<T>
where
    Json<T>: FromRequest<S, Rejection = JsonRejection>,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        let Json(value) = Json::<T>::from_request(req, state).await?;
        Ok(ApiJson(value))
    }
}

#[derive(Debug, Deserialize)]
pub struct ItemsQuery {
    pub status: Option<ItemStatus>,
    pub limit: Option<usize>,
}

async fn list_items(
    State(app): State<AppState>,
    query: Result<Query<ItemsQuery>, QueryRejection>,
) -> Result<Json<Vec<InventoryItem>>, ApiError> {
    let Query(q) = query?;
    let limit = q.limit.unwrap_or(usize::MAX);
    let items = app
        .store()
        .run(move |s| s.items(q.status).take(limit).cloned().collect())
        .await;
    Ok(Json(items))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProvisionRequest {
    pub record: ProductRecord,
    pub carrier_kind: CarrierKind,
}

async fn provision(
    State(app): State<AppState>,
    ApiJson(req): ApiJson<ProvisionRequest>,
) -> Result<(StatusCode, Json<InventoryItem>), ApiError> {
    let item = app
        .store()
        .run(move |s| s.provision(req.record, req.carrier_kind))
        .await?;
    Ok((StatusCode::CREATED, Json(item)))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RepriceRequest {
    pub new_price_minor: u32,
}

async fn reprice(
    State(app): State<AppState>,
    Path(sku): Path<String>,
    ApiJson(req): ApiJson<RepriceRequest>,
) -> Result<Json<InventoryItem>, ApiError> {
    let sku = Sku::from(sku.as_str());
    let item = app
        .store()
        .run(move |s| s.reprice_sku(&sku, req.new_price_minor))
        .await?;
    Ok(Json(item))
}

async fn replace_label(
    State(app): State<AppState>,
    Path(sku): Path<String>,
    ApiJson(req): ApiJson<RepriceRequest>,
) -> Result<Json<InventoryItem>, ApiError> {
    let sku = Sku::from(sku.as_str());
    let item = app
        .store()
        .run(move |s| s.replace_label(&sku, req.new_price_minor))
        .await?;
    Ok(Json(item))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScanRequest {
    pub carrier_ref: CarrierRef,
    pub tilt_deg: i64,
    pub distance_cm: f64,
    #[serde(default)]
    pub damage: Damage,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScanResponse {
    pub scan_token: String,
    #[serde(flatten)]
    pub outcome: ScanOutcome,
}

enum Carrier {
    Tag(Type2Tag),
    Label(BarcodeLabel),
}

async fn scan(
    State(app): State<AppState>,
    ApiJson(req): ApiJson<ScanRequest>,
) -> Result<Json<ScanResponse>, ApiError> {
    let carrier_ref = req.carrier_ref;
    let carrier = app
        .store()
        .run(move |s| match s.scan_target(&carrier_ref) {
            Some(ScanTarget::Tag(tag)) => Some(Carrier::Tag(tag.clone())),
            Some(ScanTarget::Label(label)) => Some(Carrier::Label(label.clone())),
            None => None,
        })
        .await
        .ok_or_else(|| {
            ApiError::new(
                StatusCode::NOT_FOUND,
                "UNKNOWN_CARRIER",
                format!("no item is bound to carrier {carrier_ref}"),
            )
        })?;

    let reader = match carrier {
        Carrier::Tag(_) => ReaderKind::NfcReader,
        Carrier::Label(_) => ReaderKind::BarcodeReader,
    };
    let ctx = ScanContext::new(req.tilt_deg, req.distance_cm, req.damage, reader).map_err(|e| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "INVALID_SCAN_CONTEXT",
            e.to_string(),
        )
    })?;
    let outcome = match &carrier {
        Carrier::Tag(tag) => scan_nfc(tag, &ctx),
        Carrier::Label(label) => {
            let mut rng = app.0.rng.lock().expect("rng lock");
            scan_barcode_with(label, &ctx, app.0.scan_mode, &mut *rng)
        }
    };

    let scan_token = Uuid::new_v4().to_string();
    {
        let mut tokens = app.0.tokens.lock().expect("token lock");
        let keep_for = app.0.token_ttl + TOKEN_GRACE;
        tokens.retain(|_, t| t.issued.elapsed() < keep_for);
        tokens.insert(
            scan_token.clone(),
            IssuedScan {
                outcome: outcome.clone(),
                issued: Instant::now(),
            },
        );
    }
    Ok(Json(ScanResponse {
        scan_token,
        outcome,
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CheckoutRequest {
    pub scan_token: String,
}

async fn checkout(
    State(app): State<AppState>,
    ApiJson(req): ApiJson<CheckoutRequest>,
) -> Result<Json<Receipt>, ApiError> {
    let outcome = {
        let tokens = app.0.tokens.lock().expect("token lock");
        let issued = tokens.get(&req.scan_token).ok_or_else(|| {
            ApiError::new(
                StatusCode::NOT_FOUND,
                "UNKNOWN_SCAN_TOKEN",
                "no such scan token",
            )
        })?;
        if issued.issued.elapsed() >= app.0.token_ttl {
            return Err(ApiError::new(
                StatusCode::GONE,
                "SCAN_TOKEN_EXPIRED",
                "scan token has expired; scan the item again",
            ));
        }
        issued.outcome.clone()
    };
    let receipt = app.store().run(move |s| s.checkout(&outcome)).await?;
    Ok(Json(receipt))
}

async fn receipt(
    State(app): State<AppState>,
    Path(id): Path<u64>,
) -> Result<Json<Receipt>, ApiError> {
    app.store()
        .run(move |s| s.receipt(id).cloned())
        .await
        .map(Json)
        .ok_or_else(|| {
            ApiError::new(
                StatusCode::NOT_FOUND,
                "UNKNOWN_RECEIPT",
                format!("no receipt {id}"),
            )
        })
}

#[derive(Debug, Deserialize)]
pub struct SweepQuery {
    pub technology: Option<String>,
    pub step: Option<u32>,
}

async fn angle_sweep(
    query: Result<Query<SweepQuery>, QueryRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let Query(q) = query?;
    let step = q.step.unwrap_or(1);
    let bad = |e: ScanError| ApiError::bad_request(e.to_string());
    let csv = match q.technology.as_deref() {
        None => table2_csv(step).map_err(bad)?,
        Some(t) => {
            let technology: Technology = t.parse().map_err(bad)?;
            sweep_csv(&sweep_angles(technology, step).map_err(bad)?)
        }
    };
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], csv))
}

/// Serves `router` on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    router: Router,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router)
        .with_graceful_shutdown(shutdown)
        .await
}

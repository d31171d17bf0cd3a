//! HTTP front end for the planning engine.
//!
//! Datasets are uploaded once as file contents and kept as immutable
//! snapshots keyed by the SHA-256 of their canonical JSON form. Scenario
//! evaluations and sweeps run against a snapshot and return the engine's
//! types unchanged.
//!
//! | method | path | body | response |
//! |---|---|---|---|
//! | POST | `/datasets` | `DatasetSources` | `LoadResponse` |
//! | POST | `/datasets/{id}/evaluate` | `ScenarioSpec` | `ScenarioOutcome` |
//! | POST | `/datasets/{id}/sweep` | `[ScenarioSpec]` | `SweepResult` |
//! | GET | `/datasets/{id}/compliance` | | `ComplianceReport` |
//! | GET | `/health` | | `{"status":"ok"}` |

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use bedplan_core::analysis::DhStockEstimate;
use bedplan_core::load::{load_dataset, DatasetSources, LoadedDataset};
use bedplan_core::scenario::{run_scenario, sweep};
use bedplan_core::{ComplianceReport, ScenarioError, ScenarioOutcome, ScenarioSpec, SweepResult, Violation};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Upload size cap.
pub const MAX_UPLOAD_BYTES: usize = 50 * 1024 * 1024;

/// An immutable loaded dataset.
#[derive(Debug)]
pub struct Snapshot {
    pub id: String,
    pub loaded: LoadedDataset,
    /// Seconds since the Unix epoch.
    pub loaded_at: u64,
}

#[derive(Debug, Clone, Default)]
pub struct AppState {
    snapshots: Arc<RwLock<HashMap<String, Arc<Snapshot>>>>,
    persist_dir: Option<PathBuf>,
}

impl AppState {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Snapshots are also written to `dir`; those already there are loaded.
    pub fn persistent(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let state = AppState {
            snapshots: Default::default(),
            persist_dir: Some(dir.clone()),
        };
        let mut entries: Vec<PathBuf> = fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        entries.sort();
        for path in entries {
            match restore(&path) {
                Ok(snap) => {
                    state.insert(snap);
                }
                Err(e) => log::warn!("{}: not restored: {e}", path.display()),
            }
        }
        Ok(state)
    }

    pub fn get(&self, id: &str) -> Option<Arc<Snapshot>> {
        self.snapshots.read().expect("lock").get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.snapshots.read().expect("lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert(&self, snap: Snapshot) -> Arc<Snapshot> {
        let mut map = self.snapshots.write().expect("lock");
        map.entry(snap.id.clone()).or_insert_with(|| Arc::new(snap)).clone()
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn canonical(src: &DatasetSources) -> Vec<u8> {
    serde_json::to_vec(src).expect("sources serialize")
}

pub fn snapshot_id(src: &DatasetSources) -> String {
    hex::encode(Sha256::digest(canonical(src)))
}

fn restore(path: &Path) -> Result<Snapshot, String> {
    let bytes = fs::read(path).map_err(|e| e.to_string())?;
    let src: DatasetSources = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
    let loaded = load_dataset(&src).map_err(|e| e.to_string())?;
    if !loaded.is_clean() {
        return Err("stored dataset no longer validates".into());
    }
    Ok(Snapshot {
        id: snapshot_id(&src),
        loaded,
        loaded_at: now(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error: error.into(),
                violations: Vec::new(),
            },
        }
    }

    fn unknown(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown dataset {id}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(r.status(), r.body_text())
    }
}

impl From<ScenarioError> for ApiError {
    fn from(e: ScenarioError) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadResponse {
    pub id: String,
    pub loaded_at: u64,
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
    pub dh_estimate: Option<DhStockEstimate>,
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn load(
    State(state): State<AppState>,
    body: Result<Json<DatasetSources>, JsonRejection>,
) -> Result<Json<LoadResponse>, ApiError> {
    let Json(src) = body?;
    let id = snapshot_id(&src);
    if let Some(snap) = state.get(&id) {
        return Ok(Json(load_response(&snap)));
    }
    let (src, loaded) = blocking(move || {
        let loaded = load_dataset(&src);
        (src, loaded)
    })
    .await?;
    let loaded = loaded.map_err(|e| ApiError {
        status: StatusCode::BAD_REQUEST,
        body: ErrorBody {
            error: e.to_string(),
            violations: vec![Violation {
                locator: e.file.to_string(),
                message: e.source.to_string(),
            }],
        },
    })?;
    if !loaded.is_clean() {
        return Err(ApiError {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody {
                error: format!("{} validation problem(s)", loaded.violations.len()),
                violations: loaded.violations,
            },
        });
    }
    if let Some(dir) = &state.persist_dir {
        let path = dir.join(format!("{id}.json"));
        if let Err(e) = fs::write(&path, canonical(&src)) {
            log::warn!("{}: {e}", path.display());
        }
    }
    let snap = state.insert(Snapshot {
        id,
        loaded,
        loaded_at: now(),
    });
    log::info!("dataset {} loaded", snap.id);
    Ok(Json(load_response(&snap)))
}

fn load_response(snap: &Snapshot) -> LoadResponse {
    LoadResponse {
        id: snap.id.clone(),
        loaded_at: snap.loaded_at,
        violations: snap.loaded.violations.clone(),
        warnings: snap.loaded.warnings.clone(),
        dh_estimate: snap.loaded.dh_estimate,
    }
}

fn snapshot(state: &AppState, id: &str) -> Result<Arc<Snapshot>, ApiError> {
    state.get(id).ok_or_else(|| ApiError::unknown(id))
}

async fn evaluate(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<ScenarioSpec>, JsonRejection>,
) -> Result<Json<ScenarioOutcome>, ApiError> {
    let snap = snapshot(&state, &id)?;
    let Json(spec) = body?;
    spec.validate()?;
    let outcome = blocking(move || {
        let l = &snap.loaded;
        run_scenario(&l.dataset, &spec, &l.thresholds, &l.costs)
    })
    .await??;
    Ok(Json(outcome))
}

async fn sweep_handler(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<Vec<ScenarioSpec>>, JsonRejection>,
) -> Result<Json<SweepResult>, ApiError> {
    let snap = snapshot(&state, &id)?;
    let Json(specs) = body?;
    for s in &specs {
        s.validate()
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, format!("{}: {e}", s.name)))?;
    }
    let result = blocking(move || {
        let l = &snap.loaded;
        sweep(&l.dataset, &specs, &l.thresholds, &l.costs)
    })
    .await??;
    Ok(Json(result))
}

async fn compliance(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<ComplianceReport>, ApiError> {
    let snap = snapshot(&state, &id)?;
    let l = &snap.loaded;
    let report = l
        .dataset
        .current_compliance(&l.thresholds)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    Ok(Json(report))
}

pub fn app(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/datasets", post(load))
        .route("/datasets/{id}/evaluate", post(evaluate))
        .route("/datasets/{id}/sweep", post(sweep_handler))
        .route("/datasets/{id}/compliance", get(compliance))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(state)
}

//! In-process chat-completion server for tests and offline runs.
//!
//! Replies are chosen per sample through the `x-request-id` header: echo the
//! ground truth, return nothing, return fixed text, or follow a script of
//! status codes.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::{DefaultBodyLimit, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::oneshot;

use crate::dataset::list_samples;
use crate::error::{Error, Result};
use crate::fsutil::read_string;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MockReply {
    /// Return the ground truth of the requested sample.
    #[default]
    Echo,
    Empty,
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptStep {
    pub status: u16,
    /// Body for a 200 step; `None` falls back to the default reply.
    #[serde(default)]
    pub reply: Option<MockReply>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MockFixture {
    pub default: MockReply,
    /// Per-sample sequences consumed one step per request; after the last
    /// step the default reply is used.
    pub scripts: BTreeMap<String, Vec<ScriptStep>>,
    pub delay_ms: u64,
    /// When set, requests must carry `Authorization: Bearer <key>`.
    pub require_key: Option<String>,
    pub ground_truth: BTreeMap<String, String>,
}

impl MockFixture {
    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_str(&read_string(path)?)
            .map_err(|e| Error::validation("fixture", format!("{}: {e}", path.display())))
    }

    /// Add the ground truth of every sample under a dataset root.
    pub fn with_dataset(mut self, dataset: &Path) -> Result<Self> {
        for s in list_samples(dataset)? {
            self.ground_truth.insert(s.sample_id, s.ground_truth);
        }
        Ok(self)
    }
}

#[derive(Debug, Default)]
pub struct MockStats {
    pub requests: AtomicUsize,
    in_flight: AtomicUsize,
    max_in_flight: AtomicUsize,
    per_sample: Mutex<HashMap<String, usize>>,
}

impl MockStats {
    pub fn max_in_flight(&self) -> usize {
        self.max_in_flight.load(Ordering::SeqCst)
    }

    pub fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    pub fn requests_for(&self, sample_id: &str) -> usize {
        self.per_sample.lock().unwrap().get(sample_id).copied().unwrap_or(0)
    }
}

struct AppState {
    fixture: MockFixture,
    stats: Arc<MockStats>,
}

pub struct MockServer {
    addr: SocketAddr,
    stats: Arc<MockStats>,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl MockServer {
    /// Serve on `127.0.0.1:<port>` (0 picks a free port) from a background
    /// thread until dropped.
    pub fn start(fixture: MockFixture, port: u16) -> Result<Self> {
        let listener = std::net::TcpListener::bind(("127.0.0.1", port)).map_err(|e| Error::io("127.0.0.1", e))?;
        listener.set_nonblocking(true).map_err(|e| Error::io("127.0.0.1", e))?;
        let addr = listener.local_addr().map_err(|e| Error::io("127.0.0.1", e))?;
        let stats = Arc::new(MockStats::default());
        let state = Arc::new(AppState {
            fixture,
            stats: Arc::clone(&stats),
        });
        let (tx, rx) = oneshot::channel::<()>();
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .map_err(|e| Error::Transport(format!("mock runtime: {e}")))?;
        let thread = std::thread::spawn(move || {
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener).expect("listener");
                let app = Router::new()
                    .route("/v1/chat/completions", post(handle))
                    .route("/chat/completions", post(handle))
                    .layer(DefaultBodyLimit::max(256 << 20))
                    .with_state(state);
                let _ = axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await;
            });
        });
        Ok(MockServer {
            addr,
            stats,
            shutdown: Some(tx),
            thread: Some(thread),
        })
    }

    pub fn base_url(&self) -> String {
        format!("http://{}/v1", self.addr)
    }

    pub fn stats(&self) -> &MockStats {
        &self.stats
    }

    /// Block the calling thread while the server runs.
    pub fn wait(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

struct InFlight<'a>(&'a MockStats);

impl<'a> InFlight<'a> {
    fn enter(stats: &'a MockStats) -> Self {
        let now = stats.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        stats.max_in_flight.fetch_max(now, Ordering::SeqCst);
        InFlight(stats)
    }
}

impl Drop for InFlight<'_> {
    fn drop(&mut self) {
        self.0.in_flight.fetch_sub(1, Ordering::SeqCst);
    }
}

fn error(status: StatusCode, message: &str) -> Response {
    (status, Json(json!({"error": {"message": message}}))).into_response()
}

async fn handle(State(state): State<Arc<AppState>>, headers: HeaderMap, Json(body): Json<Value>) -> Response {
    let stats = &state.stats;
    let _guard = InFlight::enter(stats);
    stats.requests.fetch_add(1, Ordering::SeqCst);
    let fixture = &state.fixture;
    if fixture.delay_ms > 0 {
        tokio::time::sleep(Duration::from_millis(fixture.delay_ms)).await;
    }
    if let Some(key) = &fixture.require_key {
        let expected = format!("Bearer {key}");
        if headers.get("authorization").and_then(|v| v.to_str().ok()) != Some(expected.as_str()) {
            return error(StatusCode::UNAUTHORIZED, "invalid API key");
        }
    }
    let sample_id = headers
        .get("x-request-id")
        .and_then(|v| v.to_str().ok())
        .unwrap_or_default()
        .to_string();
    let nth = {
        let mut map = stats.per_sample.lock().unwrap();
        let c = map.entry(sample_id.clone()).or_insert(0);
        *c += 1;
        *c - 1
    };
    let mut reply = &fixture.default;
    if let Some(step) = fixture.scripts.get(&sample_id).and_then(|s| s.get(nth)) {
        if step.status != 200 {
            let status = StatusCode::from_u16(step.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
            return error(status, "scripted failure");
        }
        if let Some(r) = &step.reply {
            reply = r;
        }
    }
    let content = match reply {
        MockReply::Echo => match fixture.ground_truth.get(&sample_id) {
            Some(t) => t.clone(),
            None => return error(StatusCode::BAD_REQUEST, "unknown sample id"),
        },
        MockReply::Empty => String::new(),
        MockReply::Text(t) => t.clone(),
    };
    let model = body.get("model").cloned().unwrap_or(Value::Null);
    Json(json!({
        "id": format!("mock-{}", stats.requests()),
        "object": "chat.completion",
        "model": model,
        "choices": [{
            "index": 0,
            "message": {"role": "assistant", "content": content},
            "finish_reason": "stop",
        }],
    }))
    .into_response()
}

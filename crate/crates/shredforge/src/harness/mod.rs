//! Transcription requests against a chat-completion endpoint.

pub mod mock;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use base64::Engine as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use shredforge_core::postprocess::postprocess;
use shredforge_core::Raster;

use crate::dataset::{list_samples, read_composite, ShredSample};
use crate::error::{Error, Result};
use crate::fsutil::{canonical_json, read_string, write_atomic};
use crate::imageio::encode_png_rgb;

pub const DEFAULT_API_KEY_ENV: &str = "SHREDFORGE_API_KEY";
pub const MAX_IMAGE_DIM: u32 = 2048;
pub const RUN_CONFIG_FILE: &str = "_run.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    /// API root; requests go to `<base_url>/chat/completions`.
    pub base_url: String,
    pub model_name: String,
    pub api_key_env: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub request_timeout_s: u64,
    pub max_retries: u32,
    pub max_concurrency: usize,
    /// First backoff delay; doubles on every retry.
    pub retry_base_ms: u64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            base_url: "http://127.0.0.1:8089/v1".into(),
            model_name: "model".into(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            temperature: 0.0,
            max_output_tokens: 8192,
            request_timeout_s: 300,
            max_retries: 5,
            max_concurrency: 4,
            retry_base_ms: 1000,
        }
    }
}

impl EndpointConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::Config("temperature must be non-negative".into()));
        }
        if self.max_concurrency == 0 {
            return Err(Error::Config("max_concurrency must be at least 1".into()));
        }
        if self.base_url.is_empty() || self.model_name.is_empty() {
            return Err(Error::Config("endpoint base_url and model_name are required".into()));
        }
        Ok(())
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub version: String,
    pub system: String,
    pub user: String,
}

impl Default for PromptSpec {
    fn default() -> Self {
        PromptSpec {
            version: "v1".into(),
            system: include_str!("../../assets/prompt-v1.txt").trim().to_string(),
            user: "Restore and transcribe the shredded document in this image.".into(),
        }
    }
}

impl PromptSpec {
    /// Replace the system prompt with the contents of a file.
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(PromptSpec {
            version: format!("file:{}", path.display()),
            system: read_string(path)?.trim().to_string(),
            ..PromptSpec::default()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelTranscript {
    pub sample_id: String,
    pub model_name: String,
    pub raw_response: String,
    pub text: String,
    pub latency_ms: u64,
    pub attempts: u32,
    /// RFC 3339, UTC.
    pub finished_at: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedImage {
    pub width: u32,
    pub height: u32,
    pub png_base64: String,
}

/// Downscale so the longer side is at most `max_dim`, then PNG and base64.
pub fn prepare_image(composite: &Raster, max_dim: u32) -> Result<EncodedImage> {
    if composite.is_empty() {
        return Err(Error::Image("composite is empty".into()));
    }
    let img = composite.fit_within(max_dim);
    Ok(EncodedImage {
        width: img.width,
        height: img.height,
        png_base64: base64::engine::general_purpose::STANDARD.encode(encode_png_rgb(&img)?),
    })
}

pub fn request_body(endpoint: &EndpointConfig, prompt: &PromptSpec, image: &EncodedImage) -> Value {
    json!({
        "model": endpoint.model_name,
        "temperature": endpoint.temperature,
        "max_tokens": endpoint.max_output_tokens,
        "messages": [
            {"role": "system", "content": prompt.system},
            {"role": "user", "content": [
                {"type": "text", "text": prompt.user},
                {"type": "image_url", "image_url": {"url": format!("data:image/png;base64,{}", image.png_base64)}},
            ]},
        ],
    })
}

/// Assistant text from a chat-completion response. A null or missing
/// content is an empty answer.
pub fn response_text(body: &Value) -> Result<String> {
    let message = body
        .get("choices")
        .and_then(|c| c.get(0))
        .and_then(|c| c.get("message"))
        .ok_or_else(|| Error::Transport("response has no choices[0].message".into()))?;
    Ok(match message.get("content") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Array(parts)) => parts
            .iter()
            .filter_map(|p| p.get("text").and_then(Value::as_str))
            .collect::<Vec<_>>()
            .join(""),
        _ => String::new(),
    })
}

pub fn api_key(endpoint: &EndpointConfig) -> Result<String> {
    match std::env::var(&endpoint.api_key_env) {
        Ok(k) if !k.is_empty() => Ok(k),
        _ => Err(Error::Config(format!(
            "API key environment variable {} is not set",
            endpoint.api_key_env
        ))),
    }
}

pub struct Transcriber {
    agent: ureq::Agent,
    endpoint: EndpointConfig,
    prompt: PromptSpec,
    api_key: String,
}

impl Transcriber {
    /// Fails before any request when the API key is missing.
    pub fn new(endpoint: EndpointConfig, prompt: PromptSpec) -> Result<Self> {
        endpoint.validate()?;
        let api_key = api_key(&endpoint)?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(endpoint.request_timeout_s.max(1))))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(Transcriber {
            agent,
            endpoint,
            prompt,
            api_key,
        })
    }

    pub fn endpoint(&self) -> &EndpointConfig {
        &self.endpoint
    }

    /// Send one sample, retrying 429, 5xx and transport failures with
    /// exponential backoff.
    pub fn transcribe(&self, sample_id: &str, image: &EncodedImage) -> Result<ModelTranscript> {
        let body = request_body(&self.endpoint, &self.prompt, image);
        let url = self.endpoint.url();
        let start = Instant::now();
        let mut attempts = 0u32;
        loop {
            attempts += 1;
            let outcome = self
                .agent
                .post(&url)
                .header("Authorization", &format!("Bearer {}", self.api_key))
                .header("x-request-id", sample_id)
                .send_json(&body);
            let retry_reason = match outcome {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    let text = resp.body_mut().read_to_string().unwrap_or_default();
                    match status {
                        200..=299 => {
                            let v: Value = serde_json::from_str(&text)
                                .map_err(|e| Error::Transport(format!("response is not JSON: {e}")))?;
                            let raw = response_text(&v)?;
                            return Ok(ModelTranscript {
                                sample_id: sample_id.to_string(),
                                model_name: self.endpoint.model_name.clone(),
                                text: postprocess(&raw),
                                raw_response: raw,
                                latency_ms: start.elapsed().as_millis() as u64,
                                attempts,
                                finished_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
                            });
                        }
                        401 | 403 => return Err(Error::Auth(format!("HTTP {status}: {}", text.trim()))),
                        429 | 500..=599 => format!("HTTP {status}"),
                        _ => return Err(Error::Transport(format!("HTTP {status}: {}", text.trim()))),
                    }
                }
                Err(e) => e.to_string(),
            };
            if attempts > self.endpoint.max_retries {
                return Err(Error::Transport(format!(
                    "gave up after {attempts} attempts: {retry_reason}"
                )));
            }
            let backoff = self.endpoint.retry_base_ms.saturating_mul(1 << (attempts - 1).min(16));
            std::thread::sleep(Duration::from_millis(backoff.min(120_000)));
        }
    }
}

/// Directory-safe form of a model name.
pub fn model_dir_name(model: &str) -> String {
    model
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '.' | '_') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn transcript_path(results_root: &Path, model: &str, sample_id: &str) -> PathBuf {
    results_root
        .join(model_dir_name(model))
        .join(format!("{sample_id}.json"))
}

pub fn read_transcript(path: &Path) -> Result<ModelTranscript> {
    serde_json::from_str(&read_string(path)?)
        .map_err(|e| Error::validation("transcript", format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvaluationSummary {
    pub total: usize,
    pub skipped: usize,
    pub completed: usize,
    pub failures: Vec<(String, String)>,
}

#[derive(Serialize)]
struct RunEcho<'a> {
    endpoint: &'a EndpointConfig,
    prompt_version: &'a str,
    max_image_dim: u32,
}

/// Transcribe every sample in a dataset that has no result yet.
///
/// At most `max_concurrency` requests are in flight. Each transcript is
/// written atomically to `results/<model>/<sample_id>.json`, so an
/// interrupted run resumes where it stopped. An authentication failure stops
/// the run.
pub fn run_evaluation(dataset: &Path, results: &Path, client: &Transcriber) -> Result<EvaluationSummary> {
    let samples = list_samples(dataset)?;
    let endpoint = client.endpoint();
    let echo = RunEcho {
        endpoint,
        prompt_version: &client.prompt.version,
        max_image_dim: MAX_IMAGE_DIM,
    };
    write_atomic(
        &results.join(model_dir_name(&endpoint.model_name)).join(RUN_CONFIG_FILE),
        canonical_json(&echo)?.as_bytes(),
    )?;
    let pending: Vec<&ShredSample> = samples
        .iter()
        .filter(|s| !transcript_path(results, &endpoint.model_name, &s.sample_id).exists())
        .collect();
    let mut summary = EvaluationSummary {
        total: samples.len(),
        skipped: samples.len() - pending.len(),
        ..EvaluationSummary::default()
    };
    let next = AtomicUsize::new(0);
    let done = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let failures = Mutex::new(Vec::new());
    let auth_error = Mutex::new(None);
    let workers = endpoint.max_concurrency.min(pending.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                while !stop.load(Ordering::SeqCst) {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(sample) = pending.get(i) else { break };
                    let result = read_composite(dataset, sample)
                        .and_then(|img| prepare_image(&img, MAX_IMAGE_DIM))
                        .and_then(|img| client.transcribe(&sample.sample_id, &img))
                        .and_then(|t| {
                            let path = transcript_path(results, &endpoint.model_name, &sample.sample_id);
                            write_atomic(&path, canonical_json(&t)?.as_bytes())
                        });
                    match result {
                        Ok(()) => {
                            done.fetch_add(1, Ordering::SeqCst);
                        }
                        Err(Error::Auth(msg)) => {
                            stop.store(true, Ordering::SeqCst);
                            auth_error.lock().unwrap().get_or_insert(msg);
                        }
                        Err(e) => failures.lock().unwrap().push((sample.sample_id.clone(), e.to_string())),
                    }
                }
            });
        }
    });
    if let Some(msg) = auth_error.into_inner().unwrap() {
        return Err(Error::Auth(msg));
    }
    summary.completed = done.into_inner();
    summary.failures = failures.into_inner().unwrap();
    summary.failures.sort();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_sizes() {
        let r = Raster::filled(4096, 2048, [9, 9, 9, 255]);
        let e = prepare_image(&r, 2048).unwrap();
        assert_eq!((e.width, e.height), (2048, 1024));
        let small = prepare_image(&Raster::filled(1000, 800, [0, 0, 0, 255]), 2048).unwrap();
        assert_eq!((small.width, small.height), (1000, 800));
        assert!(prepare_image(&Raster::filled(0, 0, [0; 4]), 2048).is_err());
    }

    #[test]
    fn body_shape() {
        let img = EncodedImage {
            width: 1,
            height: 1,
            png_base64: "QUJD".into(),
        };
        let b = request_body(&EndpointConfig::default(), &PromptSpec::default(), &img);
        assert_eq!(b["temperature"], 0.0);
        assert_eq!(b["messages"][0]["role"], "system");
        let system = b["messages"][0]["content"].as_str().unwrap();
        assert!(
            system.contains("stitch") && system.contains("verbatim") && system.contains("shadows, tears, and noise")
        );
        assert_eq!(
            b["messages"][1]["content"][1]["image_url"]["url"],
            "data:image/png;base64,QUJD"
        );
    }

    #[test]
    fn response_parsing() {
        let v = json!({"choices": [{"message": {"content": "hi"}}]});
        assert_eq!(response_text(&v).unwrap(), "hi");
        let parts = json!({"choices": [{"message": {"content": [{"type": "text", "text": "a"}, {"type": "text", "text": "b"}]}}]});
        assert_eq!(response_text(&parts).unwrap(), "ab");
        let null = json!({"choices": [{"message": {"content": null}}]});
        assert_eq!(response_text(&null).unwrap(), "");
        assert!(response_text(&json!({})).is_err());
    }

    #[test]
    fn missing_key_fails_early() {
        let ep = EndpointConfig {
            api_key_env: "SHREDFORGE_TEST_UNSET_KEY_VAR".into(),
            ..EndpointConfig::default()
        };
        assert!(matches!(
            Transcriber::new(ep, PromptSpec::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn model_names_are_path_safe() {
        assert_eq!(model_dir_name("org/model:v1"), "org_model_v1");
    }
}

//! Blocking chat-completion client and the corrector built on it.

use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use sempilot_core::semantic::{
    normalize_correction, CorrectionError, CorrectionResult, Corrector, CorrectorSource,
};
use sempilot_core::textcodec::{Alphabet, TextSequence};

use crate::cache;
use crate::error::RemoteError;
use crate::prompt::PromptTemplate;

/// Remote corrector endpoint settings.
#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the API key; requests go out without an
    /// Authorization header when it is unset (fine for local stubs).
    pub api_key_env: String,
    pub timeout_secs: f64,
    /// Retry attempts after the first try.
    pub max_retries: u32,
    /// First retry delay; doubles per attempt.
    pub retry_backoff_ms: u64,
    pub cache_dir: PathBuf,
    /// Bound on concurrent in-flight requests.
    pub max_in_flight: usize,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            endpoint: "https://api.openai.com/v1/chat/completions".to_string(),
            model: "o4-mini".to_string(),
            api_key_env: "OPENAI_API_KEY".to_string(),
            timeout_secs: 30.0,
            max_retries: 3,
            retry_backoff_ms: 200,
            cache_dir: PathBuf::from(".sempilot-cache"),
            max_in_flight: 4,
        }
    }
}

/// Counting gate bounding concurrent requests.
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn new(slots: usize) -> Gate {
        Gate { free: Mutex::new(slots.max(1)), cv: Condvar::new() }
    }

    fn acquire(&self) -> GateGuard<'_> {
        let mut free = self.free.lock().unwrap();
        while *free == 0 {
            free = self.cv.wait(free).unwrap();
        }
        *free -= 1;
        GateGuard { gate: self }
    }
}

struct GateGuard<'a> {
    gate: &'a Gate,
}

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        *self.gate.free.lock().unwrap() += 1;
        self.gate.cv.notify_one();
    }
}

/// How many attempts one request took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RetryStats {
    pub attempts: u32,
    /// Attempts beyond the first.
    pub retries: u32,
}

/// One corrector response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteReply {
    /// The assistant message content.
    pub content: String,
    pub cache_hit: bool,
    pub stats: RetryStats,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: String,
}

/// Blocking chat-completion client with caching and retry. Safe to share
/// across threads; the gate bounds concurrent requests.
pub struct RemoteClient {
    config: RemoteConfig,
    template: PromptTemplate,
    api_key: Option<String>,
    http: reqwest::blocking::Client,
    gate: Gate,
    requests_sent: AtomicU64,
    cache_hits: AtomicU64,
}

impl RemoteClient {
    pub fn new(config: RemoteConfig, template: PromptTemplate) -> Result<Arc<Self>, RemoteError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout_secs))
            .build()
            .map_err(|e| RemoteError::Transport(e.to_string()))?;
        let api_key = std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty());
        Ok(Arc::new(RemoteClient {
            gate: Gate::new(config.max_in_flight),
            api_key,
            http,
            template,
            config,
            requests_sent: AtomicU64::new(0),
            cache_hits: AtomicU64::new(0),
        }))
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    /// Network requests issued so far (cache hits excluded).
    pub fn requests_sent(&self) -> u64 {
        self.requests_sent.load(Ordering::Relaxed)
    }

    pub fn cache_hits(&self) -> u64 {
        self.cache_hits.load(Ordering::Relaxed)
    }

    /// Returns the corrected-message content for `text`, from cache when
    /// possible. The raw response body lands in the cache before parsing, so
    /// replays behave exactly like the live call did.
    pub fn correct_text(&self, text: &str) -> Result<RemoteReply, RemoteError> {
        let key = cache::cache_key(&self.config.model, &self.template, text);
        if let Some(body) = cache::load(&self.config.cache_dir, &key) {
            self.cache_hits.fetch_add(1, Ordering::Relaxed);
            let content = parse_content(&body)?;
            return Ok(RemoteReply { content, cache_hit: true, stats: RetryStats::default() });
        }

        let (body, stats) = self.request_with_retry(text)?;
        cache::store(&self.config.cache_dir, &key, &body)?;
        let content = parse_content(&body)?;
        Ok(RemoteReply { content, cache_hit: false, stats })
    }

    fn request_with_retry(&self, text: &str) -> Result<(String, RetryStats), RemoteError> {
        let _slot = self.gate.acquire();
        let mut stats = RetryStats::default();
        let mut backoff = Duration::from_millis(self.config.retry_backoff_ms);
        loop {
            stats.attempts += 1;
            match self.request_once(text) {
                Ok(body) => return Ok((body, stats)),
                Err(e) if e.is_retryable() && stats.retries < self.config.max_retries => {
                    stats.retries += 1;
                    std::thread::sleep(backoff);
                    backoff *= 2;
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn request_once(&self, text: &str) -> Result<String, RemoteError> {
        self.requests_sent.fetch_add(1, Ordering::Relaxed);
        let (system, user) = self.template.render(text);
        let payload = json!({
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        });
        let mut request = self.http.post(&self.config.endpoint).json(&payload);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request.send().map_err(|e| {
            if e.is_timeout() {
                RemoteError::Timeout
            } else {
                RemoteError::Transport(e.to_string())
            }
        })?;
        let status = response.status();
        if !status.is_success() {
            return Err(RemoteError::Http { status: status.as_u16() });
        }
        response.text().map_err(|e| {
            if e.is_timeout() {
                RemoteError::Timeout
            } else {
                RemoteError::Transport(e.to_string())
            }
        })
    }
}

fn parse_content(body: &str) -> Result<String, RemoteError> {
    let parsed: ChatResponse =
        serde_json::from_str(body).map_err(|e| RemoteError::Malformed(e.to_string()))?;
    let first = parsed
        .choices
        .into_iter()
        .next()
        .ok_or_else(|| RemoteError::Malformed("empty choices array".to_string()))?;
    Ok(first.message.content)
}

/// Picks the answer line out of possibly chatty model output: among non-empty
/// lines, the first one whose character count is closest to `target_len`.
pub fn extract_candidate(content: &str, target_len: usize) -> &str {
    content
        .split('\n')
        .map(|line| line.strip_suffix('\r').unwrap_or(line))
        .filter(|line| !line.trim().is_empty())
        .min_by_key(|line| {
            let len = line.chars().count() as i64;
            (len - target_len as i64).abs()
        })
        .unwrap_or("")
}

/// [`Corrector`] backed by a shared [`RemoteClient`]. Cloning hands the same
/// client (and cache) to another trial.
#[derive(Clone)]
pub struct RemoteCorrector {
    client: Arc<RemoteClient>,
    alphabet: Alphabet,
}

impl RemoteCorrector {
    pub fn new(client: Arc<RemoteClient>, alphabet: Alphabet) -> Self {
        RemoteCorrector { client, alphabet }
    }

    pub fn client(&self) -> &Arc<RemoteClient> {
        &self.client
    }
}

impl Corrector for RemoteCorrector {
    fn correct(&mut self, decoded: &TextSequence) -> Result<CorrectionResult, CorrectionError> {
        let reply = self
            .client
            .correct_text(&decoded.to_string())
            .map_err(|e| CorrectionError::Unavailable(e.to_string()))?;
        let candidate = extract_candidate(&reply.content, decoded.len());
        let (corrected, length_repaired) =
            normalize_correction(&self.alphabet, candidate, decoded.len());
        Ok(CorrectionResult { corrected, length_repaired, source: CorrectorSource::Remote })
    }
}

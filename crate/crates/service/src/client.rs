//! Blocking HTTP clients for the remote entailment server and the remote
//! rule container.

use std::collections::BTreeMap;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use rulebridge::rulestore::{RemoteContainer, RemoteError, TranslatedRuleDoc};
use rulebridge::scoring::{wire, EntailmentScorer, EntailmentTriple, ScoreError};
use ureq::Agent;

fn agent(timeout: Duration) -> Agent {
    Agent::config_builder()
        .timeout_global(Some(timeout))
        .http_status_as_error(false)
        .build()
        .into()
}

/// Counting semaphore bounding concurrent requests.
struct Permits {
    free: Mutex<usize>,
    released: Condvar,
}

struct Permit<'a>(&'a Permits);

impl Permits {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n.max(1)),
            released: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().expect("permit lock poisoned");
        while *free == 0 {
            free = self.released.wait(free).expect("permit lock poisoned");
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("permit lock poisoned") += 1;
        self.0.released.notify_one();
    }
}

/// Client for `POST /entail` and `POST /entail/batch`.
///
/// Transport failures and 5xx responses are retried (scoring is
/// idempotent) and then reported as [`ScoreError::Unavailable`]. Triples
/// that fail validation are rejected.
pub struct RemoteEntailment {
    agent: Agent,
    base: String,
    retries: u32,
    permits: Permits,
}

impl RemoteEntailment {
    pub fn new(base_url: &str, timeout: Duration, retries: u32, max_in_flight: usize) -> Self {
        Self {
            agent: agent(timeout),
            base: base_url.trim_end_matches('/').to_string(),
            retries,
            permits: Permits::new(max_in_flight),
        }
    }

    fn post(&self, path: &str, body: &[u8]) -> Result<Vec<u8>, ScoreError> {
        let url = format!("{}{path}", self.base);
        let _permit = self.permits.acquire();
        let mut last = String::new();
        for attempt in 0..=self.retries {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(50 << attempt.min(6)));
            }
            match self
                .agent
                .post(&url)
                .header("content-type", "application/json")
                .send(body)
            {
                Ok(mut resp) => {
                    let status = resp.status();
                    let bytes = resp
                        .body_mut()
                        .read_to_vec()
                        .map_err(|e| ScoreError::Unavailable(format!("{url}: {e}")))?;
                    if status.is_success() {
                        return Ok(bytes);
                    }
                    last = format!("{url} answered {status}");
                    if status.is_client_error() {
                        return Err(ScoreError::Unavailable(last));
                    }
                }
                Err(e) => last = format!("{url}: {e}"),
            }
        }
        Err(ScoreError::Unavailable(last))
    }
}

impl EntailmentScorer for RemoteEntailment {
    fn entail(&self, premise: &str, hypothesis: &str) -> Result<EntailmentTriple, ScoreError> {
        let body = self.post("/entail", &wire::request_body(premise, hypothesis))?;
        wire::parse_response(&body)
    }

    fn entail_batch(&self, pairs: &[(&str, &str)]) -> Result<Vec<Result<EntailmentTriple, ScoreError>>, ScoreError> {
        if pairs.is_empty() {
            return Ok(Vec::new());
        }
        let body = self.post("/entail/batch", &wire::batch_request_body(pairs))?;
        wire::parse_batch_response(&body, pairs.len())
    }
}

/// Plain HTTP document container: `GET /rules` returns an id to revision
/// manifest, `GET`/`PUT /rules/{id}` move single documents.
pub struct HttpContainer {
    agent: Agent,
    base: String,
    token: Option<String>,
}

impl HttpContainer {
    pub fn new(base_url: &str, token: Option<String>, timeout: Duration) -> Self {
        Self {
            agent: agent(timeout),
            base: base_url.trim_end_matches('/').to_string(),
            token,
        }
    }

    fn auth<B>(&self, req: ureq::RequestBuilder<B>) -> ureq::RequestBuilder<B> {
        match &self.token {
            Some(t) => req.header("authorization", format!("Bearer {t}")),
            None => req,
        }
    }

    fn finish(
        &self,
        what: &str,
        outcome: Result<ureq::http::Response<ureq::Body>, ureq::Error>,
    ) -> Result<Vec<u8>, RemoteError> {
        let mut resp = outcome.map_err(|e| RemoteError::Transport(format!("{what}: {e}")))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_vec()
            .map_err(|e| RemoteError::Transport(format!("{what}: {e}")))?;
        match status {
            200..=299 => Ok(body),
            401 | 403 => Err(RemoteError::Unauthorized),
            404 => Err(RemoteError::NotFound(what.to_string())),
            s => Err(RemoteError::Transport(format!("{what} answered {s}"))),
        }
    }

    fn doc_url(&self, id: &str) -> String {
        format!("{}/rules/{}", self.base, encode_segment(id))
    }
}

/// Percent-encodes everything outside the unreserved URL characters.
fn encode_segment(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.' | b'~') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

impl RemoteContainer for HttpContainer {
    fn manifest(&self) -> Result<BTreeMap<String, u64>, RemoteError> {
        let url = format!("{}/rules", self.base);
        let body = self.finish("rule manifest", self.auth(self.agent.get(&url)).call())?;
        serde_json::from_slice(&body).map_err(|e| RemoteError::Malformed(e.to_string()))
    }

    fn fetch(&self, id: &str) -> Result<TranslatedRuleDoc, RemoteError> {
        let body = self.finish(id, self.auth(self.agent.get(&self.doc_url(id))).call())?;
        serde_json::from_slice(&body).map_err(|e| RemoteError::Malformed(e.to_string()))
    }

    fn store(&self, doc: &TranslatedRuleDoc) -> Result<(), RemoteError> {
        let body = serde_json::to_vec(doc).map_err(|e| RemoteError::Malformed(e.to_string()))?;
        let req = self
            .auth(self.agent.put(&self.doc_url(&doc.id)))
            .header("content-type", "application/json");
        self.finish(&doc.id, req.send(&body[..])).map(|_| ())
    }
}

use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::Duration;

use serde_json::json;

use crate::wire::count_image_parts;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpReply {
    pub status: u16,
    pub body: Vec<u8>,
}

impl HttpReply {
    pub fn new(status: u16, body: impl Into<Vec<u8>>) -> Self {
        Self {
            status,
            body: body.into(),
        }
    }

    /// A 200 chat-completions reply carrying `text`.
    pub fn completion(text: &str, prompt_tokens: Option<u64>, completion_tokens: Option<u64>) -> Self {
        let mut v = json!({ "choices": [{ "index": 0, "message": { "role": "assistant", "content": text } }] });
        if let (Some(p), Some(c)) = (prompt_tokens, completion_tokens) {
            v["usage"] = json!({ "prompt_tokens": p, "completion_tokens": c, "total_tokens": p + c });
        }
        Self::new(200, serde_json::to_vec(&v).expect("json serializes"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportError {
    Timeout,
    Connect(String),
}

/// Moves one POST to the endpoint.
pub trait Transport: Send + Sync {
    fn post(&self, url: &str, headers: &[(String, String)], body: &[u8], timeout: Duration)
        -> Result<HttpReply, TransportError>;
}

pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new() -> Result<Self, String> {
        let client = reqwest::blocking::Client::builder().build().map_err(|e| e.to_string())?;
        Ok(Self { client })
    }
}

impl Transport for HttpTransport {
    fn post(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &[u8],
        timeout: Duration,
    ) -> Result<HttpReply, TransportError> {
        let mut req = self.client.post(url).timeout(timeout).body(body.to_vec());
        for (k, v) in headers {
            req = req.header(k.as_str(), v.as_str());
        }
        let classify = |e: reqwest::Error| {
            if e.is_timeout() {
                TransportError::Timeout
            } else {
                TransportError::Connect(e.to_string())
            }
        };
        let resp = req.send().map_err(classify)?;
        let status = resp.status().as_u16();
        let body = resp.bytes().map_err(classify)?.to_vec();
        Ok(HttpReply { status, body })
    }
}

/// Offline endpoint. Scripted replies are served first, in order; after
/// that every request gets a 200 whose text is `images=N`. Echo usage
/// reports `60 + 963·N` input tokens. Every request body is recorded.
#[derive(Default)]
pub struct MockTransport {
    script: Mutex<VecDeque<Result<HttpReply, TransportError>>>,
    requests: Mutex<Vec<Vec<u8>>>,
}

impl MockTransport {
    pub fn echo() -> Self {
        Self::default()
    }

    pub fn scripted(replies: impl IntoIterator<Item = Result<HttpReply, TransportError>>) -> Self {
        Self {
            script: Mutex::new(replies.into_iter().collect()),
            requests: Mutex::new(Vec::new()),
        }
    }

    pub fn request_count(&self) -> usize {
        self.requests.lock().expect("mock lock").len()
    }

    pub fn requests(&self) -> Vec<Vec<u8>> {
        self.requests.lock().expect("mock lock").clone()
    }
}

impl Transport for MockTransport {
    fn post(&self, _url: &str, _h: &[(String, String)], body: &[u8], _t: Duration) -> Result<HttpReply, TransportError> {
        self.requests.lock().expect("mock lock").push(body.to_vec());
        if let Some(next) = self.script.lock().expect("mock lock").pop_front() {
            return next;
        }
        match count_image_parts(body) {
            Ok(n) => Ok(HttpReply::completion(&format!("images={n}"), Some(60 + 963 * n as u64), Some(3))),
            Err(_) => Ok(HttpReply::new(400, "unparseable request")),
        }
    }
}

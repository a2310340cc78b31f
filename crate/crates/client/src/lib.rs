//! Client for OpenAI-compatible multimodal chat endpoints and the
//! benchmark runner built on it.

mod bench;
mod client;
mod config;
mod judge;
pub mod limiter;
mod transport;
mod wire;

use thiserror::Error;

pub use bench::{prepare_images, run_bench, BenchError, BenchOptions, BenchSummary};
pub use client::VisionClient;
pub use config::{EndpointConfig, TransportKind};
pub use judge::LlmJudge;
pub use transport::{HttpReply, HttpTransport, MockTransport, Transport, TransportError};
pub use wire::{build_body, count_image_parts, image_data_uri, parse_reply, VisionRequest, VisionResponse};

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("endpoint configuration: {0}")]
    Config(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("authentication failed (HTTP {status}): {body}")]
    AuthFailed { status: u16, body: String },
    #[error("rate limited after {retries} retries")]
    RateLimited { retries: u32 },
    #[error("request timed out")]
    Timeout,
    #[error("connection failed: {0}")]
    Connect(String),
    #[error("server error (HTTP {status}): {body}")]
    Server { status: u16, body: String },
    #[error("request rejected (HTTP {status}): {body}")]
    Rejected { status: u16, body: String },
    #[error("unexpected reply: {0}")]
    Protocol(String),
}

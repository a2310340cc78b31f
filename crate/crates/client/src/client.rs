use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::config::{EndpointConfig, TransportKind};
use crate::limiter::{Clock, RateLimiter, Semaphore, SystemClock};
use crate::transport::{HttpTransport, MockTransport, Transport, TransportError};
use crate::wire::{build_body, parse_reply, VisionRequest, VisionResponse};
use crate::ClientError;

/// Sends vision requests with pacing, bounded concurrency and retries.
/// Cheap to share across threads by reference.
pub struct VisionClient {
    cfg: EndpointConfig,
    api_key: Option<String>,
    transport: Arc<dyn Transport>,
    limiter: RateLimiter,
    in_flight: Semaphore,
    clock: Arc<dyn Clock>,
}

impl VisionClient {
    /// Builds the transport named in `cfg` and reads the API key from the
    /// environment.
    pub fn from_config(cfg: EndpointConfig) -> Result<Self, ClientError> {
        cfg.validate()?;
        let transport: Arc<dyn Transport> = match cfg.transport {
            TransportKind::Http => Arc::new(HttpTransport::new().map_err(ClientError::Config)?),
            TransportKind::MockEcho => Arc::new(MockTransport::echo()),
        };
        let key = cfg.resolve_api_key()?;
        Self::with_transport(cfg, key, transport, Arc::new(SystemClock::default()))
    }

    pub fn with_transport(
        cfg: EndpointConfig,
        api_key: Option<String>,
        transport: Arc<dyn Transport>,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, ClientError> {
        cfg.validate()?;
        Ok(Self {
            limiter: RateLimiter::per_minute(cfg.requests_per_minute, clock.clone()),
            in_flight: Semaphore::new(cfg.max_concurrent_requests),
            api_key,
            transport,
            clock,
            cfg,
        })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.cfg
    }

    fn headers(&self) -> Vec<(String, String)> {
        let mut h = vec![("Content-Type".to_string(), "application/json".to_string())];
        if let Some(k) = &self.api_key {
            h.push(("Authorization".to_string(), format!("Bearer {k}")));
        }
        h
    }

    fn backoff(&self, attempt: u32) -> Duration {
        let ms = self
            .cfg
            .backoff_base_ms
            .saturating_mul(1u64 << attempt.min(20))
            .min(self.cfg.backoff_max_ms);
        Duration::from_millis(ms)
    }

    /// Retries 429, 5xx, timeouts and connection failures with exponential
    /// backoff; 401/403 and other 4xx fail immediately.
    pub fn send(&self, req: &VisionRequest) -> Result<VisionResponse, ClientError> {
        let body = build_body(req, &self.cfg.model_name, self.cfg.temperature, self.cfg.max_tokens)?;
        let url = self.cfg.completions_url();
        let headers = self.headers();
        let timeout = Duration::from_secs_f64(self.cfg.timeout_s);
        let mut attempt = 0u32;
        loop {
            let outcome = {
                let _permit = self.in_flight.acquire();
                self.limiter.acquire();
                let start = Instant::now();
                let r = self.transport.post(&url, &headers, &body, timeout);
                (r, start.elapsed().as_secs_f64())
            };
            let retryable = match outcome {
                (Ok(reply), latency_s) if (200..300).contains(&reply.status) => {
                    let parsed = parse_reply(&reply.body)?;
                    return Ok(VisionResponse {
                        text: parsed.text,
                        input_tokens: parsed.input_tokens,
                        output_tokens: parsed.output_tokens,
                        latency_s,
                        raw_status: reply.status,
                        retry_count: attempt,
                    });
                }
                (Ok(reply), _) => match reply.status {
                    401 | 403 => {
                        return Err(ClientError::AuthFailed {
                            status: reply.status,
                            body: snippet(&reply.body),
                        })
                    }
                    429 => ClientError::RateLimited { retries: attempt },
                    s if s >= 500 => ClientError::Server {
                        status: s,
                        body: snippet(&reply.body),
                    },
                    s => {
                        return Err(ClientError::Rejected {
                            status: s,
                            body: snippet(&reply.body),
                        })
                    }
                },
                (Err(TransportError::Timeout), _) => ClientError::Timeout,
                (Err(TransportError::Connect(m)), _) => ClientError::Connect(m),
            };
            if attempt >= self.cfg.max_retries {
                return Err(match retryable {
                    ClientError::RateLimited { .. } => ClientError::RateLimited { retries: attempt },
                    e => e,
                });
            }
            self.clock.sleep(self.backoff(attempt));
            attempt += 1;
        }
    }
}

fn snippet(body: &[u8]) -> String {
    String::from_utf8_lossy(body).chars().take(300).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limiter::ManualClock;
    use crate::transport::HttpReply;
    use illuscope_core::{Channels, RasterImage};

    fn client(transport: Arc<MockTransport>, clock: Arc<ManualClock>) -> VisionClient {
        let cfg = EndpointConfig {
            backoff_base_ms: 100,
            backoff_max_ms: 1000,
            max_retries: 3,
            ..EndpointConfig::mock()
        };
        VisionClient::with_transport(cfg, Some("k".into()), transport, clock).unwrap()
    }

    fn image() -> RasterImage {
        RasterImage::filled(8, 8, Channels::Gray, 255).unwrap()
    }

    #[test]
    fn echo_counts_parts() {
        let t = Arc::new(MockTransport::echo());
        let c = client(t.clone(), Arc::default());
        let r = c.send(&VisionRequest::new("q", vec![image(); 4])).unwrap();
        assert_eq!(r.text, "images=4");
        assert_eq!(r.input_tokens, Some(60 + 4 * 963));
        assert_eq!(r.retry_count, 0);
    }

    #[test]
    fn retries_429_with_backoff() {
        let t = Arc::new(MockTransport::scripted([
            Ok(HttpReply::new(429, "slow down")),
            Ok(HttpReply::new(429, "slow down")),
        ]));
        let clock = Arc::new(ManualClock::default());
        let c = client(t.clone(), clock.clone());
        let r = c.send(&VisionRequest::new("q", vec![image()])).unwrap();
        assert_eq!(r.retry_count, 2);
        assert_eq!(r.text, "images=1");
        assert_eq!(t.request_count(), 3);
        assert_eq!(clock.now(), Duration::from_millis(100 + 200));
    }

    #[test]
    fn auth_failure_not_retried() {
        let t = Arc::new(MockTransport::scripted([Ok(HttpReply::new(401, "bad key"))]));
        let c = client(t.clone(), Arc::default());
        let err = c.send(&VisionRequest::new("q", vec![image()])).unwrap_err();
        assert!(matches!(err, ClientError::AuthFailed { status: 401, .. }));
        assert_eq!(t.request_count(), 1);
    }

    #[test]
    fn exhausted_retries() {
        let t = Arc::new(MockTransport::scripted((0..4).map(|_| Ok(HttpReply::new(429, "")))));
        let c = client(t.clone(), Arc::default());
        assert!(matches!(c.send(&VisionRequest::text("q")), Err(ClientError::RateLimited { retries: 3 })));
        assert_eq!(t.request_count(), 4);

        let t = Arc::new(MockTransport::scripted((0..4).map(|_| Err(TransportError::Timeout))));
        let c = client(t, Arc::default());
        assert!(matches!(c.send(&VisionRequest::text("q")), Err(ClientError::Timeout)));
    }

    #[test]
    fn client_errors_and_protocol() {
        let t = Arc::new(MockTransport::scripted([Ok(HttpReply::new(400, "bad"))]));
        let c = client(t.clone(), Arc::default());
        assert!(matches!(c.send(&VisionRequest::text("q")), Err(ClientError::Rejected { status: 400, .. })));
        assert_eq!(t.request_count(), 1);

        let t = Arc::new(MockTransport::scripted([Ok(HttpReply::new(200, "not json"))]));
        let c = client(t, Arc::default());
        assert!(matches!(c.send(&VisionRequest::text("q")), Err(ClientError::Protocol(_))));

        let t = Arc::new(MockTransport::scripted([Ok(HttpReply::new(503, "")), Ok(HttpReply::new(502, ""))]));
        let c = client(t.clone(), Arc::default());
        assert!(c.send(&VisionRequest::text("q")).is_ok());
        assert_eq!(t.request_count(), 3);
    }
}

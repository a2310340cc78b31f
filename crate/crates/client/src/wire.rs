//! Chat-completions request bodies and reply parsing.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use illuscope_core::imaging::encode_png;
use illuscope_core::RasterImage;
use serde_json::{json, Value};

use crate::ClientError;

#[derive(Debug, Clone, PartialEq)]
pub struct VisionRequest {
    pub prompt: String,
    /// Sent in this order.
    pub images: Vec<RasterImage>,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
}

impl VisionRequest {
    pub fn new(prompt: impl Into<String>, images: Vec<RasterImage>) -> Self {
        Self {
            prompt: prompt.into(),
            images,
            temperature: None,
            max_tokens: None,
        }
    }

    pub fn text(prompt: impl Into<String>) -> Self {
        Self::new(prompt, Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisionResponse {
    pub text: String,
    pub input_tokens: Option<u64>,
    pub output_tokens: Option<u64>,
    pub latency_s: f64,
    pub raw_status: u16,
    pub retry_count: u32,
}

pub fn image_data_uri(img: &RasterImage) -> Result<String, ClientError> {
    let png = encode_png(img).map_err(|e| ClientError::InvalidRequest(format!("PNG encoding failed: {e}")))?;
    Ok(format!("data:image/png;base64,{}", STANDARD.encode(png)))
}

/// One user message: the prompt text, then one `image_url` part per image.
pub fn build_body(req: &VisionRequest, model: &str, temperature: f64, max_tokens: u32) -> Result<Vec<u8>, ClientError> {
    if req.prompt.trim().is_empty() {
        return Err(ClientError::InvalidRequest("prompt is empty".into()));
    }
    let mut content = vec![json!({ "type": "text", "text": req.prompt })];
    for img in &req.images {
        content.push(json!({ "type": "image_url", "image_url": { "url": image_data_uri(img)? } }));
    }
    let body = json!({
        "model": model,
        "messages": [{ "role": "user", "content": content }],
        "temperature": req.temperature.unwrap_or(temperature),
        "max_tokens": req.max_tokens.unwrap_or(max_tokens),
    });
    Ok(serde_json::to_vec(&body).expect("json serializes"))
}

/// Number of `image_url` parts in a request body.
pub fn count_image_parts(body: &[u8]) -> Result<usize, ClientError> {
    let v: Value = serde_json::from_slice(body).map_err(|e| ClientError::Protocol(e.to_string()))?;
    let parts = v["messages"]
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(|m| m["content"].as_array())
        .flatten()
        .filter(|p| p["type"] == "image_url")
        .count();
    Ok(parts)
}

pub struct ParsedReply {
    pub text: String,
    pub input_tokens: Option<u64>,
    pub output_tokens: Option<u64>,
}

pub fn parse_reply(body: &[u8]) -> Result<ParsedReply, ClientError> {
    let v: Value =
        serde_json::from_slice(body).map_err(|e| ClientError::Protocol(format!("reply is not JSON: {e}")))?;
    let content = &v["choices"][0]["message"]["content"];
    let text = match content {
        Value::String(s) => s.clone(),
        Value::Array(parts) => parts
            .iter()
            .filter_map(|p| p["text"].as_str())
            .collect::<Vec<_>>()
            .join(""),
        Value::Null => return Err(ClientError::Protocol("reply has no choices[0].message.content".into())),
        other => return Err(ClientError::Protocol(format!("unexpected content {other}"))),
    };
    Ok(ParsedReply {
        text,
        input_tokens: v["usage"]["prompt_tokens"].as_u64(),
        output_tokens: v["usage"]["completion_tokens"].as_u64(),
    })
}

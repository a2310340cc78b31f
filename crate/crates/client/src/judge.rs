use illuscope_core::evalkit::{EvalError, Judge};

use crate::{VisionClient, VisionRequest};

/// Asks a chat model for the verdict with a text-only request.
pub struct LlmJudge {
    client: VisionClient,
}

impl LlmJudge {
    pub fn new(client: VisionClient) -> Self {
        Self { client }
    }
}

impl Judge for LlmJudge {
    fn ask(&self, prompt: &str) -> Result<String, EvalError> {
        self.client
            .send(&VisionRequest::text(prompt))
            .map(|r| r.text)
            .map_err(|e| EvalError::JudgeUnavailable(e.to_string()))
    }
}

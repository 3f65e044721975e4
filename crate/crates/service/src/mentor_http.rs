//! Live mentor over a JSON chat-completion endpoint:
//! `{"messages":[{"role","content"}]}` in, `{"content"}` out.

use std::time::Duration;

use cadenza_core::explainer::{MentorBackend, MentorError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ChatRequest {
    pub messages: Vec<ChatMessage>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ChatResponse {
    pub content: String,
}

impl ChatRequest {
    pub fn new(system_prompt: &str, query: &str) -> Self {
        ChatRequest {
            messages: vec![
                ChatMessage { role: "system".into(), content: system_prompt.into() },
                ChatMessage { role: "user".into(), content: query.into() },
            ],
        }
    }
}

#[derive(Debug, Clone)]
pub struct HttpMentor {
    pub endpoint: String,
    pub api_key: Option<String>,
}

impl MentorBackend for HttpMentor {
    fn ask(&self, system_prompt: &str, query: &str, timeout: Duration) -> Result<String, MentorError> {
        let unavailable = |e: &dyn std::fmt::Display| MentorError::MentorUnavailable(e.to_string());
        let client = reqwest::blocking::Client::builder().timeout(timeout).build().map_err(|e| unavailable(&e))?;
        let mut req = client.post(&self.endpoint).json(&ChatRequest::new(system_prompt, query));
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| unavailable(&e))?;
        if !resp.status().is_success() {
            return Err(MentorError::MentorUnavailable(format!("endpoint answered {}", resp.status())));
        }
        let body: ChatResponse = resp.json().map_err(|e| unavailable(&e))?;
        Ok(body.content)
    }
}

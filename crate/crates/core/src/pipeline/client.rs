//! Model clients: the request shape, a scripted mock and HTTP endpoints.

use std::sync::Mutex;
use std::time::Duration;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::transport::{token_from_env, Transport, TransportError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Part {
    Text { text: String },
    Image { media_type: String, data: Vec<u8> },
}

impl Part {
    pub fn text(t: impl Into<String>) -> Part {
        Part::Text { text: t.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRequest {
    pub system_text: String,
    pub user_parts: Vec<Part>,
    /// Identifies the turn, e.g. `assemble-0` or `debug-2`.
    pub max_turn_tag: String,
}

impl ModelRequest {
    /// Everything textual in the request, used for mock matching.
    pub fn full_text(&self) -> String {
        let mut s = self.system_text.clone();
        for p in &self.user_parts {
            if let Part::Text { text } = p {
                s.push('\n');
                s.push_str(text);
            }
        }
        s
    }

    /// Stable 16-hex digest of the request.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("request serializes");
        Sha256::digest(&bytes).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("malformed model response: {0}")]
    BadResponse(String),
    #[error("scripted mock has no response left for turn '{0}'")]
    ScriptExhausted(String),
}

pub trait ModelClient {
    fn generate(&self, request: &ModelRequest) -> Result<String, ModelError>;
}

pub trait ImageClient {
    /// PNG bytes for `prompt`.
    fn generate_image(&self, prompt: &str) -> Result<Vec<u8>, ModelError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEntry {
    #[serde(default, rename = "match", skip_serializing_if = "Option::is_none")]
    pub match_text: Option<String>,
    pub response: String,
}

/// Canned responses consumed in order. An entry with `match` is only used
/// for requests whose text contains it; the first unused eligible entry wins.
#[derive(Debug)]
pub struct ScriptedMock {
    entries: Vec<ScriptEntry>,
    used: Mutex<Vec<bool>>,
}

impl ScriptedMock {
    pub fn new(entries: Vec<ScriptEntry>) -> ScriptedMock {
        let used = Mutex::new(vec![false; entries.len()]);
        ScriptedMock { entries, used }
    }

    pub fn from_responses<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> ScriptedMock {
        ScriptedMock::new(
            responses
                .into_iter()
                .map(|r| ScriptEntry {
                    match_text: None,
                    response: r.into(),
                })
                .collect(),
        )
    }

    /// Parses the JSON script format: a list of `{match?, response}`.
    pub fn from_json(text: &str) -> Result<ScriptedMock, serde_json::Error> {
        Ok(ScriptedMock::new(serde_json::from_str(text)?))
    }

    pub fn remaining(&self) -> usize {
        self.used.lock().expect("mock lock").iter().filter(|u| !**u).count()
    }

    /// Fresh copy with every entry unused, for replays.
    pub fn replay(&self) -> ScriptedMock {
        ScriptedMock::new(self.entries.clone())
    }
}

impl ModelClient for ScriptedMock {
    fn generate(&self, request: &ModelRequest) -> Result<String, ModelError> {
        let text = request.full_text();
        let mut used = self.used.lock().expect("mock lock");
        let pick = self.entries.iter().enumerate().find(|(k, e)| {
            !used[*k] && e.match_text.as_deref().is_none_or(|m| text.contains(m))
        });
        match pick {
            Some((k, e)) => {
                used[k] = true;
                Ok(e.response.clone())
            }
            None => Err(ModelError::ScriptExhausted(request.max_turn_tag.clone())),
        }
    }
}

/// Image client that always returns the same bytes.
#[derive(Debug, Clone)]
pub struct FixedImage(pub Vec<u8>);

impl ImageClient for FixedImage {
    fn generate_image(&self, _: &str) -> Result<Vec<u8>, ModelError> {
        Ok(self.0.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub url: String,
    pub model: String,
    pub token_env: String,
    pub timeout_secs: u64,
    pub max_tokens: u32,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            url: "http://localhost:8080/v1/chat/completions".into(),
            model: "vision-model".into(),
            token_env: "FIGFORGE_API_TOKEN".into(),
            timeout_secs: 120,
            max_tokens: 4096,
        }
    }
}

/// Chat-completions style endpoint. One attempt per call.
pub struct HttpModelClient<'t> {
    pub config: EndpointConfig,
    pub transport: &'t dyn Transport,
}

impl HttpModelClient<'_> {
    pub fn body(&self, request: &ModelRequest) -> Value {
        let content: Vec<Value> = request
            .user_parts
            .iter()
            .map(|p| match p {
                Part::Text { text } => json!({"type": "text", "text": text}),
                Part::Image { media_type, data } => json!({
                    "type": "image_url",
                    "image_url": {"url": format!("data:{media_type};base64,{}", B64.encode(data))}
                }),
            })
            .collect();
        json!({
            "model": self.config.model,
            "max_tokens": self.config.max_tokens,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": content}
            ]
        })
    }
}

impl ModelClient for HttpModelClient<'_> {
    fn generate(&self, request: &ModelRequest) -> Result<String, ModelError> {
        let token = token_from_env(&self.config.token_env);
        let resp = self.transport.post_json(
            &self.config.url,
            token.as_deref(),
            &self.body(request),
            Duration::from_secs(self.config.timeout_secs),
        )?;
        resp.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ModelError::BadResponse("missing choices[0].message.content".into()))
    }
}

/// Image endpoint answering `{data: [{b64_json}]}`.
pub struct HttpImageClient<'t> {
    pub config: EndpointConfig,
    pub transport: &'t dyn Transport,
}

impl ImageClient for HttpImageClient<'_> {
    fn generate_image(&self, prompt: &str) -> Result<Vec<u8>, ModelError> {
        let token = token_from_env(&self.config.token_env);
        let body = json!({"model": self.config.model, "prompt": prompt, "n": 1, "response_format": "b64_json"});
        let resp = self.transport.post_json(
            &self.config.url,
            token.as_deref(),
            &body,
            Duration::from_secs(self.config.timeout_secs),
        )?;
        let data = resp
            .pointer("/data/0/b64_json")
            .and_then(Value::as_str)
            .ok_or_else(|| ModelError::BadResponse("missing data[0].b64_json".into()))?;
        B64.decode(data).map_err(|e| ModelError::BadResponse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(text: &str) -> ModelRequest {
        ModelRequest {
            system_text: "sys".into(),
            user_parts: vec![Part::text(text)],
            max_turn_tag: "t".into(),
        }
    }

    #[test]
    fn mock_consumes_in_order_and_honours_match() {
        let mock = ScriptedMock::from_json(r#"[{"match": "NEVER", "response": "good"}, {"response": "bad"}, {"response": "later"}]"#).unwrap();
        assert_eq!(mock.generate(&req("plain")).unwrap(), "bad");
        assert_eq!(mock.generate(&req("has NEVER in it")).unwrap(), "good");
        assert_eq!(mock.generate(&req("has NEVER in it")).unwrap(), "later");
        assert!(matches!(mock.generate(&req("x")), Err(ModelError::ScriptExhausted(_))));
        assert_eq!(mock.replay().remaining(), 3);
    }

    #[test]
    fn request_hash_is_stable() {
        assert_eq!(req("a").hash(), req("a").hash());
        assert_ne!(req("a").hash(), req("b").hash());
        assert_eq!(req("a").hash().len(), 16);
    }

    struct Echo;
    impl Transport for Echo {
        fn post_json(&self, _: &str, _: Option<&str>, body: &Value, _: Duration) -> Result<Value, TransportError> {
            if body.get("prompt").is_some() {
                return Ok(json!({"data": [{"b64_json": B64.encode(b"png")}]}));
            }
            let n = body["messages"][1]["content"].as_array().unwrap().len();
            Ok(json!({"choices": [{"message": {"content": format!("{n} parts")}}]}))
        }
    }

    #[test]
    fn http_clients_shape_requests() {
        let c = HttpModelClient {
            config: EndpointConfig::default(),
            transport: &Echo,
        };
        let mut r = req("hello");
        r.user_parts.push(Part::Image {
            media_type: "image/svg+xml".into(),
            data: b"<svg/>".to_vec(),
        });
        assert_eq!(c.generate(&r).unwrap(), "2 parts");
        let url = c.body(&r)["messages"][1]["content"][1]["image_url"]["url"].as_str().unwrap().to_string();
        assert!(url.starts_with("data:image/svg+xml;base64,"));
        let i = HttpImageClient {
            config: EndpointConfig::default(),
            transport: &Echo,
        };
        assert_eq!(i.generate_image("icons").unwrap(), b"png");
    }
}

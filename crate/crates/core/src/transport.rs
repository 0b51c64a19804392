//! JSON-over-HTTP seam shared by the embedding and model clients.

use std::time::Duration;

use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("network access is disabled (offline mode)")]
    Offline,
    #[error("HTTP {status} from {url}: {body}")]
    Status { url: String, status: u16, body: String },
    #[error("request to {url} failed: {message}")]
    Io { url: String, message: String },
    #[error("response from {url} is not JSON: {message}")]
    BadJson { url: String, message: String },
}

pub trait Transport: Send + Sync {
    fn post_json(&self, url: &str, bearer: Option<&str>, body: &Value, timeout: Duration) -> Result<Value, TransportError>;
}

/// Real network access through ureq. One attempt per call.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn post_json(&self, url: &str, bearer: Option<&str>, body: &Value, timeout: Duration) -> Result<Value, TransportError> {
        let agent = ureq::AgentBuilder::new().timeout(timeout).build();
        let mut req = agent.post(url).set("Content-Type", "application/json");
        if let Some(token) = bearer {
            req = req.set("Authorization", &format!("Bearer {token}"));
        }
        match req.send_json(body.clone()) {
            Ok(resp) => resp.into_json::<Value>().map_err(|e| TransportError::BadJson {
                url: url.to_string(),
                message: e.to_string(),
            }),
            Err(ureq::Error::Status(status, resp)) => Err(TransportError::Status {
                url: url.to_string(),
                status,
                body: resp.into_string().unwrap_or_default(),
            }),
            Err(e) => Err(TransportError::Io {
                url: url.to_string(),
                message: e.to_string(),
            }),
        }
    }
}

/// Refuses every request.
#[derive(Debug, Default, Clone, Copy)]
pub struct OfflineTransport;

impl Transport for OfflineTransport {
    fn post_json(&self, _: &str, _: Option<&str>, _: &Value, _: Duration) -> Result<Value, TransportError> {
        Err(TransportError::Offline)
    }
}

/// Reads a bearer token from the named environment variable, if set.
pub fn token_from_env(var: &str) -> Option<String> {
    std::env::var(var).ok().filter(|t| !t.trim().is_empty())
}

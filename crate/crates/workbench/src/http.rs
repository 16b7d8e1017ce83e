//! Live page fetching.

use std::io::Read;
use std::time::Duration;

use mindforge_core::wrapper::{FetchError, Fetcher};

/// Bodies larger than this are cut off.
pub const MAX_BODY_BYTES: u64 = 16 * 1024 * 1024;

/// Blocking HTTP GET fetcher. Non-2xx responses are errors.
pub struct HttpFetcher {
    agent: ureq::Agent,
}

impl HttpFetcher {
    pub fn new(timeout: Duration, user_agent: Option<&str>) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(timeout)
            .user_agent(user_agent.unwrap_or(concat!("mindforge/", env!("CARGO_PKG_VERSION"))))
            .build();
        HttpFetcher { agent }
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &str) -> Result<Vec<u8>, FetchError> {
        let response = self
            .agent
            .get(url)
            .call()
            .map_err(|e| FetchError::new(url, e.to_string()))?;
        let mut body = Vec::new();
        response
            .into_reader()
            .take(MAX_BODY_BYTES)
            .read_to_end(&mut body)
            .map_err(|e| FetchError::new(url, e.to_string()))?;
        Ok(body)
    }
}

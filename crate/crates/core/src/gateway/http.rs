//! HTTP transport for model endpoints: JSON POST with timeout, bounded
//! retries with exponential backoff, and redacted logging (URLs and status
//! codes only — never payloads or credentials).

use std::time::Duration;

use serde_json::{json, Value};

use super::{GatewayError, GenerationRequest};

/// Wire formats supported for the three service kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HttpProfile {
    /// `POST /api/generate` — `{model, prompt, stream:false, options:{...}}`
    /// returning `{response}` (ollama-style).
    OllamaGenerate,
    /// `POST /api/embed` — `{model, input:[..]}` returning `{embeddings:[[..]]}`.
    OllamaEmbed,
    /// `POST /score` — `{model, text_1, text_2:[..]}` returning
    /// `{data:[{score}..]}` (vllm-style cross-encoder scoring).
    VllmScore,
    /// `POST /generate` — `{prompt, temperature, max_tokens, json}` returning `{text}`.
    GenericGenerate,
    /// `POST /embed` — `{texts:[..]}` returning `{vectors:[[..]]}`.
    GenericEmbed,
    /// `POST /score` — `{query, documents:[..]}` returning `{scores:[..]}`.
    GenericScore,
}

/// One configured HTTP endpoint.
pub struct HttpEndpoint {
    agent: ureq::Agent,
    base_url: String,
    pub model: String,
    api_key: Option<String>,
    retry_count: u32,
}

impl HttpEndpoint {
    pub fn new(
        base_url: &str,
        model: &str,
        api_key: Option<String>,
        timeout_ms: u64,
        retry_count: u32,
    ) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(timeout_ms.max(1))))
            .http_status_as_error(false)
            .build();
        Self {
            agent: ureq::Agent::new_with_config(config),
            base_url: base_url.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key,
            retry_count,
        }
    }

    /// POST a JSON body, retrying transport/5xx failures with backoff.
    pub fn post_json(&self, path: &str, body: &Value) -> Result<Value, GatewayError> {
        let url = format!("{}{}", self.base_url, path);
        let mut last_err = None;
        for attempt in 0..=self.retry_count {
            if attempt > 0 {
                let backoff =
                    Duration::from_millis(100u64.saturating_mul(1 << (attempt - 1).min(5)));
                std::thread::sleep(backoff.min(Duration::from_secs(2)));
                log::warn!(
                    "retrying {url} (attempt {}/{})",
                    attempt + 1,
                    self.retry_count + 1
                );
            }
            match self.post_once(&url, body) {
                Ok(v) => return Ok(v),
                Err(e) if e.is_retryable() => {
                    log::warn!("request to {url} failed ({e}); will retry if attempts remain");
                    last_err = Some(e);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or(GatewayError::Transport {
            endpoint: url,
            detail: "exhausted retries".into(),
        }))
    }

    fn post_once(&self, url: &str, body: &Value) -> Result<Value, GatewayError> {
        let mut req = self.agent.post(url);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(body).map_err(|e| GatewayError::Transport {
            endpoint: url.to_string(),
            detail: e.to_string(),
        })?;
        let status = resp.status().as_u16();
        if (200..300).contains(&status) {
            resp.body_mut()
                .read_json::<Value>()
                .map_err(|e| GatewayError::InvalidResponse {
                    endpoint: url.to_string(),
                    detail: format!("body is not json: {e}"),
                })
        } else if (500..600).contains(&status) {
            Err(GatewayError::Server {
                endpoint: url.to_string(),
                status,
                detail: "server error".into(),
            })
        } else {
            Err(GatewayError::Fatal {
                endpoint: url.to_string(),
                detail: format!("status {status}"),
            })
        }
    }
}

/// Build the request body for a generation call under a profile.
pub(crate) fn generation_body(profile: HttpProfile, model: &str, req: &GenerationRequest) -> Value {
    match profile {
        HttpProfile::OllamaGenerate => {
            let mut body = json!({
                "model": model,
                "prompt": req.prompt,
                "stream": false,
                "options": {"temperature": req.temperature, "num_predict": req.max_tokens},
            });
            if req.structured_json {
                body["format"] = json!("json");
            }
            body
        }
        _ => json!({
            "prompt": req.prompt,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
            "json": req.structured_json,
        }),
    }
}

/// Extract the generated text from a response under a profile.
pub(crate) fn generation_text(
    profile: HttpProfile,
    endpoint: &str,
    resp: &Value,
) -> Result<String, GatewayError> {
    let field = match profile {
        HttpProfile::OllamaGenerate => "response",
        _ => "text",
    };
    resp.get(field)
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| GatewayError::InvalidResponse {
            endpoint: endpoint.to_string(),
            detail: format!("missing string field `{field}`"),
        })
}

pub(crate) fn parse_vectors(
    endpoint: &str,
    resp: &Value,
    field: &str,
    expected: usize,
) -> Result<Vec<Vec<f32>>, GatewayError> {
    let invalid = |detail: String| GatewayError::InvalidResponse {
        endpoint: endpoint.to_string(),
        detail,
    };
    let rows = resp
        .get(field)
        .and_then(Value::as_array)
        .ok_or_else(|| invalid(format!("missing array field `{field}`")))?;
    if rows.len() != expected {
        return Err(invalid(format!(
            "expected {expected} vectors, got {}",
            rows.len()
        )));
    }
    let mut out = Vec::with_capacity(rows.len());
    let mut dim = None;
    for row in rows {
        let v: Vec<f32> = row
            .as_array()
            .ok_or_else(|| invalid("vector row is not an array".into()))?
            .iter()
            .map(|x| x.as_f64().map(|f| f as f32))
            .collect::<Option<_>>()
            .ok_or_else(|| invalid("vector element is not a number".into()))?;
        if *dim.get_or_insert(v.len()) != v.len() {
            return Err(invalid("vectors have inconsistent dimensions".into()));
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    /// Tiny one-shot HTTP server: answers each connection with the next
    /// scripted (status, body) pair and counts requests.
    fn spawn_server(responses: Vec<(u16, String)>) -> (String, Arc<AtomicUsize>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let hits = Arc::new(AtomicUsize::new(0));
        let hits2 = hits.clone();
        std::thread::spawn(move || {
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut buf = [0u8; 8192];
                let mut read = 0;
                // read until the end of a small request (headers + json body)
                loop {
                    match stream.read(&mut buf[read..]) {
                        Ok(0) => break,
                        Ok(n) => {
                            read += n;
                            let text = String::from_utf8_lossy(&buf[..read]);
                            if let Some(pos) = text.find("\r\n\r\n") {
                                let content_len = text
                                    .lines()
                                    .find(|l| l.to_lowercase().starts_with("content-length:"))
                                    .and_then(|l| l.split(':').nth(1))
                                    .and_then(|v| v.trim().parse::<usize>().ok())
                                    .unwrap_or(0);
                                if read >= pos + 4 + content_len {
                                    break;
                                }
                            }
                        }
                        Err(_) => break,
                    }
                }
                hits2.fetch_add(1, Ordering::SeqCst);
                let reply = format!(
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                let _ = stream.write_all(reply.as_bytes());
            }
        });
        (format!("http://{addr}"), hits)
    }

    #[test]
    fn retries_server_errors_then_succeeds() {
        let (url, hits) = spawn_server(vec![
            (500, "{}".into()),
            (200, r#"{"response":"ok"}"#.into()),
        ]);
        let ep = HttpEndpoint::new(&url, "m", None, 2000, 2);
        let v = ep.post_json("/api/generate", &json!({"x": 1})).unwrap();
        assert_eq!(v["response"], "ok");
        assert_eq!(hits.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn client_errors_are_fatal_and_not_retried() {
        let (url, hits) = spawn_server(vec![(404, "{}".into())]);
        let ep = HttpEndpoint::new(&url, "m", None, 2000, 3);
        let err = ep.post_json("/x", &json!({})).unwrap_err();
        assert!(matches!(err, GatewayError::Fatal { .. }), "{err}");
        assert_eq!(hits.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn transport_error_when_nothing_listens() {
        let ep = HttpEndpoint::new("http://127.0.0.1:1", "m", None, 300, 0);
        let err = ep.post_json("/x", &json!({})).unwrap_err();
        assert!(matches!(err, GatewayError::Transport { .. }), "{err}");
    }

    #[test]
    fn vector_parsing_validates_shape() {
        let resp = json!({"vectors": [[1.0, 2.0], [3.0, 4.0]]});
        let v = parse_vectors("e", &resp, "vectors", 2).unwrap();
        assert_eq!(v, vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(parse_vectors("e", &resp, "vectors", 3).is_err());
        let ragged = json!({"vectors": [[1.0], [1.0, 2.0]]});
        assert!(parse_vectors("e", &ragged, "vectors", 2).is_err());
    }
}

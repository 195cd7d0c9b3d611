//! Local chat-completions server answering from a fixture file.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::genai::FINGERPRINT_HEADER;
use crate::ui_model::TokenUsage;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockRule {
    /// Regex searched in the concatenated message text.
    #[serde(default)]
    pub pattern: Option<String>,
    /// Exact prompt fingerprint, compared with the request header.
    #[serde(default)]
    pub fingerprint: Option<String>,
    #[serde(default)]
    pub reply: String,
    #[serde(default)]
    pub usage: Option<TokenUsage>,
    /// Answer with this HTTP status instead of a reply.
    #[serde(default)]
    pub status: Option<u16>,
    /// Fail this many matching requests with 503 before answering.
    #[serde(default)]
    pub fail_first: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockFixture {
    #[serde(default)]
    pub rules: Vec<MockRule>,
    /// Reply for unmatched requests; `None` answers 404.
    #[serde(default)]
    pub default_reply: Option<String>,
    /// Usage reported when a rule has none; otherwise estimated from lengths.
    #[serde(default)]
    pub usage: Option<TokenUsage>,
}

impl MockFixture {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoggedRequest {
    pub fingerprint: Option<String>,
    pub text: String,
    pub images: usize,
    pub rule: Option<usize>,
    pub status: u16,
}

struct Compiled {
    rules: Vec<(MockRule, Option<Regex>)>,
    default_reply: Option<String>,
    usage: Option<TokenUsage>,
    failures_left: Mutex<HashMap<usize, u32>>,
}

pub struct MockServer {
    addr: SocketAddr,
    server: Arc<tiny_http::Server>,
    log: Arc<Mutex<Vec<LoggedRequest>>>,
    worker: Option<JoinHandle<()>>,
}

fn message_text(body: &Value) -> (String, usize) {
    let mut text = String::new();
    let mut images = 0;
    for m in body.get("messages").and_then(Value::as_array).into_iter().flatten() {
        match m.get("content") {
            Some(Value::String(s)) => text.push_str(s),
            Some(Value::Array(parts)) => {
                for p in parts {
                    match p.get("type").and_then(Value::as_str) {
                        Some("text") => text.push_str(p.get("text").and_then(Value::as_str).unwrap_or_default()),
                        Some("image_url") => images += 1,
                        _ => {}
                    }
                }
            }
            _ => {}
        }
        text.push('\n');
    }
    (text, images)
}

fn estimate(text: &str, reply: &str) -> TokenUsage {
    TokenUsage {
        prompt_tokens: (text.chars().count() as u64).div_ceil(4),
        completion_tokens: reply.split_whitespace().count() as u64,
    }
}

impl Compiled {
    fn answer(&self, fingerprint: Option<&str>, text: &str) -> (u16, Option<usize>, Value) {
        let hit = self.rules.iter().enumerate().find(|(_, (rule, re))| {
            let fp_ok = rule.fingerprint.as_deref().is_none_or(|f| Some(f) == fingerprint);
            let re_ok = re.as_ref().is_none_or(|r| r.is_match(text));
            fp_ok && re_ok
        });
        let (reply, usage, idx) = match hit {
            Some((i, (rule, _))) => {
                if let Some(status) = rule.status {
                    return (status, Some(i), json!({ "error": { "message": "scripted failure" } }));
                }
                let mut left = self.failures_left.lock().unwrap_or_else(|e| e.into_inner());
                let n = left.entry(i).or_insert(rule.fail_first);
                if *n > 0 {
                    *n -= 1;
                    return (503, Some(i), json!({ "error": { "message": "scripted outage" } }));
                }
                (rule.reply.clone(), rule.usage.or(self.usage), Some(i))
            }
            None => match &self.default_reply {
                Some(r) => (r.clone(), self.usage, None),
                None => return (404, None, json!({ "error": { "message": "no fixture matches" } })),
            },
        };
        let usage = usage.unwrap_or_else(|| estimate(text, &reply));
        let body = json!({
            "object": "chat.completion",
            "choices": [{ "index": 0, "message": { "role": "assistant", "content": reply }, "finish_reason": "stop" }],
            "usage": {
                "prompt_tokens": usage.prompt_tokens,
                "completion_tokens": usage.completion_tokens,
                "total_tokens": usage.prompt_tokens + usage.completion_tokens
            }
        });
        (200, idx, body)
    }
}

impl MockServer {
    /// Bind `addr` (use port 0 for an ephemeral port) and serve until dropped.
    pub fn start(fixture: MockFixture, addr: &str) -> Result<Self, String> {
        let mut rules = Vec::new();
        for (i, rule) in fixture.rules.into_iter().enumerate() {
            let re = match &rule.pattern {
                Some(p) => Some(Regex::new(p).map_err(|e| format!("rule {i}: {e}"))?),
                None => None,
            };
            rules.push((rule, re));
        }
        let compiled = Arc::new(Compiled {
            rules,
            default_reply: fixture.default_reply,
            usage: fixture.usage,
            failures_left: Mutex::new(HashMap::new()),
        });
        let server = Arc::new(tiny_http::Server::http(addr).map_err(|e| format!("bind {addr}: {e}"))?);
        let bound = server
            .server_addr()
            .to_ip()
            .ok_or_else(|| "mock server is not bound to an IP address".to_owned())?;
        let log = Arc::new(Mutex::new(Vec::new()));
        let worker = {
            let (server, log) = (server.clone(), log.clone());
            std::thread::spawn(move || {
                for mut req in server.incoming_requests() {
                    let mut raw = String::new();
                    let _ = req.as_reader().read_to_string(&mut raw);
                    let fingerprint = req
                        .headers()
                        .iter()
                        .find(|h| h.field.equiv(FINGERPRINT_HEADER))
                        .map(|h| h.value.as_str().to_owned());
                    let (status, rule, body, text, images) = match serde_json::from_str::<Value>(&raw) {
                        Ok(v) => {
                            let (text, images) = message_text(&v);
                            let (status, rule, body) = compiled.answer(fingerprint.as_deref(), &text);
                            (status, rule, body, text, images)
                        }
                        Err(e) => (400, None, json!({ "error": { "message": e.to_string() } }), String::new(), 0),
                    };
                    log.lock().unwrap_or_else(|e| e.into_inner()).push(LoggedRequest {
                        fingerprint,
                        text,
                        images,
                        rule,
                        status,
                    });
                    let header = tiny_http::Header::from_bytes("content-type", "application/json").expect("static header");
                    let resp = tiny_http::Response::from_string(body.to_string()).with_status_code(status).with_header(header);
                    let _ = req.respond(resp);
                }
            })
        };
        Ok(Self {
            addr: bound,
            server,
            log,
            worker: Some(worker),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn endpoint(&self) -> String {
        format!("http://{}/v1/chat/completions", self.addr)
    }

    pub fn requests(&self) -> Vec<LoggedRequest> {
        self.log.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Requests that were answered with a reply.
    pub fn answered(&self) -> usize {
        self.requests().iter().filter(|r| r.status == 200).count()
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}

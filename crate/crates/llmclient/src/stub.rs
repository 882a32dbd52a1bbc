//! Minimal scripted HTTP server for exercising the remote corrector without
//! a network. Each incoming request consumes the next scripted response; the
//! last entry repeats once the script runs out.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

/// One scripted response.
#[derive(Debug, Clone)]
pub struct StubResponse {
    pub status: u16,
    pub body: String,
    /// Artificial delay before answering, for timeout tests.
    pub delay: Duration,
}

impl StubResponse {
    pub fn ok(body: impl Into<String>) -> StubResponse {
        StubResponse { status: 200, body: body.into(), delay: Duration::ZERO }
    }

    pub fn status(status: u16) -> StubResponse {
        StubResponse { status, body: String::new(), delay: Duration::ZERO }
    }

    pub fn delayed(delay: Duration, body: impl Into<String>) -> StubResponse {
        StubResponse { status: 200, body: body.into(), delay }
    }
}

/// Builds a chat-completion body whose assistant message is `content`.
pub fn chat_body(content: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": content}}]
    })
    .to_string()
}

pub struct StubServer {
    addr: SocketAddr,
    hits: Arc<AtomicUsize>,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    /// Starts the server on an ephemeral local port.
    pub fn start(script: Vec<StubResponse>) -> StubServer {
        assert!(!script.is_empty(), "stub script must hold at least one response");
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub server");
        let addr = listener.local_addr().unwrap();
        let hits = Arc::new(AtomicUsize::new(0));
        let stop = Arc::new(AtomicBool::new(false));
        let script = Arc::new(Mutex::new(script));

        let handle = {
            let hits = Arc::clone(&hits);
            let stop = Arc::clone(&stop);
            std::thread::spawn(move || {
                for stream in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    let n = hits.fetch_add(1, Ordering::SeqCst);
                    let response = {
                        let script = script.lock().unwrap();
                        script[n.min(script.len() - 1)].clone()
                    };
                    handle_connection(stream, &response);
                }
            })
        };

        StubServer { addr, hits, stop, handle: Some(handle) }
    }

    /// URL of the chat-completions endpoint this stub answers on.
    pub fn endpoint(&self) -> String {
        format!("http://{}/v1/chat/completions", self.addr)
    }

    /// Requests served so far.
    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // Unblock the accept loop.
        let _ = TcpStream::connect(self.addr);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn handle_connection(stream: TcpStream, response: &StubResponse) {
    let _ = stream.set_read_timeout(Some(Duration::from_secs(5)));
    let mut reader = BufReader::new(stream);

    // Read the request head and drain the body so the client can finish
    // writing before we answer.
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 {
            return;
        }
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            break;
        }
        if let Some(value) = trimmed
            .to_ascii_lowercase()
            .strip_prefix("content-length:")
            .map(str::trim)
            .and_then(|v| v.parse::<usize>().ok())
        {
            content_length = value;
        }
    }
    let mut body = vec![0u8; content_length];
    let _ = reader.read_exact(&mut body);

    if !response.delay.is_zero() {
        std::thread::sleep(response.delay);
    }

    let reason = match response.status {
        200 => "OK",
        429 => "Too Many Requests",
        500 => "Internal Server Error",
        503 => "Service Unavailable",
        _ => "Status",
    };
    let head = format!(
        "HTTP/1.1 {} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        response.status,
        reason,
        response.body.len(),
    );
    let mut stream = reader.into_inner();
    let _ = stream.write_all(head.as_bytes());
    let _ = stream.write_all(response.body.as_bytes());
    let _ = stream.flush();
}

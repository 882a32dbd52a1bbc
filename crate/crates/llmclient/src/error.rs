use std::fmt;

/// Failure modes of the remote corrector, surfaced distinctly so callers can
/// tell a slow endpoint from a broken one.
#[derive(Debug)]
pub enum RemoteError {
    /// The request did not complete within the configured timeout.
    Timeout,
    /// Non-success HTTP status after retries were exhausted.
    Http { status: u16 },
    /// The response body did not carry a chat completion.
    Malformed(String),
    /// Connection-level failure (DNS, refused, reset).
    Transport(String),
    /// Cache directory I/O failure.
    Io(std::io::Error),
}

impl fmt::Display for RemoteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RemoteError::Timeout => write!(f, "request timed out"),
            RemoteError::Http { status } => write!(f, "HTTP status {status}"),
            RemoteError::Malformed(why) => write!(f, "malformed response: {why}"),
            RemoteError::Transport(why) => write!(f, "transport error: {why}"),
            RemoteError::Io(e) => write!(f, "cache I/O error: {e}"),
        }
    }
}

impl std::error::Error for RemoteError {}

impl From<std::io::Error> for RemoteError {
    fn from(e: std::io::Error) -> Self {
        RemoteError::Io(e)
    }
}

impl RemoteError {
    /// Transient failures are worth retrying; protocol-level ones are not.
    pub fn is_retryable(&self) -> bool {
        match self {
            RemoteError::Timeout | RemoteError::Transport(_) => true,
            RemoteError::Http { status } => *status >= 500 || *status == 429,
            RemoteError::Malformed(_) | RemoteError::Io(_) => false,
        }
    }
}

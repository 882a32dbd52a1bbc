//! Remote text corrector speaking the OpenAI-compatible chat-completion
//! protocol, with prompt templating, an on-disk response cache, bounded
//! concurrency, and retry on transient failures.
//!
//! Replaying a run from a warm cache never touches the network, so seeded
//! experiments stay reproducible and offline.

mod cache;
mod client;
mod error;
mod prompt;
pub mod stub;

pub use cache::{cache_key, cache_path};
pub use client::{extract_candidate, RemoteClient, RemoteConfig, RemoteCorrector, RemoteReply, RetryStats};
pub use error::RemoteError;
pub use prompt::PromptTemplate;

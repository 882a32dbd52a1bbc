//! Remote corrector behavior against a local scripted server. No test here
//! touches a real network endpoint.

use std::sync::Arc;
use std::time::Duration;

use sempilot_core::semantic::Corrector;
use sempilot_core::textcodec::Alphabet;

use sempilot_llmclient::stub::{chat_body, StubResponse, StubServer};
use sempilot_llmclient::{PromptTemplate, RemoteClient, RemoteConfig, RemoteCorrector, RemoteError};

fn test_config(endpoint: String, cache_dir: &std::path::Path) -> RemoteConfig {
    RemoteConfig {
        endpoint,
        model: "test-model".to_string(),
        api_key_env: "SEMPILOT_TEST_NO_KEY".to_string(),
        timeout_secs: 5.0,
        max_retries: 3,
        retry_backoff_ms: 1,
        cache_dir: cache_dir.to_path_buf(),
        max_in_flight: 4,
    }
}

#[test]
fn success_path_extracts_and_caches() {
    let dir = tempfile::tempdir().unwrap();
    let server = StubServer::start(vec![StubResponse::ok(chat_body("hello world"))]);
    let client =
        RemoteClient::new(test_config(server.endpoint(), dir.path()), PromptTemplate::default())
            .unwrap();

    let reply = client.correct_text("hellx world").unwrap();
    assert_eq!(reply.content, "hello world");
    assert!(!reply.cache_hit);
    assert_eq!(reply.stats.retries, 0);
    assert_eq!(server.hits(), 1);

    // Same input again: served from cache, no extra request.
    let reply2 = client.correct_text("hellx world").unwrap();
    assert!(reply2.cache_hit);
    assert_eq!(reply2.content, "hello world");
    assert_eq!(server.hits(), 1);
}

#[test]
fn cache_replay_is_offline_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = {
        let server = StubServer::start(vec![StubResponse::ok(chat_body("warm cache line"))]);
        let client = RemoteClient::new(
            test_config(server.endpoint(), dir.path()),
            PromptTemplate::default(),
        )
        .unwrap();
        client.correct_text("warm cachX line").unwrap()
        // Server drops here: nothing is listening anymore.
    };

    // A fresh client pointed at a dead endpoint still answers from cache.
    let offline = RemoteClient::new(
        test_config("http://127.0.0.1:9/v1/chat/completions".to_string(), dir.path()),
        PromptTemplate::default(),
    )
    .unwrap();
    let replay = offline.correct_text("warm cachX line").unwrap();
    assert!(replay.cache_hit);
    assert_eq!(replay.content, first.content);
    assert_eq!(offline.requests_sent(), 0);
}

#[test]
fn two_500s_then_success_retries_twice() {
    let dir = tempfile::tempdir().unwrap();
    let server = StubServer::start(vec![
        StubResponse::status(500),
        StubResponse::status(500),
        StubResponse::ok(chat_body("recovered")),
    ]);
    let client =
        RemoteClient::new(test_config(server.endpoint(), dir.path()), PromptTemplate::default())
            .unwrap();

    let reply = client.correct_text("abc").unwrap();
    assert_eq!(reply.content, "recovered");
    assert_eq!(reply.stats.retries, 2);
    assert_eq!(reply.stats.attempts, 3);
    assert_eq!(server.hits(), 3);
}

#[test]
fn exhausted_retries_surface_the_http_status() {
    let dir = tempfile::tempdir().unwrap();
    let server = StubServer::start(vec![StubResponse::status(503)]);
    let mut config = test_config(server.endpoint(), dir.path());
    config.max_retries = 2;
    let client = RemoteClient::new(config, PromptTemplate::default()).unwrap();

    match client.correct_text("abc") {
        Err(RemoteError::Http { status: 503 }) => {}
        other => panic!("unexpected: {other:?}"),
    }
    assert_eq!(server.hits(), 3); // 1 try + 2 retries
}

#[test]
fn client_errors_are_not_retried() {
    let dir = tempfile::tempdir().unwrap();
    let server = StubServer::start(vec![StubResponse::status(404)]);
    let client =
        RemoteClient::new(test_config(server.endpoint(), dir.path()), PromptTemplate::default())
            .unwrap();
    match client.correct_text("abc") {
        Err(RemoteError::Http { status: 404 }) => {}
        other => panic!("unexpected: {other:?}"),
    }
    assert_eq!(server.hits(), 1);
}

#[test]
fn malformed_bodies_are_not_retried() {
    let dir = tempfile::tempdir().unwrap();
    let server = StubServer::start(vec![StubResponse::ok("this is not json")]);
    let client =
        RemoteClient::new(test_config(server.endpoint(), dir.path()), PromptTemplate::default())
            .unwrap();
    match client.correct_text("abc") {
        Err(RemoteError::Malformed(_)) => {}
        other => panic!("unexpected: {other:?}"),
    }
    assert_eq!(server.hits(), 1);
}

#[test]
fn slow_endpoint_reports_timeout() {
    let dir = tempfile::tempdir().unwrap();
    let server = StubServer::start(vec![StubResponse::delayed(
        Duration::from_millis(1500),
        chat_body("too late"),
    )]);
    let mut config = test_config(server.endpoint(), dir.path());
    config.timeout_secs = 0.2;
    config.max_retries = 0;
    let client = RemoteClient::new(config, PromptTemplate::default()).unwrap();
    match client.correct_text("abc") {
        Err(RemoteError::Timeout) => {}
        other => panic!("unexpected: {other:?}"),
    }
}

#[test]
fn corrector_normalizes_length_violations() {
    let dir = tempfile::tempdir().unwrap();
    // The model answers with chatter plus a too-short line.
    let server = StubServer::start(vec![StubResponse::ok(chat_body(
        "Sure! Here is the corrected text:\nshort answer",
    ))]);
    let client =
        RemoteClient::new(test_config(server.endpoint(), dir.path()), PromptTemplate::default())
            .unwrap();
    let mut corrector = RemoteCorrector::new(client, Alphabet::standard().clone());

    let decoded = Alphabet::standard().text("short answer padded").unwrap();
    let result = corrector.correct(&decoded).unwrap();
    assert_eq!(result.corrected.len(), decoded.len());
    assert_eq!(result.corrected.to_string(), "short answerXXXXXXX");
    assert!(result.length_repaired);
}

#[test]
fn corrector_passes_clean_answers_through() {
    let dir = tempfile::tempdir().unwrap();
    let server = StubServer::start(vec![StubResponse::ok(chat_body("exact length reply"))]);
    let client =
        RemoteClient::new(test_config(server.endpoint(), dir.path()), PromptTemplate::default())
            .unwrap();
    let mut corrector = RemoteCorrector::new(client, Alphabet::standard().clone());

    let decoded = Alphabet::standard().text("exact lengXh reply").unwrap();
    let result = corrector.correct(&decoded).unwrap();
    assert_eq!(result.corrected.to_string(), "exact length reply");
    assert!(!result.length_repaired);
}

#[test]
fn concurrent_requests_respect_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let server = StubServer::start(vec![StubResponse::ok(chat_body("parallel ok"))]);
    let client = Arc::new(
        RemoteClient::new(test_config(server.endpoint(), dir.path()), PromptTemplate::default())
            .unwrap(),
    );

    let handles: Vec<_> = (0..8)
        .map(|i| {
            let client = Arc::clone(&client);
            std::thread::spawn(move || client.correct_text(&format!("text {i}")).unwrap())
        })
        .collect();
    for handle in handles {
        let reply = handle.join().unwrap();
        assert_eq!(reply.content, "parallel ok");
    }
    assert_eq!(server.hits(), 8);
}

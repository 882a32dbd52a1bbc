//! On-disk cache of raw chat-completion response bodies, keyed by model,
//! prompt template, and input text.

use std::path::{Path, PathBuf};
use std::process;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::prompt::PromptTemplate;
use crate::RemoteError;

/// Cache key: SHA-256 over length-prefixed (model, system, user, text) so no
/// concatenation ambiguity exists between fields.
pub fn cache_key(model: &str, template: &PromptTemplate, text: &str) -> String {
    let mut hasher = Sha256::new();
    for part in [model, &template.system, &template.user, text] {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

pub fn load(dir: &Path, key: &str) -> Option<String> {
    std::fs::read_to_string(cache_path(dir, key)).ok()
}

/// Write-temp-then-rename so concurrent writers never expose a torn file.
pub fn store(dir: &Path, key: &str, body: &str) -> Result<(), RemoteError> {
    std::fs::create_dir_all(dir)?;
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default().as_nanos();
    let tmp = dir.join(format!(".{key}.{}.{nanos}.tmp", process::id()));
    std::fs::write(&tmp, body)?;
    std::fs::rename(&tmp, cache_path(dir, key))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_depends_on_every_field() {
        let t = PromptTemplate::default();
        let base = cache_key("m", &t, "text");
        assert_ne!(base, cache_key("other", &t, "text"));
        assert_ne!(base, cache_key("m", &t, "other"));
        let mut t2 = t.clone();
        t2.user.push('!');
        assert_ne!(base, cache_key("m", &t2, "text"));
        // Stable across calls.
        assert_eq!(base, cache_key("m", &t, "text"));
    }

    #[test]
    fn store_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let key = "abc123";
        assert!(load(dir.path(), key).is_none());
        store(dir.path(), key, "{\"x\":1}").unwrap();
        assert_eq!(load(dir.path(), key).unwrap(), "{\"x\":1}");
        // No temp files left behind.
        let leftovers: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp"))
            .collect();
        assert!(leftovers.is_empty());
    }
}

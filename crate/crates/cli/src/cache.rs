//! On-disk result cache keyed by command, parameters and version.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Fraction of cache hits recomputed and compared.
pub const DEFAULT_AUDIT_RATE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub command: String,
    pub version: String,
    pub value: String,
}

/// `sha256(version, command)` in hex. `command` must already include every
/// parameter that affects the output.
pub fn cache_key(command: &str, version: &str) -> String {
    let mut h = Sha256::new();
    h.update(version.as_bytes());
    h.update([0u8]);
    h.update(command.as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
    audit_rate: f64,
}

/// What happened on a lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheEvent {
    Miss,
    Hit,
    AuditPassed,
    /// The stored value differed from a fresh computation and was replaced.
    AuditFailed,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>, audit_rate: f64) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            audit_rate: audit_rate.clamp(0.0, 1.0),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Option<CacheEntry> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str::<CacheEntry>(&text)
            .ok()
            .filter(|e| e.key == key)
    }

    pub fn store(&self, entry: &CacheEntry) -> std::io::Result<()> {
        let text = serde_json::to_string(entry).expect("entries serialize");
        let tmp = self.dir.join(format!("{}.tmp", entry.key));
        fs::write(&tmp, text)?;
        fs::rename(tmp, self.path(&entry.key))
    }

    /// Returns the cached value for `command`, computing and storing it on a
    /// miss. A random share of hits is recomputed and compared.
    pub fn get_or_compute<E>(
        &self,
        command: &str,
        version: &str,
        compute: impl FnOnce() -> Result<String, E>,
    ) -> Result<(String, CacheEvent), E> {
        let key = cache_key(command, version);
        let fresh_entry = |value: String| CacheEntry {
            key: key.clone(),
            command: command.to_string(),
            version: version.to_string(),
            value,
        };
        match self.load(&key) {
            None => {
                let value = compute()?;
                // a failed write only costs a recomputation later
                let _ = self.store(&fresh_entry(value.clone()));
                Ok((value, CacheEvent::Miss))
            }
            Some(hit) => {
                if !rand::rng().random_bool(self.audit_rate) {
                    return Ok((hit.value, CacheEvent::Hit));
                }
                let value = compute()?;
                if value == hit.value {
                    Ok((value, CacheEvent::AuditPassed))
                } else {
                    let _ = self.store(&fresh_entry(value.clone()));
                    Ok((value, CacheEvent::AuditFailed))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miss_then_hit() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path(), 0.0).unwrap();
        let (v, e) = cache
            .get_or_compute::<()>("a", "1", || Ok("x".into()))
            .unwrap();
        assert_eq!((v.as_str(), e), ("x", CacheEvent::Miss));
        let (v, e) = cache
            .get_or_compute::<()>("a", "1", || Ok("y".into()))
            .unwrap();
        assert_eq!((v.as_str(), e), ("x", CacheEvent::Hit));
        assert_ne!(cache_key("a", "1"), cache_key("a", "2"));
    }

    #[test]
    fn audit_repairs_a_stale_entry() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path(), 1.0).unwrap();
        cache
            .get_or_compute::<()>("a", "1", || Ok("x".into()))
            .unwrap();
        let (_, e) = cache
            .get_or_compute::<()>("a", "1", || Ok("x".into()))
            .unwrap();
        assert_eq!(e, CacheEvent::AuditPassed);
        let (v, e) = cache
            .get_or_compute::<()>("a", "1", || Ok("z".into()))
            .unwrap();
        assert_eq!((v.as_str(), e), ("z", CacheEvent::AuditFailed));
        assert_eq!(cache.load(&cache_key("a", "1")).unwrap().value, "z");
    }
}

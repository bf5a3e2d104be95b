//! Content-addressed result cache.
//!
//! Every expensive operation stores one JSON record per distinct input
//! under `<dir>/<hash>.json`, where the hash covers the operation name,
//! the schema version, the code version, and every physics-relevant
//! input including tolerances. Floats are hashed by their exact bit
//! pattern, so a cache key never depends on decimal formatting.
//!
//! Records that fail to parse or whose identity fields disagree with the
//! requested key are ignored with a warning and recomputed; the rewrite
//! then repairs the file. A record stores a timestamp for bookkeeping,
//! but emitted CSV/JSON never includes it, keeping reruns byte-identical.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Version stamp for every JSON document and cache record this binary emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Code version folded into every cache key.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Identity of one cacheable computation: operation name plus named inputs.
#[derive(Debug, Clone)]
pub struct CacheKey {
    op: &'static str,
    parts: Vec<(String, String)>,
}

impl CacheKey {
    /// Starts a key for the named operation.
    pub fn new(op: &'static str) -> Self {
        CacheKey {
            op,
            parts: vec![
                ("schema_version".into(), SCHEMA_VERSION.to_string()),
                ("code_version".into(), CODE_VERSION.into()),
            ],
        }
    }

    /// Adds a float input by its exact bit pattern.
    pub fn f64(mut self, name: &str, v: f64) -> Self {
        self.parts.push((name.into(), format!("{:016x}", v.to_bits())));
        self
    }

    /// Adds an integer input.
    pub fn int(mut self, name: &str, v: u64) -> Self {
        self.parts.push((name.into(), v.to_string()));
        self
    }

    /// Adds a boolean input.
    pub fn flag(mut self, name: &str, v: bool) -> Self {
        self.parts.push((name.into(), v.to_string()));
        self
    }

    /// Hex digest over the canonical serialization of the key.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.op.as_bytes());
        for (name, value) in &self.parts {
            hasher.update([0u8]);
            hasher.update(name.as_bytes());
            hasher.update([1u8]);
            hasher.update(value.as_bytes());
        }
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}

/// One stored computation result.
#[derive(Debug, Serialize, Deserialize)]
struct ResultRecord {
    schema_version: u32,
    op: String,
    input_hash: String,
    code_version: String,
    /// Seconds since the Unix epoch at store time; never emitted in output.
    timestamp: u64,
    payload: serde_json::Value,
}

/// Cache handle; `dir = None` disables both lookup and store.
#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    /// Creates the handle. The directory is created lazily on first store.
    pub fn new(dir: PathBuf, enabled: bool) -> Self {
        Cache {
            dir: enabled.then_some(dir),
        }
    }

    fn record_path(&self, key: &CacheKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", key.hash())))
    }

    /// Returns the stored payload for `key`, or None on miss, disabled
    /// cache, or a corrupt record (warned on stderr, then recomputed).
    pub fn lookup(&self, key: &CacheKey) -> Option<serde_json::Value> {
        let path = self.record_path(key)?;
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                eprintln!("warning: unreadable cache record {}: {e}", path.display());
                return None;
            }
        };
        let record: ResultRecord = match serde_json::from_str(&text) {
            Ok(r) => r,
            Err(e) => {
                eprintln!(
                    "warning: ignoring corrupt cache record {}: {e}",
                    path.display()
                );
                return None;
            }
        };
        let fresh = record.schema_version == SCHEMA_VERSION
            && record.op == key.op
            && record.input_hash == key.hash()
            && record.code_version == CODE_VERSION;
        if !fresh {
            eprintln!(
                "warning: ignoring stale cache record {} (op/version mismatch)",
                path.display()
            );
            return None;
        }
        Some(record.payload)
    }

    /// Stores `payload` under `key`. Failures only warn: the cache is an
    /// accelerator, never a correctness dependency.
    pub fn store(&self, key: &CacheKey, payload: serde_json::Value) {
        let Some(path) = self.record_path(key) else {
            return;
        };
        let record = ResultRecord {
            schema_version: SCHEMA_VERSION,
            op: key.op.to_string(),
            input_hash: key.hash(),
            code_version: CODE_VERSION.into(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            payload,
        };
        if let Err(e) = self.write_atomic(&path, &record) {
            eprintln!("warning: could not store cache record {}: {e}", path.display());
        }
    }

    /// Write-to-temp-then-rename so concurrent sweep workers never expose a
    /// half-written record.
    fn write_atomic(&self, path: &Path, record: &ResultRecord) -> std::io::Result<()> {
        let dir = path.parent().expect("record path has a parent");
        fs::create_dir_all(dir)?;
        let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
        fs::write(&tmp, serde_json::to_string(record)?)?;
        fs::rename(&tmp, path)
    }

    /// Runs `compute` behind the cache: hit returns the stored payload,
    /// miss computes, stores, and returns the fresh value. Type round-trip
    /// through JSON is lossless for every payload used here (floats are
    /// emitted with shortest-roundtrip formatting).
    pub fn remember<T, F>(&self, key: &CacheKey, compute: F) -> crate::CliResult<T>
    where
        T: Serialize + serde::de::DeserializeOwned,
        F: FnOnce() -> crate::CliResult<T>,
    {
        if let Some(payload) = self.lookup(key) {
            match serde_json::from_value(payload) {
                Ok(v) => return Ok(v),
                Err(e) => eprintln!("warning: cache payload shape mismatch, recomputing: {e}"),
            }
        }
        let value = compute()?;
        let payload = serde_json::to_value(&value)
            .expect("payloads are plain data and always serialize");
        self.store(key, payload);
        Ok(value)
    }
}

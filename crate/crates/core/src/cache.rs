//! Text-record cache keyed by a canonical parameter string.
//!
//! Each key maps to one file holding the key on its first line and one
//! value per following line in shortest round-trip form. Writes go through
//! a temporary file and a rename, so concurrent readers never see a
//! partial record. Unreadable or mismatched records are treated as misses.

use std::collections::hash_map::DefaultHasher;
use std::fs;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, Clone)]
pub struct TextCache {
    dir: PathBuf,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Canonical text for a float inside a key: exact bit pattern, no locale.
pub fn key_float(x: f64) -> String {
    format!("{:016x}", x.to_bits())
}

/// Looks `key` up in `cache` and falls back to `compute`, storing its result.
/// Records of the wrong length count as misses; a failed store is logged
/// and otherwise ignored.
pub fn cached(
    cache: Option<&TextCache>,
    key: &str,
    len: usize,
    compute: impl FnOnce() -> crate::Result<Vec<f64>>,
) -> crate::Result<Vec<f64>> {
    if let Some(values) = cache.and_then(|c| c.load(key)) {
        if values.len() == len {
            return Ok(values);
        }
        log::warn!("cache record for {key} has {} values, expected {len}; recomputing", values.len());
    }
    let values = compute()?;
    if let Some(c) = cache {
        if let Err(e) = c.store(key, &values) {
            log::warn!("could not write cache record for {key}: {e}");
        }
    }
    Ok(values)
}

impl TextCache {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, key: &str) -> PathBuf {
        // DefaultHasher::new() uses fixed keys: names are stable for a given
        // toolchain, and a change between toolchains only costs a miss
        let mut h = DefaultHasher::new();
        key.hash(&mut h);
        let prefix: String = key
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '-' || *c == '_')
            .collect();
        self.dir.join(format!("{prefix}-{:016x}.txt", h.finish()))
    }

    pub fn load(&self, key: &str) -> Option<Vec<f64>> {
        let path = self.path_for(key);
        let text = fs::read_to_string(&path).ok()?;
        let mut lines = text.lines();
        if lines.next() != Some(key) {
            log::warn!("cache record {} does not match its key; recomputing", path.display());
            return None;
        }
        let mut values = Vec::new();
        for line in lines {
            match line.trim().parse::<f64>() {
                Ok(v) => values.push(v),
                Err(_) => {
                    log::warn!("corrupted cache record {}; recomputing", path.display());
                    return None;
                }
            }
        }
        Some(values)
    }

    pub fn store(&self, key: &str, values: &[f64]) -> std::io::Result<()> {
        let path = self.path_for(key);
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            writeln!(f, "{key}")?;
            for v in values {
                writeln!(f, "{v:?}")?;
            }
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("xxz-cache-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn round_trip_is_exact() {
        let cache = TextCache::new(scratch("rt")).unwrap();
        let values = [0.1, -1.0 / 3.0, 1e-300, f64::MAX];
        cache.store("roots-L8", &values).unwrap();
        assert_eq!(cache.load("roots-L8").unwrap(), values);
        assert!(cache.load("roots-L10").is_none());
        fs::remove_dir_all(cache.dir()).unwrap();
    }

    #[test]
    fn corrupted_record_is_a_miss() {
        let cache = TextCache::new(scratch("bad")).unwrap();
        cache.store("k", &[1.0]).unwrap();
        let path = cache.path_for("k");
        fs::write(&path, "k\nnot-a-number\n").unwrap();
        assert!(cache.load("k").is_none());
        fs::write(&path, "other\n1.0\n").unwrap();
        assert!(cache.load("k").is_none());
        fs::remove_dir_all(cache.dir()).unwrap();
    }

    #[test]
    fn short_record_is_recomputed() {
        let cache = TextCache::new(scratch("short")).unwrap();
        fs::write(cache.path_for("pair"), "pair\n1.0\n").unwrap();
        let mut calls = 0;
        let v = cached(Some(&cache), "pair", 2, || {
            calls += 1;
            Ok(vec![2.0, 3.0])
        })
        .unwrap();
        assert_eq!((v, calls), (vec![2.0, 3.0], 1));
        let again = cached(Some(&cache), "pair", 2, || unreachable!()).unwrap();
        assert_eq!(again, vec![2.0, 3.0]);
        fs::remove_dir_all(cache.dir()).unwrap();
    }
}

//! File-backed report cache: one file per scenario, named by the scenario
//! key, holding `sha256=<hex>` of the body on the first line followed by the
//! machine report itself. Writes go to a temporary file in the cache
//! directory and are renamed into place, so concurrent pipeline processes
//! never observe a half-written entry; a hash mismatch on read is treated as
//! a miss (with a warning on stderr), never as an error.

use crate::scenario::Scenario;
use crate::TOOLKIT_VERSION;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Cache key of a scenario: SHA-256 over the toolkit version and the
/// canonical scenario text, so a different build never serves stale reports.
pub fn scenario_key(scenario: &Scenario) -> String {
    let mut hasher = Sha256::new();
    hasher.update(TOOLKIT_VERSION.as_bytes());
    hasher.update(b"\n");
    hasher.update(scenario.canonical_text().as_bytes());
    hex::encode(hasher.finalize())
}

fn body_digest(body: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(body.as_bytes());
    hex::encode(hasher.finalize())
}

/// A report store rooted at one directory.
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// Opens (creating if needed) a cache directory.
    pub fn open(dir: &Path) -> std::io::Result<Cache> {
        std::fs::create_dir_all(dir)?;
        Ok(Cache {
            dir: dir.to_path_buf(),
        })
    }

    fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.report"))
    }

    /// Fetches a verified report body, or `None` on miss or corruption
    /// (corruption additionally warns on stderr).
    pub fn lookup(&self, key: &str) -> Option<String> {
        let path = self.entry_path(key);
        let content = match std::fs::read_to_string(&path) {
            Ok(content) => content,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                eprintln!("warning: cannot read cache entry {}: {e}", path.display());
                return None;
            }
        };
        let Some((first, body)) = content.split_once('\n') else {
            eprintln!(
                "warning: cache entry {} is malformed; ignoring it",
                path.display()
            );
            return None;
        };
        let Some(stored) = first.strip_prefix("sha256=") else {
            eprintln!(
                "warning: cache entry {} is malformed; ignoring it",
                path.display()
            );
            return None;
        };
        if stored != body_digest(body) {
            eprintln!(
                "warning: cache entry {} failed its hash check; ignoring it",
                path.display()
            );
            return None;
        }
        Some(body.to_string())
    }

    /// Stores a report body under a key, atomically.
    pub fn store(&self, key: &str, body: &str) -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(format!("sha256={}\n", body_digest(body)).as_bytes())?;
        tmp.write_all(body.as_bytes())?;
        tmp.persist(self.entry_path(key))
            .map_err(|e| e.error)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_scenario() -> Scenario {
        Scenario::parse("n=1\nN=2\nrho=-1/100\nhorizon=300\nbetti=1,0,1\n").unwrap()
    }

    #[test]
    fn store_then_lookup_round_trips_bit_identically() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let key = scenario_key(&sample_scenario());
        let body = "stage=meta\nversion=test\n\nstage=rest\nvalue=1\n";
        cache.store(&key, body).unwrap();
        assert_eq!(cache.lookup(&key).as_deref(), Some(body));
    }

    #[test]
    fn unknown_key_misses() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        assert_eq!(cache.lookup(&"0".repeat(64)), None);
    }

    #[test]
    fn corrupted_entry_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let key = scenario_key(&sample_scenario());
        cache.store(&key, "good body\n").unwrap();
        let path = dir.path().join(format!("{key}.report"));
        let mut tampered = std::fs::read_to_string(&path).unwrap();
        tampered.push_str("tampering\n");
        std::fs::write(&path, tampered).unwrap();
        assert_eq!(cache.lookup(&key), None);
    }

    #[test]
    fn truncated_entry_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let key = scenario_key(&sample_scenario());
        std::fs::write(dir.path().join(format!("{key}.report")), "no header").unwrap();
        assert_eq!(cache.lookup(&key), None);
    }

    #[test]
    fn key_depends_on_scenario_content() {
        let a = scenario_key(&sample_scenario());
        let b = scenario_key(
            &Scenario::parse("n=1\nN=2\nrho=-1/100\nhorizon=301\nbetti=1,0,1\n").unwrap(),
        );
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
    }
}

//! On-disk store for computed table cells.
//!
//! Each cell lives in its own JSON file named by the SHA-256 of a canonical
//! key. Writes go to a temporary file in the same directory followed by a
//! rename, so concurrent readers never see a partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use betaorder::marginals::{Cell, CellStore, EnsembleSpec};
use betaorder::scalar::fmt_q;
use betaorder::serial::{cell_from_record, cell_to_record, CellRecord, Record, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const ENV_VAR: &str = "BETAORDER_CACHE_DIR";

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    schema: u32,
    key: String,
    created: u64,
    code_version: String,
    cell: CellRecord,
}

/// `--cache-dir`, then `$BETAORDER_CACHE_DIR`, then `$XDG_CACHE_HOME/betaorder`,
/// then `~/.cache/betaorder`.
pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = flag {
        return Some(p.to_path_buf());
    }
    let env = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
    env(ENV_VAR)
        .or_else(|| env("XDG_CACHE_HOME").map(|p| p.join("betaorder")))
        .or_else(|| env("HOME").map(|p| p.join(".cache").join("betaorder")))
}

/// Canonical key text for one cell.
pub fn key_text(spec: &EnsembleSpec, big_n: u32, n: u32) -> String {
    format!(
        "v{SCHEMA_VERSION}|{}|{}|{}|{}|{big_n}|{n}|{}",
        spec.family,
        spec.beta,
        fmt_q(spec.lambda1),
        fmt_q(spec.lambda2),
        spec.regime
    )
}

pub fn key_digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Clone, Debug)]
pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.json", key_digest(key)))
    }

    fn read<E: Record>(&self, key: &str) -> Option<Cell<E>> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        if entry.schema != SCHEMA_VERSION || entry.key != key {
            return None;
        }
        cell_from_record(&entry.cell).ok()
    }

    fn write<E: Record>(&self, key: &str, cell: &Cell<E>) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = Entry {
            schema: SCHEMA_VERSION,
            key: key.to_string(),
            created: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            cell: cell_to_record(cell),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

impl<E: Record> CellStore<E> for DiskCache {
    fn load(&self, spec: &EnsembleSpec, big_n: u32, n: u32) -> Option<Cell<E>> {
        self.read(&key_text(spec, big_n, n))
    }

    fn store(&self, spec: &EnsembleSpec, big_n: u32, n: u32, cell: &Cell<E>) {
        // the cache is an accelerator; a failed write only costs a recomputation
        let _ = self.write(&key_text(spec, big_n, n), cell);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use betaorder::marginals::{compute_laguerre, Ordering};
    use betaorder::scalar::q;
    use betaorder::symfunc::LaguerreExpansion;

    #[test]
    fn keys_are_stable() {
        let spec = EnsembleSpec::laguerre(1, q(-1, 2)).unwrap();
        assert_eq!(key_text(&spec, 3, 1), "v1|laguerre|1|-1/2|0|3|1|half-integer-lambda");
        assert_eq!(key_digest("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::new(dir.path());
        let spec = EnsembleSpec::laguerre(2, q(1, 1)).unwrap();
        let fresh = compute_laguerre(spec, 3, Ordering::RowMajor, Some(&cache)).unwrap();
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 6);
        let again = compute_laguerre(spec, 3, Ordering::RowMajor, Some(&cache)).unwrap();
        assert_eq!(fresh, again);
        let hit: Cell<LaguerreExpansion> = CellStore::load(&cache, &spec, 3, 2).unwrap();
        assert_eq!(&hit, fresh.cell(3, 2));
    }

    #[test]
    fn corrupt_entries_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::new(dir.path());
        let spec = EnsembleSpec::laguerre(2, q(0, 1)).unwrap();
        fs::write(cache.path(&key_text(&spec, 1, 1)), "not json").unwrap();
        let got: Option<Cell<LaguerreExpansion>> = CellStore::load(&cache, &spec, 1, 1);
        assert!(got.is_none());
    }
}

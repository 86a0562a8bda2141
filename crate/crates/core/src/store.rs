//! File-backed memoization of solved `f`-values.
//!
//! One JSON record per line, e.g. `{"v":"1","n":3,"mc":4,"f":4}`, keyed by
//! engine version, `n`, and the canonical residue `mc = m mod lcm(1..=n)`.
//! The file is append-only while a store is open; opening compacts exact
//! duplicates away and rejects conflicting ones. Records written under a
//! different engine version stay in the file but are invisible, so a
//! version bump quietly retires stale values. Witnesses are never cached;
//! they are cheap to recompute and dominate the record size.
//!
//! Concurrency: one writer per file, any number of readers. Parallel
//! sweeps should write shard files and join them with [`merge_files`].

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::canonical_m;
use crate::solver::solve_f;

/// Stamped into every record; bump when solver tie-breaking changes so
/// previously cached values stop being served.
pub const ENGINE_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
struct CacheLine {
    v: String,
    n: u64,
    mc: u64,
    f: u64,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cache i/o failure at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cache line {line} in {path} is not a valid record")]
    Corrupt { path: PathBuf, line: usize },
    #[error("conflicting f for n = {n}, m ≡ {mc}: stored {existing}, incoming {incoming}")]
    Conflict {
        n: u64,
        mc: u64,
        existing: u64,
        incoming: u64,
    },
    #[error("refusing f = {f} for n = {n}: outside [{n}, {max}]")]
    OutOfBounds { n: u64, f: u64, max: u64 },
}

/// Handle on one cache file. Keeps every record in memory; the scale is
/// bounded by the residue caps upstream.
#[derive(Debug)]
pub struct ResultStore {
    path: PathBuf,
    records: HashMap<(String, u64, u64), u64>,
    appender: Option<File>,
}

impl ResultStore {
    /// Open (or create) the store at `path`, deduplicating the file if
    /// earlier appends left identical records behind.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let mut records = HashMap::new();
        let mut duplicates = 0usize;
        if path.exists() {
            for (record, _) in read_records(&path)? {
                let key = (record.v, record.n, record.mc);
                match records.get(&key) {
                    Some(&existing) if existing != record.f => {
                        return Err(StoreError::Conflict {
                            n: key.1,
                            mc: key.2,
                            existing,
                            incoming: record.f,
                        });
                    }
                    Some(_) => duplicates += 1,
                    None => {
                        records.insert(key, record.f);
                    }
                }
            }
        }
        let store = Self {
            path,
            records,
            appender: None,
        };
        if duplicates > 0 {
            store.rewrite_compacted()?;
        }
        Ok(store)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Records visible under the current engine version.
    pub fn len(&self) -> usize {
        self.records
            .keys()
            .filter(|(v, _, _)| v == ENGINE_VERSION)
            .count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cached `f(n, m)`, if this engine version solved the residue before.
    pub fn get(&self, n: u64, m: u64) -> Option<u64> {
        let mc = canonical_m(n, m);
        self.records
            .get(&(ENGINE_VERSION.to_string(), n, mc))
            .copied()
    }

    /// Record `f(n, m) = f`. Identical duplicates are no-ops; a conflicting
    /// value is an integrity error pointing at a solver bug or corruption.
    pub fn put(&mut self, n: u64, m: u64, f: u64) -> Result<(), StoreError> {
        let max = n.saturating_mul(n);
        if f < n || f > max {
            return Err(StoreError::OutOfBounds { n, f, max });
        }
        let mc = canonical_m(n, m);
        let key = (ENGINE_VERSION.to_string(), n, mc);
        match self.records.get(&key) {
            Some(&existing) if existing == f => return Ok(()),
            Some(&existing) => {
                return Err(StoreError::Conflict {
                    n,
                    mc,
                    existing,
                    incoming: f,
                })
            }
            None => {}
        }
        let line = CacheLine {
            v: ENGINE_VERSION.to_string(),
            n,
            mc,
            f,
        };
        self.append_line(&line)?;
        self.records.insert(key, f);
        Ok(())
    }

    fn append_line(&mut self, line: &CacheLine) -> Result<(), StoreError> {
        let io_err = |source| StoreError::Io {
            path: self.path.clone(),
            source,
        };
        if self.appender.is_none() {
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&self.path)
                .map_err(io_err)?;
            self.appender = Some(file);
        }
        let file = self.appender.as_mut().unwrap();
        let encoded = serde_json::to_string(line).expect("cache records always serialize");
        writeln!(file, "{encoded}").map_err(io_err)?;
        file.flush().map_err(io_err)
    }

    fn rewrite_compacted(&self) -> Result<(), StoreError> {
        let tmp = self.path.with_extension("tmp");
        write_sorted(&tmp, &self.records)?;
        std::fs::rename(&tmp, &self.path).map_err(|source| StoreError::Io {
            path: self.path.clone(),
            source,
        })
    }
}

/// Merge two cache files into `out` (overwritten), rejecting conflicting
/// records. Set union makes this associative and order-insensitive, so
/// shards from a parallel sweep can be joined in any grouping.
pub fn merge_files(
    a: impl AsRef<Path>,
    b: impl AsRef<Path>,
    out: impl AsRef<Path>,
) -> Result<usize, StoreError> {
    let mut merged: HashMap<(String, u64, u64), u64> = HashMap::new();
    for path in [a.as_ref(), b.as_ref()] {
        for (record, _) in read_records(path)? {
            let key = (record.v, record.n, record.mc);
            match merged.get(&key) {
                Some(&existing) if existing != record.f => {
                    return Err(StoreError::Conflict {
                        n: key.1,
                        mc: key.2,
                        existing,
                        incoming: record.f,
                    });
                }
                _ => {
                    merged.insert(key, record.f);
                }
            }
        }
    }
    write_sorted(out.as_ref(), &merged)?;
    Ok(merged.len())
}

fn read_records(path: &Path) -> Result<Vec<(CacheLine, usize)>, StoreError> {
    let io_err = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CacheLine = serde_json::from_str(&line).map_err(|_| StoreError::Corrupt {
            path: path.to_path_buf(),
            line: idx + 1,
        })?;
        out.push((record, idx + 1));
    }
    Ok(out)
}

fn write_sorted(path: &Path, records: &HashMap<(String, u64, u64), u64>) -> Result<(), StoreError> {
    let io_err = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut keys: Vec<_> = records.keys().collect();
    keys.sort();
    let mut file = File::create(path).map_err(io_err)?;
    for key in keys {
        let line = CacheLine {
            v: key.0.clone(),
            n: key.1,
            mc: key.2,
            f: records[key],
        };
        let encoded = serde_json::to_string(&line).expect("cache records always serialize");
        writeln!(file, "{encoded}").map_err(io_err)?;
    }
    file.flush().map_err(io_err)
}

/// Thread-safe solve-with-memoization handle: an in-memory map in front of
/// an optional [`ResultStore`]. Values are always produced by [`solve_f`]
/// at the canonical residue, so a hit and a miss return identical numbers.
pub struct SolveCache {
    memo: Mutex<HashMap<(u64, u64), u64>>,
    store: Option<Mutex<ResultStore>>,
}

impl SolveCache {
    /// Memoize in memory only.
    pub fn ephemeral() -> Self {
        Self {
            memo: Mutex::new(HashMap::new()),
            store: None,
        }
    }

    /// Memoize through a persistent store.
    pub fn with_store(store: ResultStore) -> Self {
        Self {
            memo: Mutex::new(HashMap::new()),
            store: Some(Mutex::new(store)),
        }
    }

    pub fn has_store(&self) -> bool {
        self.store.is_some()
    }

    /// `f(n, m)`, solved at most once per canonical residue.
    pub fn f_value(&self, n: u64, m: u64) -> Result<u64, StoreError> {
        let mc = canonical_m(n, m);
        if let Some(&f) = self.memo.lock().unwrap().get(&(n, mc)) {
            return Ok(f);
        }
        if let Some(store) = &self.store {
            if let Some(f) = store.lock().unwrap().get(n, mc) {
                self.memo.lock().unwrap().insert((n, mc), f);
                return Ok(f);
            }
        }
        // solve outside the locks; concurrent duplicates agree by determinism
        let f = solve_f(n, mc).f_value;
        self.memo.lock().unwrap().insert((n, mc), f);
        if let Some(store) = &self.store {
            store.lock().unwrap().put(n, mc, f)?;
        }
        Ok(f)
    }

    /// Push an already-solved value through the memo and store.
    pub fn record(&self, n: u64, m: u64, f: u64) -> Result<(), StoreError> {
        let mc = canonical_m(n, m);
        self.memo.lock().unwrap().insert((n, mc), f);
        if let Some(store) = &self.store {
            store.lock().unwrap().put(n, mc, f)?;
        }
        Ok(())
    }
}

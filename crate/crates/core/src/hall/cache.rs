//! Append-only on-disk cache of Hall counts.
//!
//! One record per line: `n;L;i;a;p;{"class":count,...}` with classes in the
//! canonical multisegment text format.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use super::counts::hall_counts_simple_top;
use crate::error::{Error, Result};
use crate::linalg::gaussian_binomial;
use crate::quiver::{t_top, Multisegment, QuiverSpec};

pub const CACHE_FILE: &str = "hall_counts.txt";

type Key = (usize, String, usize, usize, u64);
type Counts = BTreeMap<Multisegment, u128>;

#[derive(Debug)]
pub struct HallCache {
    path: PathBuf,
    entries: RwLock<HashMap<Key, Counts>>,
    malformed: Vec<(usize, String)>,
    writer: Mutex<()>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheStats {
    pub path: PathBuf,
    pub records: usize,
    pub malformed_lines: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CacheVerification {
    pub records_checked: usize,
    pub problems: Vec<String>,
}

impl CacheVerification {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

fn parse_record(line: &str) -> Result<(Key, Counts)> {
    let bad = |why: &str| Error::Cache(format!("{why}: {line:?}"));
    let mut parts = line.splitn(6, ';');
    let mut field = || parts.next().ok_or_else(|| bad("too few fields"));
    let n: usize = field()?.parse().map_err(|_| bad("bad n"))?;
    let l_text = field()?.to_string();
    let i: usize = field()?.parse().map_err(|_| bad("bad vertex"))?;
    let a: usize = field()?.parse().map_err(|_| bad("bad size"))?;
    let p: u64 = field()?.parse().map_err(|_| bad("bad prime"))?;
    let json = field()?;
    let spec = QuiverSpec::new(n)?;
    let l = Multisegment::parse(spec, &l_text)?;
    let raw: BTreeMap<String, u128> = serde_json::from_str(json).map_err(|e| bad(&e.to_string()))?;
    let mut counts = Counts::new();
    for (k, v) in raw {
        counts.insert(Multisegment::parse(spec, &k)?, v);
    }
    Ok(((n, l.to_string(), i, a, p), counts))
}

/// Rejects records whose counts do not add up to `[t_i(L) choose a]_p`.
fn check_total((key, counts): (Key, Counts)) -> Result<(Key, Counts)> {
    let spec = QuiverSpec::new(key.0)?;
    let l = Multisegment::parse(spec, &key.1)?;
    let total: u128 = counts.values().sum();
    let expected = gaussian_binomial(t_top(&l, key.2), key.3, key.4);
    if total != expected {
        return Err(Error::Cache(format!(
            "record for {};{};{};{} totals {total}, expected {expected}",
            key.1, key.2, key.3, key.4
        )));
    }
    Ok((key, counts))
}

fn format_record(key: &Key, counts: &Counts) -> String {
    let raw: BTreeMap<String, u128> = counts.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    format!(
        "{};{};{};{};{};{}\n",
        key.0,
        key.1,
        key.2,
        key.3,
        key.4,
        serde_json::to_string(&raw).expect("string map serializes")
    )
}

impl HallCache {
    /// Opens (creating if needed) the cache in `dir`. Unparseable lines and
    /// records with impossible totals are skipped here and reported by
    /// [`HallCache::verify`].
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        let path = dir.as_ref().join(CACHE_FILE);
        let mut entries = HashMap::new();
        let mut malformed = Vec::new();
        if path.exists() {
            for (no, line) in fs::read_to_string(&path)?.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                match parse_record(line).and_then(check_total) {
                    Ok((k, v)) => {
                        entries.insert(k, v);
                    }
                    Err(e) => malformed.push((no + 1, e.to_string())),
                }
            }
        }
        Ok(Self {
            path,
            entries: RwLock::new(entries),
            malformed,
            writer: Mutex::new(()),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn key(l: &Multisegment, i: usize, a: usize, p: u64) -> Key {
        (l.spec().n(), l.to_string(), i, a, p)
    }

    pub fn get(&self, l: &Multisegment, i: usize, a: usize, p: u64) -> Option<Counts> {
        self.entries
            .read()
            .expect("cache lock")
            .get(&Self::key(l, i, a, p))
            .cloned()
    }

    /// Records `counts`; a key that is already present is left alone.
    pub fn insert(&self, l: &Multisegment, i: usize, a: usize, p: u64, counts: &Counts) -> Result<()> {
        let key = Self::key(l, i, a, p);
        let _guard = self.writer.lock().expect("cache writer lock");
        if self.entries.read().expect("cache lock").contains_key(&key) {
            return Ok(());
        }
        let line = format_record(&key, counts);
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        f.write_all(line.as_bytes())?;
        self.entries
            .write()
            .expect("cache lock")
            .insert(key, counts.clone());
        Ok(())
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            path: self.path.clone(),
            records: self.entries.read().expect("cache lock").len(),
            malformed_lines: self.malformed.len(),
        }
    }

    /// Deletes the cache file in `dir`, if any.
    pub fn clear(dir: impl AsRef<Path>) -> Result<bool> {
        let path = dir.as_ref().join(CACHE_FILE);
        if path.exists() {
            fs::remove_file(path)?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Re-derives every record: totals must be Gaussian binomials and the
    /// counts must match a fresh computation.
    pub fn verify(&self) -> CacheVerification {
        let mut report = CacheVerification::default();
        for (line, why) in &self.malformed {
            report.problems.push(format!("line {line}: {why}"));
        }
        let entries = self.entries.read().expect("cache lock");
        let mut keys: Vec<&Key> = entries.keys().collect();
        keys.sort();
        for key in keys {
            report.records_checked += 1;
            let counts = &entries[key];
            let (n, l_text, i, a, p) = key;
            let label = format!("record {n};{l_text};{i};{a};{p}");
            let Ok(spec) = QuiverSpec::new(*n) else {
                report.problems.push(format!("{label}: invalid n"));
                continue;
            };
            let Ok(l) = Multisegment::parse(spec, l_text) else {
                report.problems.push(format!("{label}: invalid class"));
                continue;
            };
            let total: u128 = counts.values().sum();
            let expected = gaussian_binomial(t_top(&l, *i), *a, *p);
            if total != expected {
                report
                    .problems
                    .push(format!("{label}: total {total}, expected Gaussian binomial {expected}"));
                continue;
            }
            if &hall_counts_simple_top(&l, *i, *a, *p) != counts {
                report.problems.push(format!("{label}: counts differ from recomputation"));
            }
        }
        report
    }
}

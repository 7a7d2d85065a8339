//! On-disk cache of invariant values, one JSON file per key.
//!
//! Values are stored as the hex bit patterns of their floating-point
//! components, so a cache hit reproduces the computed value exactly.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use seifert_rt::{DoubleDouble, InvariantResult, Real};

/// Scalars whose exact bit pattern can be written and read back.
pub trait Persist: Real {
    fn to_words(self) -> Vec<u64>;
    fn from_words(w: &[u64]) -> Option<Self>;
}

impl Persist for f64 {
    fn to_words(self) -> Vec<u64> {
        vec![self.to_bits()]
    }

    fn from_words(w: &[u64]) -> Option<Self> {
        match w {
            [x] => Some(f64::from_bits(*x)),
            _ => None,
        }
    }
}

impl Persist for DoubleDouble {
    fn to_words(self) -> Vec<u64> {
        vec![self.hi().to_bits(), self.lo().to_bits()]
    }

    fn from_words(w: &[u64]) -> Option<Self> {
        match w {
            [h, l] => Some(DoubleDouble::from_parts(f64::from_bits(*h), f64::from_bits(*l))),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    result: InvariantResult,
    re: Vec<String>,
    im: Vec<String>,
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir }
    }

    fn path(&self, key: &str) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        self.dir.join(format!("{}.json", hex::encode(&digest[..16])))
    }

    pub fn load<T: Persist>(&self, key: &str) -> Option<(InvariantResult, Complex<T>)> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let e: Entry = serde_json::from_str(&text).ok()?;
        if e.key != key {
            return None;
        }
        let words = |v: &[String]| -> Option<Vec<u64>> { v.iter().map(|s| u64::from_str_radix(s, 16).ok()).collect() };
        let re = T::from_words(&words(&e.re)?)?;
        let im = T::from_words(&words(&e.im)?)?;
        Some((e.result, Complex::new(re, im)))
    }

    /// Write through a temporary file in the same directory and rename it into place.
    pub fn store<T: Persist>(&self, key: &str, result: &InvariantResult, value: Complex<T>) -> Result<()> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating cache directory {}", self.dir.display()))?;
        let hex = |w: Vec<u64>| w.into_iter().map(|x| format!("{x:016x}")).collect();
        let entry = Entry {
            key: key.to_string(),
            result: result.clone(),
            re: hex(value.re.to_words()),
            im: hex(value.im.to_words()),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string_pretty(&entry)?.as_bytes())?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

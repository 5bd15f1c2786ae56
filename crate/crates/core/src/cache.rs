//! On-disk feature cache.
//!
//! One file per (audio content, layout version) pair. The key is the
//! SHA-256 of the raw file bytes concatenated with the layout-version
//! string, so editing a file or changing the layout invalidates the entry
//! automatically. The value is a small binary record:
//!
//! ```text
//! magic "EMFC" | u32 version | u32 layout len | layout bytes
//!             | u32 count   | count x f64, all little-endian
//! ```

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::hex_string;
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::io::atomic_write;

const MAGIC: &[u8; 4] = b"EMFC";
const CACHE_VERSION: u32 = 1;

/// Cache key for a file's content under a feature layout.
pub fn cache_key(file_bytes: &[u8], layout_version: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(file_bytes);
    hasher.update([0u8]);
    hasher.update(layout_version.as_bytes());
    hex_string(&hasher.finalize())
}

/// Path of the cache entry for a key inside a cache directory.
pub fn cache_path(cache_dir: &Path, key: &str) -> PathBuf {
    cache_dir.join(format!("{key}.fvec"))
}

pub fn write_cache(path: &Path, vector: &FeatureVector) -> Result<()> {
    let layout = vector.layout_version.as_bytes();
    let mut bytes =
        Vec::with_capacity(4 + 4 + 4 + layout.len() + 4 + vector.values.len() * 8);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    bytes.extend_from_slice(&(layout.len() as u32).to_le_bytes());
    bytes.extend_from_slice(layout);
    bytes.extend_from_slice(&(vector.values.len() as u32).to_le_bytes());
    for v in &vector.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    atomic_write(path, &bytes)
}

pub fn read_cache(path: &Path) -> Result<FeatureVector> {
    let bad = |message: &str| Error::BadCache {
        path: path.display().to_string(),
        message: message.to_string(),
    };
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut cursor = 0usize;
    let take = |cursor: &mut usize, n: usize| -> Result<&[u8]> {
        if *cursor + n > bytes.len() {
            return Err(bad("truncated"));
        }
        let slice = &bytes[*cursor..*cursor + n];
        *cursor += n;
        Ok(slice)
    };
    if take(&mut cursor, 4)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u32::from_le_bytes(take(&mut cursor, 4)?.try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(bad(&format!("unsupported cache version {version}")));
    }
    let layout_len = u32::from_le_bytes(take(&mut cursor, 4)?.try_into().unwrap()) as usize;
    let layout = String::from_utf8(take(&mut cursor, layout_len)?.to_vec())
        .map_err(|_| bad("layout not utf-8"))?;
    let count = u32::from_le_bytes(take(&mut cursor, 4)?.try_into().unwrap()) as usize;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(f64::from_le_bytes(take(&mut cursor, 8)?.try_into().unwrap()));
    }
    if cursor != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    FeatureVector::new(values, layout)
}

/// Returns the cached vector if a valid entry exists for this content and
/// layout, otherwise None (corrupt entries count as absent).
pub fn lookup(cache_dir: &Path, file_bytes: &[u8], layout_version: &str) -> Option<FeatureVector> {
    let path = cache_path(cache_dir, &cache_key(file_bytes, layout_version));
    if !path.is_file() {
        return None;
    }
    match read_cache(&path) {
        Ok(v) if v.layout_version == layout_version => Some(v),
        _ => None,
    }
}

/// Stores a vector under its content key; returns the entry path.
pub fn store(
    cache_dir: &Path,
    file_bytes: &[u8],
    vector: &FeatureVector,
) -> Result<PathBuf> {
    let path = cache_path(cache_dir, &cache_key(file_bytes, &vector.layout_version));
    write_cache(&path, vector)?;
    Ok(path)
}

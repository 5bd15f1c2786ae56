//! Dataset manifests: which file carries which speaker, emotion, and split.
//!
//! The native format is a header-first CSV (`path,speaker,emotion,split`)
//! with raw, unquoted fields; a JSON array of objects with the same keys is
//! accepted as an alternative. The split column may be left empty and
//! assigned later by [`auto_split`], which shuffles per emotion with a
//! seeded RNG and divides in the 300:30:20 ratio.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
    Eval,
}

impl Split {
    fn parse(text: &str) -> Option<Split> {
        match text {
            "train" => Some(Split::Train),
            "test" => Some(Split::Test),
            "eval" => Some(Split::Eval),
            _ => None,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::Eval => "eval",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub speaker: String,
    pub emotion: String,
    pub split: Option<Split>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn by_split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries
            .iter()
            .filter(move |e| e.split == Some(split))
    }

    pub fn by_emotion<'a>(&'a self, emotion: &'a str) -> impl Iterator<Item = &'a ManifestEntry> {
        self.entries.iter().filter(move |e| e.emotion == emotion)
    }
}

/// Loads and validates a manifest. Emotion labels are lowercased and must
/// belong to `emotion_set`; paths must be unique and point at existing
/// files. Relative paths resolve against the manifest's directory.
pub fn load_manifest(path: &Path, emotion_set: &[String]) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let is_json = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);
    let mut manifest = if is_json {
        parse_json(path, &text)?
    } else {
        parse_csv(path, &text)?
    };

    let base = path.parent().unwrap_or_else(|| Path::new(""));
    let mut seen = BTreeSet::new();
    for (idx, entry) in manifest.entries.iter_mut().enumerate() {
        let line = idx + 2; // header is line 1 in CSV; close enough for JSON
        entry.emotion = entry.emotion.to_lowercase();
        if !emotion_set.contains(&entry.emotion) {
            return Err(Error::UnknownEmotion {
                label: entry.emotion.clone(),
                context: Some(format!("{}:{line}", path.display())),
            });
        }
        if entry.path.is_relative() {
            entry.path = base.join(&entry.path);
        }
        if !seen.insert(entry.path.clone()) {
            return Err(Error::DuplicatePath {
                path: entry.path.display().to_string(),
                line,
            });
        }
        if !entry.path.is_file() {
            return Err(Error::MissingFile {
                path: entry.path.display().to_string(),
                line,
            });
        }
    }
    Ok(manifest)
}

fn parse_csv(path: &Path, text: &str) -> Result<Manifest> {
    let err = |line: usize, column: usize, message: String| Error::ParseError {
        path: path.display().to_string(),
        line,
        column,
        message,
    };
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) => h.trim_end_matches('\r'),
        None => return Err(err(1, 1, "empty manifest".into())),
    };
    if header != "path,speaker,emotion,split" {
        return Err(err(
            1,
            1,
            format!("expected header 'path,speaker,emotion,split', got '{header}'"),
        ));
    }
    let mut entries = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(err(
                line_no,
                line.len(),
                format!("expected 4 fields, got {}", fields.len()),
            ));
        }
        if fields[0].is_empty() {
            return Err(err(line_no, 1, "empty path".into()));
        }
        let split = match fields[3].trim() {
            "" => None,
            text => Some(Split::parse(text).ok_or_else(|| {
                let column = line.len() - fields[3].len() + 1;
                err(
                    line_no,
                    column,
                    format!("unknown split '{text}' (train/test/eval or empty)"),
                )
            })?),
        };
        entries.push(ManifestEntry {
            path: PathBuf::from(fields[0]),
            speaker: fields[1].to_string(),
            emotion: fields[2].to_string(),
            split,
        });
    }
    Ok(Manifest { entries })
}

fn parse_json(path: &Path, text: &str) -> Result<Manifest> {
    let entries: Vec<ManifestEntry> =
        serde_json::from_str(text).map_err(|e| Error::ParseError {
            path: path.display().to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    Ok(Manifest { entries })
}

/// Serializes a manifest back to its CSV form.
pub fn manifest_to_csv(manifest: &Manifest) -> String {
    let mut out = String::from("path,speaker,emotion,split\n");
    for e in &manifest.entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.path.display(),
            e.speaker,
            e.emotion,
            e.split.map(|s| s.to_string()).unwrap_or_default()
        ));
    }
    out
}

/// Train/test/eval quotas per emotion, as shares of 300:30:20.
const SPLIT_WEIGHTS: [(Split, f64); 3] = [
    (Split::Train, 300.0),
    (Split::Test, 30.0),
    (Split::Eval, 20.0),
];

/// Assigns splits to entries that lack one: per emotion, a seeded shuffle
/// followed by a largest-remainder division in the 300:30:20 ratio.
/// Entries that already carry a split are left untouched.
pub fn auto_split(manifest: &mut Manifest, seed: u64) {
    let emotions: BTreeSet<String> = manifest
        .entries
        .iter()
        .filter(|e| e.split.is_none())
        .map(|e| e.emotion.clone())
        .collect();
    for emotion in emotions {
        let idx: Vec<usize> = manifest
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.split.is_none() && e.emotion == emotion)
            .map(|(i, _)| i)
            .collect();
        let mut shuffled = idx.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(hash_label(&emotion)));
        shuffled.shuffle(&mut rng);

        let n = shuffled.len();
        let total: f64 = SPLIT_WEIGHTS.iter().map(|(_, w)| w).sum();
        let mut counts: Vec<usize> = SPLIT_WEIGHTS
            .iter()
            .map(|(_, w)| (n as f64 * w / total).floor() as usize)
            .collect();
        let mut rem: Vec<(usize, f64)> = SPLIT_WEIGHTS
            .iter()
            .enumerate()
            .map(|(i, (_, w))| (i, n as f64 * w / total - counts[i] as f64))
            .collect();
        rem.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let mut leftover = n - counts.iter().sum::<usize>();
        for (i, _) in rem {
            if leftover == 0 {
                break;
            }
            counts[i] += 1;
            leftover -= 1;
        }

        let mut cursor = 0usize;
        for ((split, _), &count) in SPLIT_WEIGHTS.iter().zip(&counts) {
            for &entry_idx in &shuffled[cursor..cursor + count] {
                manifest.entries[entry_idx].split = Some(*split);
            }
            cursor += count;
        }
    }
}

fn hash_label(label: &str) -> u64 {
    label
        .bytes()
        .fold(1469598103934665603u64, |h, b| {
            (h ^ b as u64).wrapping_mul(1099511628211)
        })
}

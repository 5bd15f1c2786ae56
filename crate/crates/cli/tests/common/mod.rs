//! Shared helpers for CLI integration tests: synthetic WAV datasets and
//! binary invocation.
#![allow(dead_code)] // each test binary uses a subset of these helpers

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EMOTIONS: [&str; 5] = ["neutral", "angry", "happy", "sad", "surprise"];

/// Per-emotion synthesis parameters: base F0, noise level, amplitude,
/// spectral tilt. Distinct enough that rankers and the probe have signal.
fn timbre(emotion: &str) -> (f64, f64, f64, f64) {
    match emotion {
        "neutral" => (140.0, 0.02, 0.5, 1.0),
        "angry" => (250.0, 0.12, 0.8, 0.4),
        "happy" => (320.0, 0.05, 0.65, 0.7),
        "sad" => (110.0, 0.01, 0.3, 1.6),
        _ => (380.0, 0.06, 0.7, 0.9),
    }
}

pub fn write_wav(path: &Path, samples: &[f64]) {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: 16_000,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).unwrap();
    for &s in samples {
        writer
            .write_sample((s.clamp(-1.0, 1.0) * 32767.0) as i16)
            .unwrap();
    }
    writer.finalize().unwrap();
}

pub fn synth_emotion(emotion: &str, seed: u64, secs: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (base_f0, noise, amp, tilt) = timbre(emotion);
    let f0 = base_f0 * (1.0 + 0.03 * rng.gen_range(-1.0f64..1.0));
    let n = (secs * 16_000.0) as usize;
    let mut phases = [0.0f64; 5];
    for p in &mut phases {
        *p = rng.gen_range(0.0..std::f64::consts::TAU);
    }
    let mut samples: Vec<f64> = (0..n)
        .map(|t| {
            let time = t as f64 / 16_000.0;
            let mut v = 0.0;
            for (h, phase) in phases.iter().enumerate() {
                let harmonic = (h + 1) as f64;
                v += (std::f64::consts::TAU * f0 * harmonic * time + phase).sin()
                    / harmonic.powf(tilt);
            }
            v + noise * rng.gen_range(-1.0f64..1.0)
        })
        .collect();
    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    for s in &mut samples {
        *s *= amp / peak;
    }
    samples
}

/// Builds a small labeled dataset under `dir` and returns the manifest
/// path: `per_emotion` utterances per emotion, split 4 train / 1 test /
/// 1 eval when `per_emotion` is 6.
pub fn build_dataset(dir: &Path, per_emotion: usize) -> PathBuf {
    let wav_dir = dir.join("wav");
    std::fs::create_dir_all(&wav_dir).unwrap();
    let mut manifest = String::from("path,speaker,emotion,split\n");
    for (e_idx, emotion) in EMOTIONS.iter().enumerate() {
        for i in 0..per_emotion {
            let name = format!("{emotion}_{i:02}.wav");
            let samples = synth_emotion(emotion, (e_idx * 100 + i) as u64, 0.5);
            write_wav(&wav_dir.join(&name), &samples);
            let split = match i * 6 / per_emotion {
                0..=3 => "train",
                4 => "test",
                _ => "eval",
            };
            manifest.push_str(&format!("wav/{name},s1,{emotion},{split}\n"));
        }
    }
    let manifest_path = dir.join("manifest.csv");
    std::fs::write(&manifest_path, manifest).unwrap();
    manifest_path
}

/// Runs the emomix binary with the given arguments.
pub fn emomix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emomix"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

/// All files under a directory as (relative path, bytes), sorted.
pub fn dir_snapshot(root: &Path, skip: &[&str]) -> Vec<(String, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, skip: &[&str], out: &mut Vec<(String, Vec<u8>)>) {
        let mut entries: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                walk(root, &path, skip, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                if skip.iter().any(|s| rel.ends_with(s)) {
                    continue;
                }
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, skip, &mut out);
    out
}

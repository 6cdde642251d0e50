//! Per-run result records and their line-oriented JSON persistence.
//!
//! A run file holds one JSON object per line: a header with the resolved
//! configuration, one line per generation, and a summary line. Wall time
//! lives only in the summary line and is excluded from reproducibility
//! comparisons.

use super::ExperimentConfig;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One generation of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStat {
    pub generation: usize,
    /// Cumulative fitness evaluations after this generation.
    pub evaluations: usize,
    /// Active search dimension (coefficients, or weights for direct runs).
    pub coefficients: usize,
    pub generation_best: f64,
    pub best_so_far: f64,
}

/// Everything recorded about one evolutionary run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub run_index: usize,
    pub seed: u64,
    pub generations: Vec<GenerationStat>,
    pub evaluations_used: usize,
    pub best_fitness: f64,
    /// Search dimension the best candidate was found at.
    pub best_coefficients: usize,
    pub best_genome: Vec<f64>,
    pub best_lengths: Vec<usize>,
    pub weights_checksum: String,
    pub wall_time_s: f64,
}

impl RunRecord {
    /// Copy with timing zeroed; two runs of the same config and seed must
    /// agree on this.
    pub fn comparable(&self) -> RunRecord {
        let mut c = self.clone();
        c.wall_time_s = 0.0;
        c
    }

    pub fn same_results(&self, other: &RunRecord) -> bool {
        self.comparable() == other.comparable()
    }

    /// Stable digest of everything but timing.
    pub fn reproducibility_digest(&self) -> String {
        format!("{:016x}", fnv1a64(self.comparable().to_jsonl().as_bytes()))
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let header = RecordLine::Run {
            run_index: self.run_index,
            seed: self.seed,
            config: self.config.clone(),
        };
        out.push_str(&serde_json::to_string(&header).expect("serializable"));
        out.push('\n');
        for g in &self.generations {
            let line = RecordLine::Generation(g.clone());
            out.push_str(&serde_json::to_string(&line).expect("serializable"));
            out.push('\n');
        }
        let summary = RecordLine::Summary(Summary {
            evaluations_used: self.evaluations_used,
            best_fitness: self.best_fitness,
            best_coefficients: self.best_coefficients,
            best_genome: self.best_genome.clone(),
            best_lengths: self.best_lengths.clone(),
            weights_checksum: self.weights_checksum.clone(),
            wall_time_s: self.wall_time_s,
        });
        out.push_str(&serde_json::to_string(&summary).expect("serializable"));
        out.push('\n');
        out
    }

    pub fn from_jsonl(text: &str) -> Result<RunRecord> {
        let mut header = None;
        let mut generations = Vec::new();
        let mut summary = None;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed: RecordLine = serde_json::from_str(line)
                .map_err(|e| Error::Config(format!("run record line {}: {e}", i + 1)))?;
            match parsed {
                RecordLine::Run {
                    run_index,
                    seed,
                    config,
                } => header = Some((run_index, seed, config)),
                RecordLine::Generation(g) => generations.push(g),
                RecordLine::Summary(s) => summary = Some(s),
            }
        }
        let (run_index, seed, config) =
            header.ok_or_else(|| Error::Config("run record missing header line".into()))?;
        let s = summary.ok_or_else(|| Error::Config("run record missing summary line".into()))?;
        Ok(RunRecord {
            config,
            run_index,
            seed,
            generations,
            evaluations_used: s.evaluations_used,
            best_fitness: s.best_fitness,
            best_coefficients: s.best_coefficients,
            best_genome: s.best_genome,
            best_lengths: s.best_lengths,
            weights_checksum: s.weights_checksum,
            wall_time_s: s.wall_time_s,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_jsonl())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RunRecord> {
        RunRecord::from_jsonl(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum RecordLine {
    Run {
        run_index: usize,
        seed: u64,
        config: ExperimentConfig,
    },
    Generation(GenerationStat),
    Summary(Summary),
}

#[derive(Serialize, Deserialize)]
struct Summary {
    evaluations_used: usize,
    best_fitness: f64,
    best_coefficients: usize,
    best_genome: Vec<f64>,
    best_lengths: Vec<usize>,
    weights_checksum: String,
    wall_time_s: f64,
}

/// FNV-1a over a byte string; stable across builds and platforms.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Checksum of a flat weight vector: FNV-1a over the little-endian bytes.
pub fn weights_checksum(flat: &[f64]) -> String {
    let mut bytes = Vec::with_capacity(flat.len() * 8);
    for v in flat {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    format!("{:016x}", fnv1a64(&bytes))
}

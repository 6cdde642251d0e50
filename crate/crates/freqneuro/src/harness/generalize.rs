//! Generalization tests for trained controllers: held-out starting
//! positions and resized arms.

use super::{record_genome, record_weights, RunRecord, SchemeChoice};
use crate::arm::{self, FitnessRule, TrialSpec};
use crate::encoding::{self, MappingScheme, SchemeName};
use crate::error::{Error, Result};

/// Order statistics of a score sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub median: f64,
    pub lower_quartile: f64,
    pub upper_quartile: f64,
    pub min: f64,
    pub max: f64,
}

/// Summary of a non-empty sample; quartiles by linear interpolation.
pub fn summary_stats(scores: &[f64]) -> SummaryStats {
    assert!(!scores.is_empty());
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    SummaryStats {
        median: quantile(&sorted, 0.5),
        lower_quartile: quantile(&sorted, 0.25),
        upper_quartile: quantile(&sorted, 0.75),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Per-run held-out-angle scores plus their summary.
#[derive(Debug, Clone)]
pub struct PositionGeneralization {
    pub per_run: Vec<f64>,
    pub summary: SummaryStats,
}

/// Re-evaluates the best network of every run on the two held-out starting
/// angles; the per-run score is the mean over the two trials.
pub fn test_generalization_positions(records: &[RunRecord]) -> Result<PositionGeneralization> {
    if records.is_empty() {
        return Err(Error::Config("no runs to evaluate".into()));
    }
    let mut per_run = Vec::with_capacity(records.len());
    for record in records {
        let config = &record.config;
        let weights = record_weights(record)?;
        let trials = arm::holdout_trials(config.compartments, &config.physics)?;
        let score = arm::evaluate(
            &weights,
            config.arch.action_mode(),
            config.compartments,
            &trials,
            &config.physics,
            FitnessRule::FinalDistance,
        )?;
        per_run.push(score);
    }
    let summary = summary_stats(&per_run);
    Ok(PositionGeneralization { per_run, summary })
}

/// One row of the arm-length generalization surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthRow {
    pub compartments: usize,
    pub indirect_median: f64,
    pub direct_median: f64,
    /// `indirect_median - direct_median`; positive where the compressed
    /// encoding generalizes better.
    pub difference: f64,
}

/// Scores one record's best network on an arm of `p` compartments.
///
/// Indirect genomes are resized through their scheme. Direct networks are
/// first encoded at full rank into the single-matrix scheme and then resized
/// the same way.
pub fn score_at_length(record: &RunRecord, p: usize) -> Result<f64> {
    let config = &record.config;
    let mode = config.arch.action_mode();
    let weights = match config.scheme {
        SchemeChoice::Direct => {
            let original = record_weights(record)?;
            let scheme = MappingScheme::build(
                SchemeName::Psi1,
                config.architecture(),
                config.compartments,
            )?;
            let genome = encoding::encode(&original, &scheme)?;
            encoding::resize(&genome, &scheme, p)?
        }
        _ => {
            let scheme = config.mapping_scheme()?.expect("indirect scheme");
            let genome = record_genome(record)?;
            encoding::resize(&genome, &scheme, p)?
        }
    };
    let trials: Vec<TrialSpec> = arm::TRAINING_ANGLES
        .iter()
        .map(|&a| TrialSpec::new(p, a, &config.physics))
        .collect::<Result<_>>()?;
    arm::evaluate(&weights, mode, p, &trials, &config.physics, FitnessRule::ClosestApproach)
}

/// Evaluates indirect and direct run sets over a range of arm lengths and
/// reports the median-score difference at each length.
pub fn test_generalization_lengths(
    indirect: &[RunRecord],
    direct: &[RunRecord],
    p_min: usize,
    p_max: usize,
) -> Result<Vec<LengthRow>> {
    if indirect.is_empty() || direct.is_empty() {
        return Err(Error::Config("need both indirect and direct runs".into()));
    }
    let mut rows = Vec::with_capacity(p_max - p_min + 1);
    for p in p_min..=p_max {
        let indirect_scores: Vec<f64> = indirect
            .iter()
            .map(|r| score_at_length(r, p))
            .collect::<Result<_>>()?;
        let direct_scores: Vec<f64> = direct
            .iter()
            .map(|r| score_at_length(r, p))
            .collect::<Result<_>>()?;
        let indirect_median = summary_stats(&indirect_scores).median;
        let direct_median = summary_stats(&direct_scores).median;
        rows.push(LengthRow {
            compartments: p,
            indirect_median,
            direct_median,
            difference: indirect_median - direct_median,
        });
    }
    Ok(rows)
}

/// Columnar text for the length-generalization surface.
pub fn format_length_rows(coefficients: usize, rows: &[LengthRow]) -> String {
    let mut out = String::from("coefficients\tcompartments\tindirect_median\tdirect_median\tdifference\n");
    for row in rows {
        out.push_str(&format!(
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}\n",
            coefficients, row.compartments, row.indirect_median, row.direct_median, row.difference
        ));
    }
    out
}

/// Columnar text for a position-generalization summary.
pub fn format_position_summary(label: &str, result: &PositionGeneralization) -> String {
    let mut out = String::new();
    for (run, score) in result.per_run.iter().enumerate() {
        out.push_str(&format!("{label}\trun_{run}\t{score:.6}\n"));
    }
    let s = &result.summary;
    out.push_str(&format!(
        "{label}\tsummary\tmedian={:.6}\tq1={:.6}\tq3={:.6}\tmin={:.6}\tmax={:.6}\n",
        s.median, s.lower_quartile, s.upper_quartile, s.min, s.max
    ));
    out
}

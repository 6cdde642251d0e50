//! Experiment orchestration: configuration, the fixed-size and incremental
//! evolution loops, and persistence of their results.

pub mod generalize;
pub mod record;

pub use record::{GenerationStat, RunRecord};

use crate::arm::{self, FitnessRule, PhysicsConfig, TrialSpec};
use crate::encoding::{
    self, ActionMode, Genome, MappingScheme, NetworkArchitecture, NetworkWeights, SchemeName,
};
use crate::error::{Error, Result};
use crate::snes::SearchDistribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use std::time::Instant;

/// Environment variable that, when set, overrides the configured base seed.
pub const SEED_ENV_VAR: &str = "FREQNEURO_SEED";

/// Network architecture selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchChoice {
    /// 8-neuron meta-action controller.
    Theta1,
    /// Raw-action controller, one neuron per control.
    Theta2,
}

impl ArchChoice {
    pub fn action_mode(self) -> ActionMode {
        match self {
            ArchChoice::Theta1 => ActionMode::Meta,
            ArchChoice::Theta2 => ActionMode::Raw,
        }
    }

    pub fn architecture(self, p: usize) -> NetworkArchitecture {
        NetworkArchitecture::for_mode(self.action_mode(), p)
    }
}

impl std::fmt::Display for ArchChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArchChoice::Theta1 => write!(f, "theta1"),
            ArchChoice::Theta2 => write!(f, "theta2"),
        }
    }
}

impl FromStr for ArchChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "theta1" | "meta" => Ok(ArchChoice::Theta1),
            "theta2" | "raw" => Ok(ArchChoice::Theta2),
            other => Err(Error::Config(format!("unknown architecture `{other}`"))),
        }
    }
}

/// Genome encoding selector: one of the mapping schemes or the direct
/// weight encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeChoice {
    Psi1,
    Psi2,
    Psi3,
    Direct,
}

impl SchemeChoice {
    pub fn scheme_name(self) -> Option<SchemeName> {
        match self {
            SchemeChoice::Psi1 => Some(SchemeName::Psi1),
            SchemeChoice::Psi2 => Some(SchemeName::Psi2),
            SchemeChoice::Psi3 => Some(SchemeName::Psi3),
            SchemeChoice::Direct => None,
        }
    }
}

impl std::fmt::Display for SchemeChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SchemeChoice::Psi1 => write!(f, "psi1"),
            SchemeChoice::Psi2 => write!(f, "psi2"),
            SchemeChoice::Psi3 => write!(f, "psi3"),
            SchemeChoice::Direct => write!(f, "direct"),
        }
    }
}

impl FromStr for SchemeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psi1" => Ok(SchemeChoice::Psi1),
            "psi2" => Ok(SchemeChoice::Psi2),
            "psi3" => Ok(SchemeChoice::Psi3),
            "direct" => Ok(SchemeChoice::Direct),
            other => Err(Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Settings for the incremental coefficient search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IncrementalConfig {
    /// Coefficient count of the first stage.
    pub start_coefficients: usize,
    /// Coefficients added between stages.
    pub step: usize,
    /// Fitness evaluations per stage.
    pub stage_budget: usize,
    /// Consecutive non-improving additions before the run ends.
    pub stagnation_window: usize,
    /// Minimum best-fitness gain that counts as improvement.
    pub improvement_epsilon: f64,
    /// Optional hard cap on the number of stages.
    pub max_stages: Option<usize>,
}

impl Default for IncrementalConfig {
    fn default() -> Self {
        Self {
            start_coefficients: 10,
            step: 10,
            stage_budget: 6000,
            stagnation_window: 6,
            improvement_epsilon: 1e-4,
            max_stages: None,
        }
    }
}

/// Everything one experiment needs; serializable so records can echo it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub arch: ArchChoice,
    pub scheme: SchemeChoice,
    /// Coefficient count; ignored for the direct encoding.
    pub coefficients: usize,
    /// Arm compartments.
    pub compartments: usize,
    /// Fitness evaluations per run.
    pub eval_budget: usize,
    /// Independent runs per setup.
    pub runs: usize,
    /// Run `k` uses seed `base_seed + k`.
    pub base_seed: u64,
    /// Worker threads for candidate evaluation; 0 uses the global pool.
    pub workers: usize,
    /// Initial per-dimension standard deviation of the search.
    pub sigma_init: f64,
    pub incremental: IncrementalConfig,
    pub physics: PhysicsConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            arch: ArchChoice::Theta1,
            scheme: SchemeChoice::Psi1,
            coefficients: 20,
            compartments: 10,
            eval_budget: 6000,
            runs: 5,
            base_seed: 42,
            workers: 0,
            sigma_init: 1.0,
            incremental: IncrementalConfig::default(),
            physics: PhysicsConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Checks the architecture/scheme pairing and basic ranges.
    pub fn validate(&self) -> Result<()> {
        if self.compartments < 1 {
            return Err(Error::NoCompartments);
        }
        if self.runs < 1 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        match (self.scheme, self.arch) {
            (SchemeChoice::Psi2, ArchChoice::Theta2) | (SchemeChoice::Psi3, ArchChoice::Theta1) => {
                return Err(Error::IncompatibleScheme {
                    scheme: self.scheme.to_string(),
                    arch: self.arch.to_string(),
                })
            }
            _ => {}
        }
        if self.scheme != SchemeChoice::Direct {
            if self.coefficients < 1 {
                return Err(Error::Config(
                    "coefficient count must be at least 1".into(),
                ));
            }
            let scheme = self.mapping_scheme()?.expect("non-direct scheme");
            if self.coefficients > scheme.total_cells() {
                return Err(Error::Config(format!(
                    "coefficient count {} exceeds scheme capacity {}",
                    self.coefficients,
                    scheme.total_cells()
                )));
            }
        }
        Ok(())
    }

    pub fn architecture(&self) -> NetworkArchitecture {
        self.arch.architecture(self.compartments)
    }

    /// The mapping scheme, or `None` for the direct encoding.
    pub fn mapping_scheme(&self) -> Result<Option<MappingScheme>> {
        match self.scheme.scheme_name() {
            Some(name) => Ok(Some(MappingScheme::build(
                name,
                self.architecture(),
                self.compartments,
            )?)),
            None => Ok(None),
        }
    }

    /// Weight count of the target architecture.
    pub fn weight_total(&self) -> usize {
        self.architecture().weight_total()
    }

    /// `weights : coefficients`, the headline compression number.
    pub fn compression_ratio(&self) -> f64 {
        match self.scheme {
            SchemeChoice::Direct => 1.0,
            _ => self.weight_total() as f64 / self.coefficients as f64,
        }
    }

    pub fn training_trials(&self) -> Result<Vec<TrialSpec>> {
        arm::training_trials(self.compartments, &self.physics)
    }

    pub fn seed_for_run(&self, run_index: usize) -> u64 {
        self.base_seed.wrapping_add(run_index as u64)
    }

    /// Applies any `FREQNEURO_SEED` override from the environment.
    pub fn apply_env_seed(&mut self) -> Result<()> {
        if let Ok(value) = std::env::var(SEED_ENV_VAR) {
            self.base_seed = value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV_VAR}: bad seed `{value}`")))?;
        }
        Ok(())
    }

    /// Overrides this config with every key present in a TOML config file.
    /// The `physics` and `incremental` tables override as whole blocks.
    pub fn apply_config_file(&mut self, text: &str) -> Result<()> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))?;
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = file.$field {
                    self.$field = v;
                }
            };
        }
        take!(arch);
        take!(scheme);
        take!(coefficients);
        take!(compartments);
        take!(eval_budget);
        take!(runs);
        take!(base_seed);
        take!(workers);
        take!(sigma_init);
        take!(incremental);
        take!(physics);
        Ok(())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    arch: Option<ArchChoice>,
    scheme: Option<SchemeChoice>,
    coefficients: Option<usize>,
    compartments: Option<usize>,
    eval_budget: Option<usize>,
    runs: Option<usize>,
    base_seed: Option<u64>,
    workers: Option<usize>,
    sigma_init: Option<f64>,
    incremental: Option<IncrementalConfig>,
    physics: Option<PhysicsConfig>,
}

/// How candidate vectors become networks.
enum Decoder<'a> {
    Direct(NetworkArchitecture),
    Scheme(&'a MappingScheme, Vec<usize>),
}

impl Decoder<'_> {
    fn decode(&self, candidate: &[f64]) -> Result<NetworkWeights> {
        match self {
            Decoder::Direct(arch) => NetworkWeights::from_flat(arch, candidate),
            Decoder::Scheme(scheme, lengths) => {
                let genome = Genome::new(candidate.to_vec(), lengths.clone())?;
                encoding::decode(&genome, scheme)
            }
        }
    }
}

fn run_pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool")
            .install(f)
    }
}

/// Evaluates every candidate of a population in parallel, preserving order.
fn evaluate_population(
    candidates: &[Vec<f64>],
    decoder: &Decoder<'_>,
    mode: ActionMode,
    p: usize,
    trials: &[TrialSpec],
    physics: &PhysicsConfig,
    workers: usize,
) -> Result<Vec<f64>> {
    run_pool(workers, || {
        candidates
            .par_iter()
            .map(|candidate| {
                let weights = decoder.decode(candidate)?;
                arm::evaluate(&weights, mode, p, trials, physics, FitnessRule::FinalDistance)
            })
            .collect()
    })
}

struct LoopState {
    evaluations: usize,
    generation: usize,
    best_fitness: f64,
    best_candidate: Vec<f64>,
    best_lengths: Vec<usize>,
    best_dimension: usize,
    stats: Vec<GenerationStat>,
}

impl LoopState {
    fn new() -> Self {
        Self {
            evaluations: 0,
            generation: 0,
            best_fitness: f64::NEG_INFINITY,
            best_candidate: Vec::new(),
            best_lengths: Vec::new(),
            best_dimension: 0,
            stats: Vec::new(),
        }
    }
}

/// Runs one ask/evaluate/tell loop until the evaluation budget is spent.
#[allow(clippy::too_many_arguments)]
fn run_loop(
    dist: &mut SearchDistribution,
    decoder: &Decoder<'_>,
    config: &ExperimentConfig,
    trials: &[TrialSpec],
    budget: usize,
    lengths: &[usize],
    state: &mut LoopState,
) -> Result<()> {
    let mode = config.arch.action_mode();
    let p = config.compartments;
    let spent_before = state.evaluations;
    while state.evaluations - spent_before < budget {
        let population = dist.ask();
        let fitnesses = evaluate_population(
            population.candidates(),
            decoder,
            mode,
            p,
            trials,
            &config.physics,
            config.workers,
        )?;
        state.evaluations += population.len();
        state.generation += 1;
        let mut generation_best = f64::NEG_INFINITY;
        for (candidate, &fitness) in population.candidates().iter().zip(&fitnesses) {
            generation_best = generation_best.max(fitness);
            if fitness > state.best_fitness {
                state.best_fitness = fitness;
                state.best_candidate = candidate.clone();
                state.best_lengths = lengths.to_vec();
                state.best_dimension = candidate.len();
            }
        }
        dist.tell(&population, &fitnesses, true)?;
        state.stats.push(GenerationStat {
            generation: state.generation,
            evaluations: state.evaluations,
            coefficients: dist.dim(),
            generation_best,
            best_so_far: state.best_fitness,
        });
    }
    Ok(())
}

fn finish_record(
    config: &ExperimentConfig,
    run_index: usize,
    seed: u64,
    state: LoopState,
    decoder: &Decoder<'_>,
    started: Instant,
) -> Result<RunRecord> {
    let weights = decoder.decode(&state.best_candidate)?;
    Ok(RunRecord {
        config: config.clone(),
        run_index,
        seed,
        generations: state.stats,
        evaluations_used: state.evaluations,
        best_fitness: state.best_fitness,
        best_coefficients: state.best_dimension,
        best_genome: state.best_candidate,
        best_lengths: state.best_lengths,
        weights_checksum: record::weights_checksum(&weights.to_flat()),
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// One fixed-dimension evolutionary run.
pub fn run_evolution(config: &ExperimentConfig, run_index: usize) -> Result<RunRecord> {
    config.validate()?;
    let started = Instant::now();
    let seed = config.seed_for_run(run_index);
    let trials = config.training_trials()?;
    let scheme = config.mapping_scheme()?;

    let (decoder, dim, lengths) = match &scheme {
        None => {
            let arch = config.architecture();
            let dim = arch.weight_total();
            (Decoder::Direct(arch), dim, vec![dim])
        }
        Some(scheme) => {
            let layout = Genome::distribute(config.coefficients, scheme)?;
            let lengths = layout.chromosome_lengths().to_vec();
            (
                Decoder::Scheme(scheme, lengths.clone()),
                config.coefficients,
                lengths,
            )
        }
    };

    let mut dist =
        SearchDistribution::with_init(vec![0.0; dim], vec![config.sigma_init; dim], seed)?;
    let mut state = LoopState::new();
    run_loop(
        &mut dist,
        &decoder,
        config,
        &trials,
        config.eval_budget,
        &lengths,
        &mut state,
    )?;
    finish_record(config, run_index, seed, state, &decoder, started)
}

/// One incremental coefficient-search run: stages of `stage_budget`
/// evaluations, growing the genome by `step` coefficients between stages,
/// stopping after `stagnation_window` consecutive non-improving additions
/// (or at genome capacity).
pub fn run_incremental(config: &ExperimentConfig, run_index: usize) -> Result<RunRecord> {
    config.validate()?;
    let scheme = config
        .mapping_scheme()?
        .ok_or_else(|| Error::Config("incremental search needs an indirect scheme".into()))?;
    let started = Instant::now();
    let seed = config.seed_for_run(run_index);
    let trials = config.training_trials()?;
    let inc = &config.incremental;

    let mut layout = Genome::distribute(inc.start_coefficients.min(scheme.total_cells()), &scheme)?;
    let mut dist = SearchDistribution::with_init(
        vec![0.0; layout.len()],
        vec![config.sigma_init; layout.len()],
        seed,
    )?;
    let mut state = LoopState::new();
    let mut stagnant_additions = 0;
    let mut stage = 0;

    loop {
        stage += 1;
        let before = state.best_fitness;
        {
            let decoder = Decoder::Scheme(&scheme, layout.chromosome_lengths().to_vec());
            run_loop(
                &mut dist,
                &decoder,
                config,
                &trials,
                inc.stage_budget,
                layout.chromosome_lengths(),
                &mut state,
            )?;
        }
        if stage > 1 {
            if state.best_fitness > before + inc.improvement_epsilon {
                stagnant_additions = 0;
            } else {
                stagnant_additions += 1;
            }
            if stagnant_additions >= inc.stagnation_window {
                break;
            }
        }
        if let Some(max) = inc.max_stages {
            if stage >= max {
                break;
            }
        }

        // Grow the genome layout and the search distribution in lockstep:
        // new dimensions start at mean zero with the initial deviation.
        let mean_genome = Genome::new(dist.mean().to_vec(), layout.chromosome_lengths().to_vec())?;
        let grown = match encoding::add_coefficients(&mean_genome, &scheme, inc.step) {
            Ok(g) => g,
            Err(Error::GenomeAtCapacity) => break,
            Err(e) => return Err(e),
        };
        let positions = inserted_positions(layout.chromosome_lengths(), grown.chromosome_lengths());
        dist.grow(&positions, config.sigma_init)?;
        debug_assert_eq!(dist.mean(), grown.coefficients());
        layout = grown;
    }

    let decoder = Decoder::Scheme(&scheme, state.best_lengths.clone());
    finish_record(config, run_index, seed, state, &decoder, started)
}

/// Indices (in the grown vector) of the coefficients added to each
/// chromosome block.
fn inserted_positions(old: &[usize], new: &[usize]) -> Vec<usize> {
    let mut positions = Vec::new();
    let mut offset = 0;
    for (&old_len, &new_len) in old.iter().zip(new) {
        positions.extend(offset + old_len..offset + new_len);
        offset += new_len;
    }
    positions
}

/// Runs every run of the configured setup, saving records and genomes into
/// `out_dir` when given. Returns the records.
pub fn run_setup(
    config: &ExperimentConfig,
    incremental: bool,
    out_dir: Option<&std::path::Path>,
) -> Result<Vec<RunRecord>> {
    config.validate()?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let echo = toml::to_string_pretty(config)
            .map_err(|e| Error::Config(format!("config echo: {e}")))?;
        std::fs::write(dir.join("config.toml"), echo)?;
    }
    let mut records = Vec::with_capacity(config.runs);
    for run_index in 0..config.runs {
        let record = if incremental {
            run_incremental(config, run_index)?
        } else {
            run_evolution(config, run_index)?
        };
        if let Some(dir) = out_dir {
            record.save(&dir.join(format!("run_{run_index}.jsonl")))?;
            save_genome_file(&record, &dir.join(format!("run_{run_index}.genome")))?;
        }
        records.push(record);
    }
    if let Some(dir) = out_dir {
        std::fs::write(dir.join("summary.tsv"), summary_table(&records))?;
    }
    Ok(records)
}

/// Writes the best genome of a run in the genome file format.
pub fn save_genome_file(record: &RunRecord, path: &std::path::Path) -> Result<()> {
    use crate::encoding::io::{self, EncodingName};
    let genome = Genome::new(record.best_genome.clone(), record.best_lengths.clone())?;
    let encoding = match record.config.scheme.scheme_name() {
        Some(name) => EncodingName::Scheme(name),
        None => EncodingName::Direct,
    };
    io::write_genome_file(
        path,
        &genome,
        encoding,
        record.config.compartments,
        record.config.arch.action_mode(),
    )
}

/// Tab-separated per-run summary: one row per run plus a median row.
pub fn summary_table(records: &[RunRecord]) -> String {
    let mut out = String::from(
        "run\tseed\tdimension\tbest_fitness\tevaluations\tweights_checksum\twall_time_s\n",
    );
    for r in records {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.6}\t{}\t{}\t{:.3}\n",
            r.run_index,
            r.seed,
            r.best_coefficients,
            r.best_fitness,
            r.evaluations_used,
            r.weights_checksum,
            r.wall_time_s
        ));
    }
    let mut best: Vec<f64> = records.iter().map(|r| r.best_fitness).collect();
    best.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    if !best.is_empty() {
        out.push_str(&format!("# median_best_fitness\t{:.6}\n", median(&best)));
    }
    out
}

/// Median of an already sorted slice.
pub fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Reconstructs the best genome of a run.
pub fn record_genome(record: &RunRecord) -> Result<Genome> {
    Genome::new(record.best_genome.clone(), record.best_lengths.clone())
}

/// Reconstructs the best network of a run at its training size.
pub fn record_weights(record: &RunRecord) -> Result<NetworkWeights> {
    let genome = record_genome(record)?;
    match record.config.mapping_scheme()? {
        Some(scheme) => encoding::decode(&genome, &scheme),
        None => NetworkWeights::from_flat(&record.config.architecture(), genome.coefficients()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk_config() -> ExperimentConfig {
        ExperimentConfig {
            arch: ArchChoice::Theta1,
            scheme: SchemeChoice::Psi1,
            coefficients: 8,
            compartments: 3,
            eval_budget: 40,
            runs: 2,
            base_seed: 7,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn config_validation_rejects_bad_pairings() {
        let mut config = desk_config();
        config.scheme = SchemeChoice::Psi3;
        assert!(matches!(
            config.validate(),
            Err(Error::IncompatibleScheme { .. })
        ));
        config.arch = ArchChoice::Theta2;
        assert!(config.validate().is_ok());
        config.scheme = SchemeChoice::Psi2;
        assert!(config.validate().is_err());
    }

    #[test]
    fn config_file_overrides_present_keys_only() {
        let mut config = desk_config();
        config
            .apply_config_file("coefficients = 12\nbase_seed = 99\n")
            .unwrap();
        assert_eq!(config.coefficients, 12);
        assert_eq!(config.base_seed, 99);
        // Untouched keys keep their flag-derived values.
        assert_eq!(config.compartments, 3);
        assert_eq!(config.eval_budget, 40);
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let mut config = desk_config();
        assert!(config.apply_config_file("coefficinets = 12\n").is_err());
    }

    #[test]
    fn direct_dimension_is_the_weight_total() {
        let mut config = desk_config();
        config.scheme = SchemeChoice::Direct;
        config.compartments = 10;
        assert_eq!(config.weight_total(), 728);
        config.arch = ArchChoice::Theta2;
        assert_eq!(config.weight_total(), 3680);
    }

    #[test]
    fn compression_ratio_is_reported() {
        let mut config = desk_config();
        config.arch = ArchChoice::Theta2;
        config.scheme = SchemeChoice::Psi3;
        config.compartments = 10;
        config.coefficients = 20;
        assert_eq!(config.compression_ratio(), 184.0);
    }

    #[test]
    fn evolution_respects_budget_and_monotone_best() {
        let config = desk_config();
        let record = run_evolution(&config, 0).unwrap();
        let lambda = crate::snes::population_size(8).unwrap();
        assert!(record.evaluations_used <= config.eval_budget + lambda - 1);
        assert!(record
            .generations
            .windows(2)
            .all(|w| w[0].best_so_far <= w[1].best_so_far));
        assert!(record.best_fitness.is_finite());
        assert_eq!(record.best_genome.len(), 8);
    }

    #[test]
    fn identical_seeds_reproduce_records() {
        let config = desk_config();
        let a = run_evolution(&config, 1).unwrap();
        let b = run_evolution(&config, 1).unwrap();
        assert!(a.same_results(&b));
        assert_eq!(a.reproducibility_digest(), b.reproducibility_digest());
    }

    #[test]
    fn record_jsonl_round_trips() {
        let config = desk_config();
        let record = run_evolution(&config, 0).unwrap();
        let text = record.to_jsonl();
        let back = RunRecord::from_jsonl(&text).unwrap();
        assert_eq!(record, back);
    }

    #[test]
    fn incremental_stagnation_rule_counts_additions() {
        // With a tiny scheme and a flat-ish fitness landscape the counter
        // advances every stage after the first; stage budgets of one
        // generation keep it fast.
        let mut config = desk_config();
        config.compartments = 3;
        config.incremental = IncrementalConfig {
            start_coefficients: 4,
            step: 4,
            stage_budget: 1,
            stagnation_window: 3,
            improvement_epsilon: 2.0, // nothing ever counts as improvement
            max_stages: None,
        };
        let record = run_incremental(&config, 0).unwrap();
        // Stage 1 plus exactly `stagnation_window` non-improving additions.
        let final_dim = record.generations.last().unwrap().coefficients;
        assert_eq!(final_dim, 4 + 3 * 4);
    }

    #[test]
    fn incremental_extends_dimensions_with_zero_mean() {
        let mut config = desk_config();
        config.incremental = IncrementalConfig {
            start_coefficients: 4,
            step: 3,
            stage_budget: 1,
            stagnation_window: 2,
            improvement_epsilon: 2.0,
            max_stages: Some(2),
        };
        let record = run_incremental(&config, 0).unwrap();
        assert_eq!(record.generations.last().unwrap().coefficients, 7);
    }

    #[test]
    fn inserted_positions_follow_chromosome_blocks() {
        // Lengths (4,3,3) -> (7,7,6): chromosome blocks land at offsets
        // 0, 7 and 14 of the grown vector.
        let positions = inserted_positions(&[4, 3, 3], &[7, 7, 6]);
        assert_eq!(positions, vec![4, 5, 6, 10, 11, 12, 13, 17, 18, 19]);
    }

    #[test]
    fn env_seed_overrides_config() {
        let mut config = desk_config();
        std::env::set_var(SEED_ENV_VAR, "1234");
        config.apply_env_seed().unwrap();
        std::env::remove_var(SEED_ENV_VAR);
        assert_eq!(config.base_seed, 1234);
    }
}

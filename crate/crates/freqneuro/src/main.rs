use clap::{Args, Parser, Subcommand};
use freqneuro::arm::{self, FitnessRule};
use freqneuro::encoding::io::{self, EncodingName};
use freqneuro::encoding::{self, MappingScheme, NetworkWeights, SchemeName};
use freqneuro::harness::{
    self, generalize, ArchChoice, ExperimentConfig, RunRecord, SchemeChoice,
};
use freqneuro::ordering;
use freqneuro::{selftest, Error};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Frequency-domain neuroevolution toolkit: DCT-compressed recurrent
/// network genomes evolved with separable NES on a 2D muscled-arm task.
#[derive(Parser)]
#[command(name = "freqneuro", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Network architecture: theta1 (meta-actions) or theta2 (raw actions).
    #[arg(long, default_value = "theta1")]
    arch: ArchChoice,
    /// Genome encoding: psi1, psi2, psi3, or direct.
    #[arg(long, default_value = "psi1")]
    scheme: SchemeChoice,
    /// Coefficient count (ignored for the direct encoding).
    #[arg(long, default_value_t = 20)]
    coeffs: usize,
    /// Arm compartments.
    #[arg(long, default_value_t = 10)]
    p: usize,
    /// Fitness evaluations per run (per stage for incremental runs).
    #[arg(long, default_value_t = 6000)]
    budget: usize,
    /// Independent runs.
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// Base seed; run k uses seed + k. FREQNEURO_SEED overrides.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads for candidate evaluation (0 = default pool).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory for records, genomes and summaries.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file; keys present in it override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ExperimentArgs {
    fn build(&self) -> Result<ExperimentConfig, Error> {
        let mut config = ExperimentConfig {
            arch: self.arch,
            scheme: self.scheme,
            coefficients: self.coeffs,
            compartments: self.p,
            eval_budget: self.budget,
            runs: self.runs,
            base_seed: self.seed,
            workers: self.workers,
            ..ExperimentConfig::default()
        };
        if let Some(path) = &self.config {
            config.apply_config_file(&std::fs::read_to_string(path)?)?;
        }
        config.apply_env_seed()?;
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evolve controllers with a fixed genome size.
    Evolve {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Dump best-network trajectories per training trial (needs --out).
        #[arg(long)]
        dump_trajectories: bool,
    },
    /// Incremental coefficient search: grow the genome until fitness
    /// stagnates.
    Incremental {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Coefficients in the first stage.
        #[arg(long, default_value_t = 10)]
        start_coeffs: usize,
        /// Coefficients added between stages.
        #[arg(long, default_value_t = 10)]
        step: usize,
        /// Consecutive non-improving additions before stopping.
        #[arg(long, default_value_t = 6)]
        stagnation_window: usize,
    },
    /// Decode a genome file against a different arm size.
    Resize {
        /// Genome file to resize.
        #[arg(long)]
        genome: PathBuf,
        /// Target compartment count.
        #[arg(long)]
        p: usize,
        /// Where to write the decoded weights.
        #[arg(long)]
        out_weights: PathBuf,
        /// Optional re-headered genome for the new arm size.
        #[arg(long)]
        out_genome: Option<PathBuf>,
    },
    /// Re-evaluate trained runs on the held-out starting angles.
    GenPos {
        /// Run directories produced by `evolve` (repeatable).
        #[arg(long = "runs", required = true)]
        run_dirs: Vec<PathBuf>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score trained runs across arm lengths; emits the indirect-vs-direct
    /// median score surface.
    GenLen {
        /// Directory with indirect-encoding runs.
        #[arg(long)]
        indirect: PathBuf,
        /// Directory with direct-encoding runs.
        #[arg(long)]
        direct: PathBuf,
        #[arg(long, default_value_t = 3)]
        p_min: usize,
        #[arg(long, default_value_t = 20)]
        p_max: usize,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the coefficient importance order for the given array extents.
    Order {
        /// Comma-separated extents, e.g. 3,4 or 8,11,3,11.
        #[arg(long)]
        dims: String,
    },
    /// Run the built-in oracle suite.
    Selftest,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Evolve {
            experiment,
            dump_trajectories,
        } => {
            let config = experiment.build()?;
            announce(&config, false);
            let records = harness::run_setup(&config, false, experiment.out.as_deref())?;
            report_runs(&records);
            if dump_trajectories {
                let dir = experiment
                    .out
                    .as_deref()
                    .ok_or_else(|| Error::Config("--dump-trajectories needs --out".into()))?;
                dump_all_trajectories(&records, dir)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Incremental {
            experiment,
            start_coeffs,
            step,
            stagnation_window,
        } => {
            let mut config = experiment.build()?;
            config.incremental.start_coefficients = start_coeffs;
            config.incremental.step = step;
            config.incremental.stagnation_window = stagnation_window;
            config.incremental.stage_budget = config.eval_budget;
            announce(&config, true);
            let records = harness::run_setup(&config, true, experiment.out.as_deref())?;
            report_runs(&records);
            for r in &records {
                println!(
                    "run {}: best fitness {:.4} at {} coefficients",
                    r.run_index, r.best_fitness, r.best_coefficients
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Resize {
            genome,
            p,
            out_weights,
            out_genome,
        } => {
            resize_command(&genome, p, &out_weights, out_genome.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::GenPos { run_dirs, out } => {
            let mut report = String::new();
            for dir in &run_dirs {
                let records = load_records(dir)?;
                let result = generalize::test_generalization_positions(&records)?;
                let label = dir
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| dir.display().to_string());
                report.push_str(&generalize::format_position_summary(&label, &result));
            }
            emit(out.as_deref(), &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::GenLen {
            indirect,
            direct,
            p_min,
            p_max,
            out,
        } => {
            let indirect_records = load_records(&indirect)?;
            let direct_records = load_records(&direct)?;
            let rows = generalize::test_generalization_lengths(
                &indirect_records,
                &direct_records,
                p_min,
                p_max,
            )?;
            let coeffs = indirect_records[0].config.coefficients;
            emit(out.as_deref(), &generalize::format_length_rows(coeffs, &rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Order { dims } => {
            let dims: Vec<usize> = dims
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("bad extent `{t}`")))
                })
                .collect::<Result<_, _>>()?;
            let order = ordering::simplex_order(&dims)?;
            for cell in order.sequence() {
                let coords: Vec<String> = cell.iter().map(|c| c.to_string()).collect();
                println!("({})", coords.join(", "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest => {
            let failures = selftest::run_all();
            if failures == 0 {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn announce(config: &ExperimentConfig, incremental: bool) {
    let dim = match config.scheme {
        SchemeChoice::Direct => config.weight_total(),
        _ if incremental => config.incremental.start_coefficients,
        _ => config.coefficients,
    };
    println!(
        "{} {} p={} dim={} weights={} compression={:.1}:1 budget={} runs={} seed={}",
        config.arch,
        config.scheme,
        config.compartments,
        dim,
        config.weight_total(),
        config.compression_ratio(),
        config.eval_budget,
        config.runs,
        config.base_seed
    );
}

fn report_runs(records: &[RunRecord]) {
    print!("{}", harness::summary_table(records));
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_records(dir: &Path) -> Result<Vec<RunRecord>, Error> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|e| e == "jsonl")
                && p.file_name()
                    .is_some_and(|n| n.to_string_lossy().starts_with("run_"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Config(format!(
            "no run_*.jsonl records in {}",
            dir.display()
        )));
    }
    paths.iter().map(|p| RunRecord::load(p)).collect()
}

fn resize_command(
    genome_path: &Path,
    p: usize,
    out_weights: &Path,
    out_genome: Option<&Path>,
) -> Result<(), Error> {
    let file = io::read_genome_file(genome_path)?;
    let mode = file.action_mode;
    let (weights, resized_genome) = match file.encoding {
        EncodingName::Direct => {
            // Direct genomes hold raw weights: move them through the
            // frequency domain via the single-matrix scheme, then resize.
            let arch = encoding::NetworkArchitecture::for_mode(mode, file.compartments);
            let original = NetworkWeights::from_flat(&arch, file.genome.coefficients())?;
            let scheme = MappingScheme::build(SchemeName::Psi1, arch, file.compartments)?;
            let full = encoding::encode(&original, &scheme)?;
            let weights = encoding::resize(&full, &scheme, p)?;
            let flat = weights.to_flat();
            let lengths = vec![flat.len()];
            (weights, encoding::Genome::new(flat, lengths)?)
        }
        EncodingName::Scheme(name) => {
            let arch = encoding::NetworkArchitecture::for_mode(mode, file.compartments);
            let scheme = MappingScheme::build(name, arch, file.compartments)?;
            let weights = encoding::resize(&file.genome, &scheme, p)?;
            (weights, file.genome.clone())
        }
    };
    io::write_weights_file(out_weights, &weights)?;
    println!(
        "decoded {} -> {} neurons x {} inputs at p={}",
        genome_path.display(),
        weights.neurons(),
        weights.inputs(),
        p
    );
    if let Some(path) = out_genome {
        io::write_genome_file(path, &resized_genome, file.encoding, p, mode)?;
    }
    Ok(())
}

fn dump_all_trajectories(records: &[RunRecord], dir: &Path) -> Result<(), Error> {
    for record in records {
        let config = &record.config;
        let weights = harness::record_weights(record)?;
        let trials = config.training_trials()?;
        for (t_idx, trial) in trials.iter().enumerate() {
            let mut trace = Vec::new();
            arm::run_trial(
                &weights,
                config.arch.action_mode(),
                config.compartments,
                trial,
                &config.physics,
                FitnessRule::FinalDistance,
                Some(&mut trace),
            )?;
            let mut text = String::new();
            for (step, tip_x, tip_y, d) in &trace {
                text.push_str(&format!("{step} {tip_x:.6} {tip_y:.6} {step} {d:.6}\n"));
            }
            let path = dir.join(format!("run_{}_trial_{}.traj", record.run_index, t_idx));
            std::fs::write(path, text)?;
        }
    }
    Ok(())
}

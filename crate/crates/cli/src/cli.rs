//! Flag definitions. Every experiment flag is optional here so that the
//! environment and the config file can fill it in; defaults are applied when
//! the command resolves its [`Settings`](crate::settings::Settings).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "iteqd", version, about = "Behavior-performance maps and trial-and-error adaptation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create, inspect or export behavior-performance maps.
    #[command(subcommand)]
    Map(MapCommand),
    /// Adapt to a damage condition using a map.
    #[command(subcommand)]
    Adapt(AdaptCommand),
    /// Compare IT&E with its knockout variants.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Behavior descriptors of recorded trajectories.
    #[command(subcommand)]
    Descriptors(DescriptorsCommand),
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum MapCommand {
    /// Run MAP-Elites and write the archive.
    Create(MapCreateArgs),
    /// Print filled-cell count and performance statistics.
    Stats(MapFileArgs),
    /// Write one CSV row per filled cell.
    Export(MapExportArgs),
}

#[derive(Debug, Subcommand)]
pub enum AdaptCommand {
    Run(AdaptRunArgs),
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    Variants(BenchVariantsArgs),
}

#[derive(Debug, Subcommand)]
pub enum DescriptorsCommand {
    Compute(DescriptorsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Arm,
    Synthetic,
    Trajectory,
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "arm" => Ok(Task::Arm),
            "synthetic" => Ok(Task::Synthetic),
            "trajectory" => Ok(Task::Trajectory),
            _ => Err(format!("unknown task `{s}` (arm, synthetic, trajectory)")),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Arm => "arm",
            Task::Synthetic => "synthetic",
            Task::Trajectory => "trajectory",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    Polynomial,
    Discrete,
}

impl FromStr for MutationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "polynomial" => Ok(MutationKind::Polynomial),
            "discrete" => Ok(MutationKind::Discrete),
            _ => Err(format!("unknown mutation `{s}` (polynomial, discrete)")),
        }
    }
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MutationKind::Polynomial => "polynomial",
            MutationKind::Discrete => "discrete",
        })
    }
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// key=value settings file; flags and ITEQD_* variables take precedence.
    #[arg(long, env = "ITEQD_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MapCreateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, env = "ITEQD_TASK")]
    pub task: Option<Task>,
    /// Total evaluations, including the random initial ones.
    #[arg(long, env = "ITEQD_ITERATIONS")]
    pub iterations: Option<u64>,
    #[arg(long, env = "ITEQD_INIT_RANDOM")]
    pub init_random: Option<u64>,
    #[arg(long, env = "ITEQD_MUTATION")]
    pub mutation: Option<MutationKind>,
    /// Per-parameter mutation probability.
    #[arg(long, env = "ITEQD_MUTATION_RATE")]
    pub mutation_rate: Option<f64>,
    /// Polynomial mutation distribution index.
    #[arg(long, env = "ITEQD_ETA_M")]
    pub eta_m: Option<f64>,
    /// Discrete mutation levels.
    #[arg(long, env = "ITEQD_LEVELS")]
    pub levels: Option<usize>,
    /// Descriptor dimensions of the synthetic task.
    #[arg(long, env = "ITEQD_SYNTHETIC_DIMS")]
    pub synthetic_dims: Option<usize>,
    /// Genome length of the synthetic task.
    #[arg(long, env = "ITEQD_SYNTHETIC_GENOME_LEN")]
    pub synthetic_genome_len: Option<usize>,
    /// Bins per dimension for the synthetic task.
    #[arg(long, env = "ITEQD_BINS")]
    pub bins: Option<usize>,
    #[arg(long, env = "ITEQD_SEED")]
    pub seed: Option<u64>,
    /// Evaluation threads; 1 is the reproducible serial mode.
    #[arg(long, env = "ITEQD_WORKERS")]
    pub workers: Option<usize>,
    /// Evaluations between progress lines.
    #[arg(long, env = "ITEQD_CHECKPOINT_EVERY")]
    pub checkpoint_every: Option<u64>,
    /// Archive file to write.
    #[arg(long, env = "ITEQD_OUT")]
    pub out: Option<PathBuf>,
    /// Progress JSONL; defaults to `<out>.progress.jsonl`.
    #[arg(long, env = "ITEQD_PROGRESS")]
    pub progress: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MapFileArgs {
    pub archive: PathBuf,
}

#[derive(Debug, Args)]
pub struct MapExportArgs {
    pub archive: PathBuf,
    /// CSV file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdaptRunArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, env = "ITEQD_ARCHIVE")]
    pub archive: Option<PathBuf>,
    #[arg(long, env = "ITEQD_TASK")]
    pub task: Option<Task>,
    /// Damage file with `joint,condition,angle_rad` rows.
    #[arg(long, env = "ITEQD_DAMAGE", conflicts_with = "damage_case")]
    pub damage: Option<PathBuf>,
    /// Named condition from the built-in damage suite, e.g. `c1_j1_stuck_45`.
    #[arg(long, env = "ITEQD_DAMAGE_CASE")]
    pub damage_case: Option<String>,
    #[arg(long, env = "ITEQD_BIN_X", allow_negative_numbers = true)]
    pub bin_x: Option<f64>,
    #[arg(long, env = "ITEQD_BIN_Y", allow_negative_numbers = true)]
    pub bin_y: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Stop once a trial lands within this distance of the bin (arm only).
    #[arg(long, env = "ITEQD_TARGET_RADIUS")]
    pub target_radius: Option<f64>,
    /// Clamp measurements below this value.
    #[arg(long, env = "ITEQD_FLOOR", allow_negative_numbers = true)]
    pub floor: Option<f64>,
    /// Adapt only if the map's best controller falls this far below its
    /// predicted performance on the damaged system.
    #[arg(long, env = "ITEQD_TRIGGER_DROP")]
    pub trigger_drop: Option<f64>,
    #[arg(long, env = "ITEQD_SEED")]
    pub seed: Option<u64>,
    /// Label for the summary row; defaults to the archive file stem.
    #[arg(long, env = "ITEQD_MAP_ID")]
    pub map_id: Option<String>,
    /// Trial log (JSONL).
    #[arg(long, env = "ITEQD_LOG")]
    pub log: Option<PathBuf>,
    /// Summary CSV.
    #[arg(long, env = "ITEQD_SUMMARY")]
    pub summary: Option<PathBuf>,
}

/// Gaussian-process and acquisition settings.
#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, env = "ITEQD_KAPPA")]
    pub kappa: Option<f64>,
    #[arg(long, env = "ITEQD_ALPHA")]
    pub alpha: Option<f64>,
    /// Enable the `best >= alpha * max mu` stop rule.
    #[arg(long, env = "ITEQD_ALPHA_STOP")]
    pub alpha_stop: Option<bool>,
    #[arg(long, env = "ITEQD_NOISE_VAR")]
    pub noise_var: Option<f64>,
    /// Kernel length scale.
    #[arg(long, env = "ITEQD_RHO")]
    pub rho: Option<f64>,
    #[arg(long, env = "ITEQD_MAX_TRIALS")]
    pub max_trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchVariantsArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Existing arm archives; when none are given, `--maps` maps are created.
    #[arg(long = "archive")]
    pub archives: Vec<PathBuf>,
    #[arg(long, env = "ITEQD_MAPS")]
    pub maps: Option<usize>,
    /// Evaluations per created map.
    #[arg(long, env = "ITEQD_ITERATIONS")]
    pub iterations: Option<u64>,
    /// Comma-separated suite conditions; defaults to the first five.
    #[arg(long, env = "ITEQD_DAMAGE_CASES")]
    pub damage_cases: Option<String>,
    /// Comma-separated variants; defaults to all six.
    #[arg(long, env = "ITEQD_VARIANTS")]
    pub variants: Option<String>,
    /// Repetitions of every (map, damage) pair.
    #[arg(long, env = "ITEQD_RUNS")]
    pub runs: Option<usize>,
    /// Trials per run.
    #[arg(long, env = "ITEQD_BUDGET")]
    pub budget: Option<usize>,
    /// Multiplicative measurement noise.
    #[arg(long, env = "ITEQD_NOISE")]
    pub noise: Option<bool>,
    #[arg(long, env = "ITEQD_BIN_X", allow_negative_numbers = true)]
    pub bin_x: Option<f64>,
    #[arg(long, env = "ITEQD_BIN_Y", allow_negative_numbers = true)]
    pub bin_y: Option<f64>,
    #[arg(long, env = "ITEQD_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "ITEQD_WORKERS")]
    pub workers: Option<usize>,
    /// Summary CSV.
    #[arg(long, env = "ITEQD_OUT")]
    pub out: Option<PathBuf>,
    /// Per-trial JSONL of every run.
    #[arg(long, env = "ITEQD_RAW")]
    pub raw: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DescriptorsArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Trajectory CSV.
    #[arg(long, env = "ITEQD_TRAJ")]
    pub traj: Option<PathBuf>,
    /// Descriptor name, or `random` for a random six-component basis.
    #[arg(long, env = "ITEQD_KIND")]
    pub kind: Option<String>,
    /// Seed of the random basis.
    #[arg(long, env = "ITEQD_BASIS_SEED")]
    pub basis_seed: Option<u64>,
    /// Seconds between trajectory rows.
    #[arg(long, env = "ITEQD_TIMESTEP")]
    pub timestep: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, env = "ITEQD_OUT")]
    pub out: Option<PathBuf>,
}

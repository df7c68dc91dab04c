use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "subshift", version, about = "Toeplitz skeletons, universal subshifts and simulation certificates")]
pub struct Cli {
    /// TOML file of defaults; keys mirror long flags of the chosen subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate or check skeleton words (letters L, R, 0, 1).
    #[command(subcommand)]
    Skeleton(SkeletonCmd),
    /// Build universal bundles and read their layers.
    #[command(subcommand)]
    Universal(UniversalCmd),
    /// Dovetail simulation checks and print one JSON line per claim.
    Certify(CertifyArgs),
    /// Stream codings of subshifts and configurations.
    #[command(subcommand)]
    Codec(CodecCmd),
    /// Modulus of continuity of an operator on a subshift.
    Modulus(ModulusArgs),
    /// Words of a given length in a subshift's language.
    Lang(LangArgs),
}

#[derive(Debug, Subcommand)]
pub enum SkeletonCmd {
    /// One period of the depth-`depth` skeleton.
    Gen {
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        depth: Option<usize>,
        /// Coding bits as hex, layer 1 first, most significant bit first.
        #[arg(long)]
        bits: Option<String>,
    },
    /// Verdict of the skeleton checker on a word.
    Check {
        #[arg(long)]
        k: Option<u32>,
        /// Defaults to the depth whose period covers the word.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        word: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum UniversalCmd {
    /// Build a bundle from a target manifest.
    Build {
        #[arg(long)]
        targets: PathBuf,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        out: PathBuf,
        /// Number of forbidden patterns stored for integrity checking.
        #[arg(long)]
        prefix: Option<usize>,
        #[arg(long)]
        max_layer: Option<usize>,
    },
    /// Locally admissible decoded language of one layer.
    Decode {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        layer: usize,
        #[arg(long)]
        len: usize,
        /// Decoder periods of context on each side of the read windows.
        #[arg(long)]
        margin: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Bundle file of the simulating subshift.
    #[arg(long)]
    pub x: PathBuf,
    /// Only `auto`: the bundle's layer decoders.
    #[arg(long)]
    pub registry: Option<String>,
    /// Target manifest.
    #[arg(long)]
    pub g: PathBuf,
    /// `auto` or `manifest` (per-entry `"b"`).
    #[arg(long)]
    pub b: Option<String>,
    /// Largest `i + n + b + j` explored.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub enum_cap: Option<u64>,
    /// Only `jsonl`.
    #[arg(long)]
    pub emit: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum CodecCmd {
    /// Gödel-code stream of a spec: header then pattern codes.
    Encode {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        prefix: Option<usize>,
    },
    /// Patterns of a code prefix (the last code repeats).
    Decode {
        /// Comma-separated codes, header first.
        #[arg(long, value_delimiter = ',')]
        codes: Vec<u64>,
        #[arg(long)]
        prefix: Option<usize>,
    },
    /// Stream of a periodic 1-D configuration.
    Config {
        #[arg(long)]
        alphabet: u32,
        /// Letters of one period as digits; cell 0 is the first.
        #[arg(long)]
        period: String,
        #[arg(long)]
        prefix: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct ModulusArgs {
    #[arg(long)]
    pub spec: String,
    /// `identity`, `header` or `L<n>`.
    #[arg(long)]
    pub op: String,
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub max_i: Option<usize>,
    /// Skeleton parameter for `L<n>`.
    #[arg(long)]
    pub k: Option<u32>,
}

#[derive(Debug, Args)]
pub struct LangArgs {
    #[arg(long)]
    pub spec: String,
    #[arg(long)]
    pub len: usize,
    /// Locally admissible words avoiding the first `depth` patterns instead
    /// of the exact language.
    #[arg(long)]
    pub depth: Option<usize>,
}

//! Command-line surface; every flag may also come from a `--config` file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "walklab", version, about = "Random walks on group actions: inverted orbits, lamplighters, synthesis, spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Law of the walk position after n steps.
    Walk(WalkArgs),
    /// Size statistics of the inverted orbit.
    InvertedOrbit(OrbitArgs),
    /// Lamp-walk identities and inequalities, binomial thinning, non-SIN witnesses.
    Lamplighter(LampArgs),
    /// Synthesize a Liouville measure and probe its tail distances.
    Liouville(LiouvilleArgs),
    /// Spectral radius, edge expansion and linear-radius decay.
    Spectral(SpectralArgs),
    /// Breadth-first Schreier ball.
    Ball(BallArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Walk(_) => "walk",
            Command::InvertedOrbit(_) => "inverted-orbit",
            Command::Lamplighter(_) => "lamplighter",
            Command::Liouville(_) => "liouville",
            Command::Spectral(_) => "spectral",
            Command::Ball(_) => "ball",
            Command::Verify(_) => "verify",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Walk(a) => &a.common,
            Command::InvertedOrbit(a) => &a.common,
            Command::Lamplighter(a) => &a.common,
            Command::Liouville(a) => &a.common,
            Command::Spectral(a) => &a.common,
            Command::Ball(a) => &a.common,
            Command::Verify(a) => &a.common,
        }
    }

    pub fn common_mut(&mut self) -> &mut Common {
        match self {
            Command::Walk(a) => &mut a.common,
            Command::InvertedOrbit(a) => &mut a.common,
            Command::Lamplighter(a) => &mut a.common,
            Command::Liouville(a) => &mut a.common,
            Command::Spectral(a) => &mut a.common,
            Command::Ball(a) => &mut a.common,
            Command::Verify(a) => &mut a.common,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Mc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Flat `key = value` file mirroring the flags; flags given here override it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Master seed; drawn and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo and grid parallelism.
    #[arg(long, env = "WALKLAB_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug, Serialize)]
pub struct ActionSpec {
    /// `zd:<d>`, `free:<k>`, `wreath_z2_z`, `thompson_f_dyadic` or `finite_relation`.
    #[arg(long, default_value = "zd:1")]
    pub action: String,
    /// Relation space: a file, `uniform-cycle:<n>` or `dyadic-cycle:<n>`.
    #[arg(long)]
    pub space: Option<String>,
    /// `srw`, `lazy-srw`, `uniform-ball:<r>`, `@file`, or `word : weight` lines separated by `;`.
    #[arg(long, default_value = "srw")]
    pub measure: String,
    /// Start point in the action's textual syntax; defaults to the base point.
    #[arg(long)]
    pub point: Option<String>,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct WalkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: ActionSpec,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Support cap for exact evolution; excess mass is reported as defect.
    #[arg(long, default_value_t = 1 << 22)]
    pub cap: usize,
    /// Atoms listed in the JSON report, largest first.
    #[arg(long, default_value_t = 64)]
    pub max_atoms: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct OrbitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: ActionSpec,
    /// Times, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub n: Vec<usize>,
    /// Thresholds ε for `P(|O_n| ≤ εn)`, comma separated rationals.
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<String>,
    /// Defaults to `mc` when `--samples` is given, `exact` otherwise.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Largest number of weighted paths enumerated exactly.
    #[arg(long, default_value_t = 1 << 26)]
    pub budget: u128,
    /// Also check supermultiplicativity over all `n + m ≤` this bound.
    #[arg(long)]
    pub fekete_max: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LampCheck {
    /// `P(c_n = ∅) = E 2^-|O_n|` for the switch `{x}`.
    Identity,
    /// `(1−ε) P(d_C(c_n, ∅) < ε) ≤ Σ μ(x) E 2^-|O_n(x)|` on a relation space.
    Thm1,
    /// `½ P(d_C(c_n, ∅) < εn/2) − e^{−εn/2} ≤ Σ μ(x) P(|O_n(x)| ≤ 4εn)` on a relation space.
    Thm2,
    /// Binomial thinning lemma for one distribution or the built-in sweep.
    Thinning,
    /// Non-SIN witness on a relation space.
    Witness,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct LampArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: ActionSpec,
    #[arg(long, value_enum, default_value = "identity")]
    pub check: LampCheck,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value = "1/4")]
    pub eps: String,
    /// Witness radius `r`.
    #[arg(long, default_value = "1/4")]
    pub r: String,
    /// Distribution on `{0, …, n}` for the thinning check, comma separated; all point masses and
    /// the built-in grid when omitted.
    #[arg(long, value_delimiter = ',')]
    pub dist: Vec<String>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1 << 26)]
    pub budget: u128,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct LiouvilleArgs {
    /// Base measure `ν_0` and action; must be symmetric.
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: ActionSpec,
    /// Generator word of the shift `T`; the first generator when omitted.
    #[arg(long)]
    pub shift: Option<String>,
    /// Number of induction steps `J`.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Leading mixture weights, comma separated; geometric halving when omitted.
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<String>,
    /// Ratio of the geometric tail after the leading weights.
    #[arg(long, default_value = "1/2")]
    pub tail: String,
    /// Family members are uniform on `T^k`, `|k| ≤ n²`, with `ε_n = scale / n`.
    #[arg(long, default_value = "2")]
    pub eps_scale: String,
    /// Probe start points; default base point and `T² x`.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    /// Largest convolution power probed; at least every `m_j` reached.
    #[arg(long, default_value_t = 4)]
    pub max_m: u32,
    /// Atom cap for the probe laws.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub max_n: u64,
    #[arg(long, default_value_t = 10_000)]
    pub max_convolutions: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct SpectralArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: ActionSpec,
    /// Largest time `2n` for the return probabilities.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1 << 22)]
    pub budget: usize,
    /// Step-ball radii used as expansion candidates for the Mohar check.
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<usize>,
    /// Edge-list CSV `src,dst,conductance`; its edge expansion replaces the action's.
    #[arg(long)]
    pub network: Option<PathBuf>,
    /// Radii `r` for `P(|X_n| ≤ rn)`; enables the linear-radius decay report.
    #[arg(long, value_delimiter = ',')]
    pub decay_r: Vec<String>,
    /// Times for the decay report.
    #[arg(long, value_delimiter = ',', default_values_t = vec![25u64, 50, 100, 200, 400])]
    pub decay_n: Vec<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct BallArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: ActionSpec,
    #[arg(long, default_value_t = 3)]
    pub radius: u32,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    /// Criteria to run, comma separated; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub criterion: Vec<u8>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

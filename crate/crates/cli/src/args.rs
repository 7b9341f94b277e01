//! Flags, the JSON config file, and the merge between them.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "qkpr",
    version,
    about = "Three-player qutrit Kolkata restaurant game under decoherence"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Payoffs of one game.
    Simulate(Options),
    /// Payoffs against the decoherence parameter p.
    SweepP(Options),
    /// Payoffs over the (θ, φ) family of initial states.
    SweepAngles(Options),
    /// Best unilateral deviation for each player.
    NashCheck(Options),
    /// Completeness check of the Kraus sets.
    ValidateChannels(Options),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::SweepP(_) => "sweep-p",
            Command::SweepAngles(_) => "sweep-angles",
            Command::NashCheck(_) => "nash-check",
            Command::ValidateChannels(_) => "validate-channels",
        }
    }

    pub fn options(&self) -> &Options {
        match self {
            Command::Simulate(o)
            | Command::SweepP(o)
            | Command::SweepAngles(o)
            | Command::NashCheck(o)
            | Command::ValidateChannels(o) => o,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateArg {
    Ghz,
    Mixed,
    Angles,
    Preset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetArg {
    AsPrinted,
    Maximal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MovesArg {
    /// Equal-amplitude optimum (pays 2/3 on GHZ).
    Opt,
    /// Optimum with the angles exactly as quoted.
    OptAsPrinted,
    Identity,
    /// Per-player moves from --alice/--bob/--charlie.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PfVariantArg {
    AsPrinted,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TpfVariantArg {
    AsPrinted,
    Renormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageArg {
    Pre,
    Post,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlayerArg {
    Alice,
    Bob,
    Charlie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Csv,
    Json,
}

/// Every flag is optional so that a config file can fill the gaps.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    /// Initial state.
    #[arg(long, value_enum)]
    pub state: Option<StateArg>,
    /// Entangled weight of the mixed state, in [0, 1].
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<f64>,
    /// State angle θ for --state angles (expression, e.g. "acos(1/sqrt3)").
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<Expr>,
    /// State angle φ for --state angles.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<Expr>,
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    #[arg(long, value_enum)]
    pub moves: Option<MovesArg>,
    /// Alice's move: opt, opt-as-printed, identity, or eight comma-separated
    /// angles θ,φ,χ,α1,α2,α3,β1,β2.
    #[arg(long, allow_hyphen_values = true)]
    pub alice: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub bob: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub charlie: Option<String>,
    /// ad, pd, dep, pf or tpf; sweep-p, nash-check and validate-channels
    /// also take a comma list or "all".
    #[arg(long)]
    pub channel: Option<ChannelList>,
    #[arg(long, value_enum)]
    pub pf_variant: Option<PfVariantArg>,
    #[arg(long, value_enum)]
    pub tpf_variant: Option<TpfVariantArg>,
    /// Decoherence parameter in [0, 1].
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, value_enum)]
    pub noise_stage: Option<StageArg>,
    /// Number of p points on [0, 1].
    #[arg(long)]
    pub grid: Option<usize>,
    /// Number of θ points on [0, π].
    #[arg(long)]
    pub theta_grid: Option<usize>,
    /// Number of φ points on [0, 2π].
    #[arg(long)]
    pub phi_grid: Option<usize>,
    /// Deviating player (default: all three).
    #[arg(long, value_enum)]
    pub player: Option<PlayerArg>,
    /// Objective evaluations per best-response search.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// JSON file whose keys mirror the flag names; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// nash-check: largest acceptable improvement (default 1e-3);
    /// validate-channels: completeness tolerance (default 1e-10).
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
}

/// An angle given as an expression on the command line, or as a string or
/// number in the config file.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Text(String),
}

// by hand: untagged enums lose numbers under serde_json's arbitrary_precision
impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => Ok(Expr::Text(s)),
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(Expr::Number)
                .ok_or_else(|| serde::de::Error::custom("angle out of range")),
            other => Err(serde::de::Error::custom(format!(
                "expected a number or expression, got {other}"
            ))),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Expr::Text(s.to_string()))
    }
}

/// One channel code, a comma list, or `all`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ChannelList {
    One(String),
    Many(Vec<String>),
}

impl ChannelList {
    pub fn codes(&self) -> Vec<String> {
        match self {
            ChannelList::One(s) => s.split(',').map(|c| c.trim().to_string()).collect(),
            ChannelList::Many(v) => v.iter().map(|c| c.trim().to_string()).collect(),
        }
    }
}

impl std::str::FromStr for ChannelList {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(ChannelList::One(s.to_string()))
    }
}

macro_rules! merge_fields {
    ($flags:ident, $file:ident; $($field:ident),* $(,)?) => {
        Options {
            $($field: $flags.$field.or($file.$field),)*
            config: $flags.config,
        }
    };
}

impl Options {
    /// Field-wise `flags.or(file)`.
    pub fn merged_over(self, file: Options) -> Options {
        let flags = self;
        merge_fields!(flags, file;
            state, f, theta, phi, preset, moves, alice, bob, charlie, channel,
            pf_variant, tpf_variant, p, noise_stage, grid, theta_grid, phi_grid,
            player, budget, out, format, tol,
        )
    }

    /// Names of the flags that are set, as spelled on the command line.
    pub fn set_flags(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        macro_rules! check {
            ($($field:ident => $name:literal),* $(,)?) => {
                $(if self.$field.is_some() { v.push($name); })*
            };
        }
        check!(
            state => "--state", f => "--f", theta => "--theta", phi => "--phi", preset => "--preset",
            moves => "--moves", alice => "--alice", bob => "--bob", charlie => "--charlie",
            channel => "--channel", pf_variant => "--pf-variant", tpf_variant => "--tpf-variant",
            p => "--p", noise_stage => "--noise-stage", grid => "--grid", theta_grid => "--theta-grid",
            phi_grid => "--phi-grid", player => "--player", budget => "--budget", tol => "--tol",
        );
        v
    }
}

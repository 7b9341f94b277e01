//! Full game pipeline, parameter sweeps and the best-response check.

mod search;

pub use search::{best_response, BestResponseReport, SearchOptions};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_channel_local, ChannelKind, QutritChannel};
use crate::error::{Error, Result};
use crate::payoff::{payoffs, PayoffTriple};
use crate::scalar::Scalar;
use crate::states::{
    check_range, ghz3, mixed_initial, parameterized_initial, DensityMatrix, MixingFraction,
    StateAngles, StatePreset,
};
use crate::strategies::{apply_unitaries, StrategyTriple};
use crate::tensor_algebra::{ComplexMatrix, DEFAULT_TOL};

/// Which state the players share before moving.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitialState<T> {
    Ghz,
    Mixed { f: MixingFraction<T> },
    Angles { angles: StateAngles<T> },
    Preset { preset: StatePreset },
}

impl<T: Scalar> InitialState<T> {
    pub fn density(&self) -> DensityMatrix<T> {
        match self {
            InitialState::Ghz => ghz3(),
            InitialState::Mixed { f } => mixed_initial(*f),
            InitialState::Angles { angles } => parameterized_initial(*angles),
            InitialState::Preset { preset } => parameterized_initial(preset.angles()),
        }
    }
}

/// Where the channel acts: on the shared state before the moves, or after.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseStage {
    #[default]
    PreStrategy,
    PostStrategy,
}

impl NoiseStage {
    pub fn code(self) -> &'static str {
        match self {
            NoiseStage::PreStrategy => "pre",
            NoiseStage::PostStrategy => "post",
        }
    }
}

/// One complete game run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig<T> {
    pub initial: InitialState<T>,
    pub moves: StrategyTriple<T>,
    pub channel: ChannelKind,
    pub p: T,
    pub noise_stage: NoiseStage,
}

impl<T: Scalar> GameConfig<T> {
    /// Noiseless game from `initial` with every player at the optimum.
    pub fn new(initial: InitialState<T>) -> Self {
        Self {
            initial,
            moves: StrategyTriple::optimal(),
            channel: ChannelKind::PhaseDamping,
            p: T::zero(),
            noise_stage: NoiseStage::PreStrategy,
        }
    }

    pub fn with_moves(mut self, moves: StrategyTriple<T>) -> Self {
        self.moves = moves;
        self
    }

    pub fn with_channel(mut self, channel: ChannelKind, p: T) -> Self {
        self.channel = channel;
        self.p = p;
        self
    }

    pub fn with_stage(mut self, stage: NoiseStage) -> Self {
        self.noise_stage = stage;
        self
    }
}

/// Initial state and channel resolved once; the moves vary per evaluation.
pub(crate) struct Pipeline<T: Scalar> {
    /// Initial state, already noisy in the pre-strategy stage.
    start: DensityMatrix<T>,
    /// Channel still to apply after the moves.
    post: Option<QutritChannel<T>>,
}

impl<T: Scalar> Pipeline<T> {
    pub(crate) fn new(
        initial: &InitialState<T>,
        channel: ChannelKind,
        p: T,
        stage: NoiseStage,
    ) -> Result<Self> {
        let ch = QutritChannel::new(channel, p)?;
        Self::with_channel(initial.density(), ch, stage)
    }

    fn with_channel(
        rho: DensityMatrix<T>,
        ch: QutritChannel<T>,
        stage: NoiseStage,
    ) -> Result<Self> {
        Ok(match stage {
            NoiseStage::PreStrategy => Self {
                start: apply_channel_local(&rho, &ch),
                post: None,
            },
            NoiseStage::PostStrategy => Self {
                start: rho,
                post: Some(ch),
            },
        })
    }

    pub(crate) fn start(&self) -> &DensityMatrix<T> {
        &self.start
    }

    pub(crate) fn finish(&self, rho: DensityMatrix<T>) -> DensityMatrix<T> {
        match &self.post {
            Some(ch) => apply_channel_local(&rho, ch),
            None => rho,
        }
    }

    fn run(&self, unitaries: &[ComplexMatrix<T>; 3], check: bool) -> Result<DensityMatrix<T>> {
        let tol = T::lit(DEFAULT_TOL).max(T::epsilon() * T::lit(1e4));
        if check {
            stage_check(&self.start, "initial/noise", tol)?;
        }
        let moved = apply_unitaries(&self.start, unitaries);
        if check {
            stage_check(&moved, "strategies", tol)?;
        }
        let out = self.finish(moved);
        if check && self.post.is_some() {
            stage_check(&out, "noise", tol)?;
        }
        Ok(out)
    }
}

fn stage_check<T: Scalar>(rho: &DensityMatrix<T>, stage: &str, tol: T) -> Result<()> {
    rho.check(tol).map_err(|e| Error::NotDensityMatrix {
        reason: format!("after {stage} stage: {e}"),
    })
}

/// Runs the game and returns all three expected payoffs.
///
/// Every intermediate state is checked against the density-matrix invariants.
pub fn play<T: Scalar>(config: &GameConfig<T>) -> Result<PayoffTriple<T>> {
    let pipeline = Pipeline::new(
        &config.initial,
        config.channel,
        config.p,
        config.noise_stage,
    )?;
    let rho = pipeline.run(&config.moves.unitaries()?, true)?;
    payoffs(&rho)
}

/// Final state of a game run.
pub fn final_state<T: Scalar>(config: &GameConfig<T>) -> Result<DensityMatrix<T>> {
    let pipeline = Pipeline::new(
        &config.initial,
        config.channel,
        config.p,
        config.noise_stage,
    )?;
    pipeline.run(&config.moves.unitaries()?, false)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::lit((n - 1) as f64);
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo + step * T::lit(i as f64)
                    }
                })
                .collect()
        }
    }
}

/// `n` points over `p ∈ [0, 1]`.
pub fn p_grid<T: Scalar>(n: usize) -> Vec<T> {
    linspace(T::zero(), T::one(), n)
}

/// `n` points over `θ ∈ [0, π]`.
pub fn theta_grid<T: Scalar>(n: usize) -> Vec<T> {
    linspace(T::zero(), T::PI(), n)
}

/// `n` points over `φ ∈ [0, 2π]`.
pub fn phi_grid<T: Scalar>(n: usize) -> Vec<T> {
    linspace(T::zero(), T::PI() + T::PI(), n)
}

pub const DEFAULT_P_POINTS: usize = 101;
pub const DEFAULT_ANGLE_POINTS: usize = 50;

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint<T> {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<T>,
    pub p: T,
    pub channel: ChannelKind,
    pub payoffs: PayoffTriple<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SweepAxes<T> {
    Decoherence {
        p: Vec<T>,
        channels: Vec<ChannelKind>,
    },
    StateAngles {
        theta: Vec<T>,
        phi: Vec<T>,
        p: T,
        channel: ChannelKind,
    },
}

/// Payoffs over a grid, with the settings that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult<T> {
    pub axes: SweepAxes<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState<T>>,
    pub moves: StrategyTriple<T>,
    pub noise_stage: NoiseStage,
    pub points: Vec<SweepPoint<T>>,
}

/// Payoffs against decoherence: one run per `(p, channel)`, `p` ascending
/// in the outer loop and channels in the given order inside.
pub fn sweep_decoherence<T: Scalar>(
    initial: &InitialState<T>,
    moves: &StrategyTriple<T>,
    channels: &[ChannelKind],
    noise_stage: NoiseStage,
    p_grid: &[T],
) -> Result<SweepResult<T>> {
    for &p in p_grid {
        check_range("p", p, T::zero(), T::one())?;
    }
    let unitaries = moves.unitaries()?;
    let rho = initial.density();
    let jobs: Vec<(T, ChannelKind)> = p_grid
        .iter()
        .flat_map(|&p| channels.iter().map(move |&c| (p, c)))
        .collect();
    let points = jobs
        .par_iter()
        .map(|&(p, channel)| {
            let ch = QutritChannel::new(channel, p)?;
            let pipeline = Pipeline::with_channel(rho.clone(), ch, noise_stage)?;
            let out = pipeline.run(&unitaries, false)?;
            Ok(SweepPoint {
                theta: None,
                phi: None,
                p,
                channel,
                payoffs: payoffs(&out)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        axes: SweepAxes::Decoherence {
            p: p_grid.to_vec(),
            channels: channels.to_vec(),
        },
        initial: Some(*initial),
        moves: *moves,
        noise_stage,
        points,
    })
}

/// Payoffs over the `(θ, φ)` family of initial states at fixed noise;
/// row-major with θ in the outer loop.
pub fn sweep_state_angles<T: Scalar>(
    theta_grid: &[T],
    phi_grid: &[T],
    moves: &StrategyTriple<T>,
    channel: ChannelKind,
    p: T,
    noise_stage: NoiseStage,
) -> Result<SweepResult<T>> {
    let angles: Vec<StateAngles<T>> = theta_grid
        .iter()
        .flat_map(|&theta| {
            phi_grid
                .iter()
                .map(move |&phi| StateAngles::new(theta, phi))
        })
        .collect::<Result<_>>()?;
    let ch = QutritChannel::new(channel, p)?;
    let unitaries = moves.unitaries()?;
    let points = angles
        .par_iter()
        .map(|a| {
            let pipeline =
                Pipeline::with_channel(parameterized_initial(*a), ch.clone(), noise_stage)?;
            let out = pipeline.run(&unitaries, false)?;
            Ok(SweepPoint {
                theta: Some(a.theta),
                phi: Some(a.phi),
                p,
                channel,
                payoffs: payoffs(&out)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        axes: SweepAxes::StateAngles {
            theta: theta_grid.to_vec(),
            phi: phi_grid.to_vec(),
            p,
            channel,
        },
        initial: None,
        moves: *moves,
        noise_stage,
        points,
    })
}

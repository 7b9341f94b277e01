//! Three-player quantum Kolkata restaurant game on qutrits, with noise.
//!
//! Three players share an entangled three-qutrit state, each applies an
//! SU(3) move to their qutrit, a Kraus channel models decoherence, and a
//! player is paid when the restaurant they land on is theirs alone.
//!
//! All numeric types are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which every tolerance in the
//! crate is calibrated for.

pub mod channels;
pub mod engine;
mod error;
pub mod payoff;
pub mod scalar;
pub mod states;
pub mod strategies;
pub mod tensor_algebra;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use channels::{ChannelKind, PhaseFlipVariant, TritPhaseFlipVariant};
pub use engine::{
    best_response, play, sweep_decoherence, sweep_state_angles, NoiseStage, SearchOptions,
};
pub use payoff::Player;
pub use states::StatePreset;

pub type ComplexMatrix = tensor_algebra::ComplexMatrix<f64>;
pub type ComplexVector = tensor_algebra::ComplexVector<f64>;
pub type DensityMatrix = states::DensityMatrix<f64>;
pub type StateAngles = states::StateAngles<f64>;
pub type MixingFraction = states::MixingFraction<f64>;
pub type StrategyParams = strategies::StrategyParams<f64>;
pub type Move = strategies::Move<f64>;
pub type StrategyTriple = strategies::StrategyTriple<f64>;
pub type QutritChannel = channels::QutritChannel<f64>;
pub type PayoffOperator = payoff::PayoffOperator<f64>;
pub type PayoffTriple = payoff::PayoffTriple<f64>;
pub type InitialState = engine::InitialState<f64>;
pub type GameConfig = engine::GameConfig<f64>;
pub type SweepResult = engine::SweepResult<f64>;
pub type BestResponseReport = engine::BestResponseReport<f64>;

/// Single-precision aliases.
pub mod f32 {
    pub type ComplexMatrix = crate::tensor_algebra::ComplexMatrix<f32>;
    pub type DensityMatrix = crate::states::DensityMatrix<f32>;
    pub type StrategyParams = crate::strategies::StrategyParams<f32>;
    pub type QutritChannel = crate::channels::QutritChannel<f32>;
    pub type GameConfig = crate::engine::GameConfig<f32>;
    pub type PayoffTriple = crate::payoff::PayoffTriple<f32>;
}

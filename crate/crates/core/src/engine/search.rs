//! Unilateral-deviation search for the Nash check.
//!
//! The deviating player's payoff is maximized over the eight-angle box with
//! everyone else held fixed: a coarse lattice is sampled for seeds, then the
//! best seeds are polished by compass search (poll ±step along each axis,
//! halve the steps when no poll improves).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GameConfig, Pipeline};
use crate::error::Result;
use crate::payoff::{player_payoff, Player};
use crate::scalar::Scalar;
use crate::states::DensityMatrix;
use crate::strategies::{unitary_unchecked, Move, StrategyParams, PARAM_RANGES};

/// Tuning for [`best_response`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Total objective evaluations, seeding included.
    pub budget: usize,
    /// Lattice points per angle.
    pub levels: usize,
    /// Lattice points sampled as seed candidates.
    pub seeds: usize,
    /// Seeds refined by compass search.
    pub starts: usize,
    /// Refinement stops once every step is below this (radians).
    pub min_step: f64,
    pub rng_seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: 50_000,
            levels: 5,
            seeds: 4_000,
            starts: 8,
            min_step: 1e-4,
            rng_seed: 0x6b70_7221,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponseReport<T> {
    pub player: Player,
    /// Payoff of the configured move.
    pub baseline: T,
    pub best_payoff: T,
    pub best_move: Move<T>,
    /// `best_payoff - baseline`, never negative.
    pub improvement: T,
    pub evaluations: usize,
}

/// The deviating player's payoff as a function of their angles.
struct Objective<'a, T: Scalar> {
    pipeline: &'a Pipeline<T>,
    /// Start state with the other two players' moves already applied.
    others_applied: DensityMatrix<T>,
    player: Player,
}

impl<T: Scalar> Objective<'_, T> {
    fn eval_unitary(&self, u: &crate::tensor_algebra::ComplexMatrix<T>) -> T {
        let site = self.player.index();
        let moved = self
            .others_applied
            .matrix()
            .conjugate_local(&u.dagger(), site, 3);
        let out = self.pipeline.finish(DensityMatrix::from_trusted(moved));
        player_payoff(&out, self.player).map_or(T::neg_infinity(), |v| v)
    }

    fn eval(&self, x: &[T; 8]) -> T {
        self.eval_unitary(&unitary_unchecked(&StrategyParams::from_array_unchecked(
            *x,
        )))
    }
}

#[derive(Clone, Copy)]
struct Box8<T> {
    upper: [T; 8],
    periodic: [bool; 8],
}

impl<T: Scalar> Box8<T> {
    fn new() -> Self {
        Self {
            upper: StrategyParams::<T>::upper_bounds(),
            periodic: PARAM_RANGES.map(|(_, k)| k == 2.0),
        }
    }

    /// Folds periodic angles into `[0, 2π)` and clamps the rest.
    fn project(&self, i: usize, v: T) -> T {
        let hi = self.upper[i];
        if self.periodic[i] {
            let r = v % hi;
            if r < T::zero() {
                r + hi
            } else {
                r
            }
        } else {
            v.max(T::zero()).min(hi)
        }
    }

    /// Lattice spacing along axis `i`.
    fn spacing(&self, i: usize, levels: usize) -> T {
        let cells = if self.periodic[i] {
            levels
        } else {
            levels.saturating_sub(1).max(1)
        };
        self.upper[i] / T::lit(cells as f64)
    }
}

/// Compass search from `start`; returns the best point, its value and the
/// evaluations used.
fn compass<T: Scalar>(
    obj: &Objective<'_, T>,
    bx: &Box8<T>,
    start: [T; 8],
    start_val: T,
    init_step: [T; 8],
    min_step: T,
    budget: usize,
) -> ([T; 8], T, usize) {
    let mut x = start;
    let mut fx = start_val;
    let mut step = init_step;
    let mut used = 0;
    while used < budget && step.iter().any(|s| *s >= min_step) {
        let mut improved = false;
        for i in 0..8 {
            if step[i] < min_step {
                continue;
            }
            for sign in [T::one(), -T::one()] {
                if used >= budget {
                    break;
                }
                let mut y = x;
                y[i] = bx.project(i, x[i] + sign * step[i]);
                if y[i] == x[i] {
                    continue;
                }
                let fy = obj.eval(&y);
                used += 1;
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            for s in &mut step {
                *s = *s / T::lit(2.0);
            }
        }
    }
    (x, fx, used)
}

/// Maximizes `player`'s payoff over their own move with the other two moves
/// fixed, and reports the gain over the configured move.
pub fn best_response<T: Scalar>(
    config: &GameConfig<T>,
    player: Player,
    options: &SearchOptions,
) -> Result<BestResponseReport<T>> {
    let pipeline = Pipeline::new(
        &config.initial,
        config.channel,
        config.p,
        config.noise_stage,
    )?;
    let moves = config.moves.as_array();
    let mut others_applied = pipeline.start().matrix().clone();
    for (site, m) in moves.iter().enumerate() {
        if site != player.index() {
            others_applied = others_applied.conjugate_local(&m.unitary()?.dagger(), site, 3);
        }
    }
    let obj = Objective {
        pipeline: &pipeline,
        others_applied: DensityMatrix::from_trusted(others_applied),
        player,
    };
    let own = moves[player.index()];
    let baseline = obj.eval_unitary(&own.unitary()?);
    let bx = Box8::<T>::new();
    let levels = options.levels.max(2);

    // seeding: the configured move (when it has angles) plus random lattice points
    let n_seeds = options.seeds.min(options.budget / 2);
    let mut rng = ChaCha8Rng::seed_from_u64(options.rng_seed);
    let mut candidates: Vec<[T; 8]> = Vec::with_capacity(n_seeds + 1);
    if let Some(p) = own.params() {
        candidates.push(p.to_array());
    }
    while candidates.len() < n_seeds.max(1) {
        let x: [T; 8] = std::array::from_fn(|i| {
            bx.spacing(i, levels) * T::lit(rng.gen_range(0..levels) as f64)
        });
        candidates.push(x);
    }
    let mut scored: Vec<(usize, T)> = candidates
        .par_iter()
        .map(|x| obj.eval(x))
        .enumerate()
        .collect();
    let mut evaluations = scored.len();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });

    let starts: Vec<(usize, T)> = scored.into_iter().take(options.starts.max(1)).collect();
    let per_start = options.budget.saturating_sub(evaluations) / starts.len();
    let init_step: [T; 8] = std::array::from_fn(|i| bx.spacing(i, levels) / T::lit(2.0));
    let min_step = T::lit(options.min_step);
    let refined: Vec<([T; 8], T, usize)> = starts
        .par_iter()
        .map(|&(idx, val)| {
            compass(
                &obj,
                &bx,
                candidates[idx],
                val,
                init_step,
                min_step,
                per_start,
            )
        })
        .collect();
    evaluations += refined.iter().map(|r| r.2).sum::<usize>();

    let mut best_move = own;
    let mut best_payoff = baseline;
    for (x, fx, _) in &refined {
        if *fx > best_payoff {
            best_payoff = *fx;
            best_move = Move::Angles(StrategyParams::from_array_unchecked(*x));
        }
    }
    Ok(BestResponseReport {
        player,
        baseline,
        best_payoff,
        best_move,
        improvement: best_payoff - baseline,
        evaluations,
    })
}

//! Payoff projectors and expected payoffs.
//!
//! A player wins one unit when their trit differs from both others' trits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::states::{ket_trits, DensityMatrix, STATE_DIM};
use crate::tensor_algebra::ComplexMatrix;

/// Largest imaginary residue of `Tr(Pρ)` accepted as rounding.
pub const IMAG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Alice,
    Bob,
    Charlie,
}

impl Player {
    pub const ALL: [Player; 3] = [Player::Alice, Player::Bob, Player::Charlie];

    /// Tensor-factor position: Alice 0 (most significant), Charlie 2.
    pub fn index(self) -> usize {
        match self {
            Player::Alice => 0,
            Player::Bob => 1,
            Player::Charlie => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Player::Alice => "alice",
            Player::Bob => "bob",
            Player::Charlie => "charlie",
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// Whether `player` holds a unique trit in basis ket `index`.
pub fn wins(player: Player, index: usize) -> bool {
    let trits = ket_trits(index);
    let mine = trits[player.index()];
    trits
        .iter()
        .enumerate()
        .all(|(i, &t)| i == player.index() || t != mine)
}

/// Basis kets on which `player` is paid.
pub fn winning_mask(player: Player) -> [bool; STATE_DIM] {
    std::array::from_fn(|i| wins(player, i))
}

/// Diagonal 0/1 projector onto the kets where one player's choice is unique.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffOperator<T: Scalar> {
    player: Player,
    matrix: ComplexMatrix<T>,
}

impl<T: Scalar> PayoffOperator<T> {
    pub fn player(&self) -> Player {
        self.player
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }
}

pub fn payoff_operator<T: Scalar>(player: Player) -> PayoffOperator<T> {
    let diag: Vec<T> = winning_mask(player)
        .iter()
        .map(|&w| if w { T::one() } else { T::zero() })
        .collect();
    PayoffOperator {
        player,
        matrix: ComplexMatrix::from_real_diagonal(&diag),
    }
}

/// `Re Tr(P ρ)`; errors when the imaginary part exceeds [`IMAG_TOL`].
pub fn expected_payoff<T: Scalar>(rho: &DensityMatrix<T>, op: &PayoffOperator<T>) -> Result<T> {
    let tr = op.matrix.product(rho.matrix()).trace();
    if tr.im.abs() > T::lit(IMAG_TOL) {
        return Err(Error::ImaginaryPayoff {
            imag: tr.im.as_f64(),
        });
    }
    Ok(tr.re)
}

/// Expected payoffs of all three players.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffTriple<T> {
    pub alice: T,
    pub bob: T,
    pub charlie: T,
}

impl<T: Scalar> PayoffTriple<T> {
    pub fn get(&self, player: Player) -> T {
        match player {
            Player::Alice => self.alice,
            Player::Bob => self.bob,
            Player::Charlie => self.charlie,
        }
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.alice, self.bob, self.charlie]
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .fold(T::zero(), |m, (a, b)| m.max((*a - b).abs()))
    }
}

/// Payoff of one player read from the populations; same value as
/// [`expected_payoff`] since the operator is diagonal.
pub fn player_payoff<T: Scalar>(rho: &DensityMatrix<T>, player: Player) -> Result<T> {
    let m = rho.matrix();
    let mut total = crate::scalar::c_zero::<T>();
    for (i, w) in winning_mask(player).iter().enumerate() {
        if *w {
            total = total + m.get(i, i);
        }
    }
    if total.im.abs() > T::lit(IMAG_TOL) {
        return Err(Error::ImaginaryPayoff {
            imag: total.im.as_f64(),
        });
    }
    Ok(total.re)
}

pub fn payoffs<T: Scalar>(rho: &DensityMatrix<T>) -> Result<PayoffTriple<T>> {
    Ok(PayoffTriple {
        alice: player_payoff(rho, Player::Alice)?,
        bob: player_payoff(rho, Player::Bob)?,
        charlie: player_payoff(rho, Player::Charlie)?,
    })
}

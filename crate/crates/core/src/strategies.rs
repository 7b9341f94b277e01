//! SU(3) strategy moves and their action on the shared state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, Scalar, C};
use crate::states::{check_range, DensityMatrix};
use crate::tensor_algebra::ComplexMatrix;

/// The eight angles of one player's move.
///
/// These are not the θ, φ of [`crate::states::StateAngles`]; the two pairs
/// share names only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams<T> {
    pub theta: T,
    pub phi: T,
    pub chi: T,
    pub alpha1: T,
    pub alpha2: T,
    pub alpha3: T,
    pub beta1: T,
    pub beta2: T,
}

/// Angle ranges as `(name, lower, upper)` in field order, upper bound in units of π.
pub const PARAM_RANGES: [(&str, f64); 8] = [
    ("theta", 1.0),
    ("phi", 2.0),
    ("chi", 0.5),
    ("alpha1", 2.0),
    ("alpha2", 2.0),
    ("alpha3", 2.0),
    ("beta1", 2.0),
    ("beta2", 2.0),
];

impl<T: Scalar> StrategyParams<T> {
    /// Builds and range-checks a parameter set.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        theta: T,
        phi: T,
        chi: T,
        alpha1: T,
        alpha2: T,
        alpha3: T,
        beta1: T,
        beta2: T,
    ) -> Result<Self> {
        Self::from_array([theta, phi, chi, alpha1, alpha2, alpha3, beta1, beta2])
    }

    pub fn from_array(a: [T; 8]) -> Result<Self> {
        let s = Self::from_array_unchecked(a);
        s.validate()?;
        Ok(s)
    }

    pub(crate) fn from_array_unchecked(a: [T; 8]) -> Self {
        Self {
            theta: a[0],
            phi: a[1],
            chi: a[2],
            alpha1: a[3],
            alpha2: a[4],
            alpha3: a[5],
            beta1: a[6],
            beta2: a[7],
        }
    }

    pub fn to_array(&self) -> [T; 8] {
        [
            self.theta,
            self.phi,
            self.chi,
            self.alpha1,
            self.alpha2,
            self.alpha3,
            self.beta1,
            self.beta2,
        ]
    }

    /// Upper bounds of each angle, in field order (all lower bounds are 0).
    pub fn upper_bounds() -> [T; 8] {
        PARAM_RANGES.map(|(_, k)| T::lit(k) * T::PI())
    }

    pub fn validate(&self) -> Result<()> {
        for ((name, _), (value, upper)) in PARAM_RANGES
            .iter()
            .zip(self.to_array().into_iter().zip(Self::upper_bounds()))
        {
            check_range(name, value, T::zero(), upper)?;
        }
        Ok(())
    }
}

/// The optimal move as printed: `(π/4, acos(1/√3), π/4, 5π/18, 5π/18, 5π/18, π/3, 11π/6)`.
///
/// On the GHZ state this point pays 0.6103 per player, not the 2/3 optimum;
/// see [`u_opt_equal_amplitude`].
pub fn u_opt<T: Scalar>() -> StrategyParams<T> {
    let pi = T::PI();
    let a = T::lit(5.0) * pi / T::lit(18.0);
    StrategyParams {
        theta: T::FRAC_PI_4(),
        phi: equal_amplitude_angle(),
        chi: T::FRAC_PI_4(),
        alpha1: a,
        alpha2: a,
        alpha3: a,
        beta1: pi / T::lit(3.0),
        beta2: T::lit(11.0) * pi / T::lit(6.0),
    }
}

/// [`u_opt`] with θ and φ exchanged (θ = acos(1/√3), φ = π/4), which makes
/// the first column an equal-amplitude vector. Every player using it on the
/// GHZ state earns exactly 2/3.
pub fn u_opt_equal_amplitude<T: Scalar>() -> StrategyParams<T> {
    let printed = u_opt::<T>();
    StrategyParams {
        theta: printed.phi,
        phi: printed.theta,
        ..printed
    }
}

fn equal_amplitude_angle<T: Scalar>() -> T {
    (T::one() / T::lit(3.0).sqrt()).acos()
}

/// Builds the 3×3 move matrix.
///
/// Column 1 is `z`, column 2 is `conj(w)`, column 3 is
/// `(z̄₂w₃ − z̄₃w₂, z̄₃w₁ − z̄₁w₃, z̄₁w₂ − z̄₂w₁)`, with
///
/// ```text
/// z = (sinθ cosφ e^{iα₁}, sinθ sinφ e^{iα₂}, cosθ e^{iα₃})
/// w = (cosχ cosθ cosφ e^{i(β₁−α₁)} + sinχ sinφ e^{i(β₂−α₁)},
///      cosχ cosθ sinφ e^{i(β₁−α₂)} − sinχ cosφ e^{i(β₂−α₂)},
///     −cosχ sinθ e^{i(β₁−α₃)})
/// ```
pub fn build_unitary<T: Scalar>(s: &StrategyParams<T>) -> Result<ComplexMatrix<T>> {
    let u = unitary_unchecked(s);
    let defect = u.unitarity_defect();
    let tol = T::lit(1e-8).max(T::epsilon() * T::lit(1e3));
    if defect > tol {
        return Err(Error::NotUnitary {
            deviation: defect.as_f64(),
        });
    }
    Ok(u)
}

pub(crate) fn unitary_unchecked<T: Scalar>(s: &StrategyParams<T>) -> ComplexMatrix<T> {
    let (st, ct) = s.theta.sin_cos();
    let (sp, cp) = s.phi.sin_cos();
    let (sc, cc) = s.chi.sin_cos();
    let z: [C<T>; 3] = [
        cis(s.alpha1).scale(st * cp),
        cis(s.alpha2).scale(st * sp),
        cis(s.alpha3).scale(ct),
    ];
    let w: [C<T>; 3] = [
        cis(s.beta1 - s.alpha1).scale(cc * ct * cp) + cis(s.beta2 - s.alpha1).scale(sc * sp),
        cis(s.beta1 - s.alpha2).scale(cc * ct * sp) - cis(s.beta2 - s.alpha2).scale(sc * cp),
        -cis(s.beta1 - s.alpha3).scale(cc * st),
    ];
    let zb = z.map(|v| v.conj());
    let third = [
        zb[1] * w[2] - zb[2] * w[1],
        zb[2] * w[0] - zb[0] * w[2],
        zb[0] * w[1] - zb[1] * w[0],
    ];
    ComplexMatrix::from_fn(3, |r, c| match c {
        0 => z[r],
        1 => w[r].conj(),
        _ => third[r],
    })
}

/// One player's move: an angle set, or the literal identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Move<T> {
    Angles(StrategyParams<T>),
    Identity,
}

impl<T: Scalar> Move<T> {
    pub fn unitary(&self) -> Result<ComplexMatrix<T>> {
        match self {
            Move::Angles(s) => build_unitary(s),
            Move::Identity => Ok(ComplexMatrix::identity(3)),
        }
    }

    pub fn params(&self) -> Option<&StrategyParams<T>> {
        match self {
            Move::Angles(s) => Some(s),
            Move::Identity => None,
        }
    }
}

impl<T> From<StrategyParams<T>> for Move<T> {
    fn from(s: StrategyParams<T>) -> Self {
        Move::Angles(s)
    }
}

/// Moves of Alice, Bob and Charlie.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyTriple<T> {
    pub alice: Move<T>,
    pub bob: Move<T>,
    pub charlie: Move<T>,
}

impl<T: Scalar> StrategyTriple<T> {
    pub fn new(alice: Move<T>, bob: Move<T>, charlie: Move<T>) -> Self {
        Self {
            alice,
            bob,
            charlie,
        }
    }

    /// Everyone plays the same move.
    pub fn symmetric(m: Move<T>) -> Self {
        Self::new(m, m, m)
    }

    /// Everyone plays [`u_opt_equal_amplitude`].
    pub fn optimal() -> Self {
        Self::symmetric(Move::Angles(u_opt_equal_amplitude()))
    }

    pub fn identity() -> Self {
        Self::symmetric(Move::Identity)
    }

    pub fn as_array(&self) -> [Move<T>; 3] {
        [self.alice, self.bob, self.charlie]
    }

    pub fn from_array([alice, bob, charlie]: [Move<T>; 3]) -> Self {
        Self {
            alice,
            bob,
            charlie,
        }
    }

    pub fn unitaries(&self) -> Result<[ComplexMatrix<T>; 3]> {
        Ok([
            self.alice.unitary()?,
            self.bob.unitary()?,
            self.charlie.unitary()?,
        ])
    }
}

impl<T: Scalar> Default for StrategyTriple<T> {
    fn default() -> Self {
        Self::optimal()
    }
}

/// `(U_A† ⊗ U_B† ⊗ U_C†) ρ (U_A ⊗ U_B ⊗ U_C)`.
pub fn apply_strategies<T: Scalar>(
    rho: &DensityMatrix<T>,
    moves: &StrategyTriple<T>,
) -> Result<DensityMatrix<T>> {
    Ok(apply_unitaries(rho, &moves.unitaries()?))
}

/// Same map as [`apply_strategies`] for prebuilt 3×3 unitaries, applied one
/// qutrit at a time.
pub fn apply_unitaries<T: Scalar>(
    rho: &DensityMatrix<T>,
    unitaries: &[ComplexMatrix<T>; 3],
) -> DensityMatrix<T> {
    let mut m = rho.matrix().clone();
    for (site, u) in unitaries.iter().enumerate() {
        m = m.conjugate_local(&u.dagger(), site, 3);
    }
    DensityMatrix::from_trusted(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::ghz3;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    type M = ComplexMatrix<f64>;

    fn kron3(u: &[M; 3]) -> M {
        u[0].kron(&u[1]).kron(&u[2])
    }

    #[test]
    fn hand_evaluated_unitary() {
        let s = StrategyParams::new(FRAC_PI_2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let u = build_unitary(&s).unwrap();
        let expected = M::from_rows(&[
            vec![C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)],
            vec![C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)],
            vec![C::new(0.0, 0.0), C::new(-1.0, 0.0), C::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!(u.max_abs_diff(&expected) < 1e-15, "{u:?}");
    }

    #[test]
    fn optimum_constants() {
        let u = u_opt::<f64>();
        assert_eq!(u.theta, FRAC_PI_4);
        assert!((u.phi - (1.0 / 3f64.sqrt()).acos()).abs() < 1e-15);
        assert_eq!(u.chi, FRAC_PI_4);
        assert!((u.alpha2 - 5.0 * PI / 18.0).abs() < 1e-15);
        assert!((u.beta1 - PI / 3.0).abs() < 1e-15);
        assert!((u.beta2 - 11.0 * PI / 6.0).abs() < 1e-15);
        let m = build_unitary(&u).unwrap();
        assert_eq!(m.dim(), 3);
        assert!(m.is_unitary(1e-10));
        assert!(build_unitary(&u_opt_equal_amplitude::<f64>())
            .unwrap()
            .is_unitary(1e-10));
        let e = u_opt_equal_amplitude::<f64>();
        assert_eq!((e.theta, e.phi), (u.phi, u.theta));
        assert_eq!(e.beta2, u.beta2);
    }

    #[test]
    fn params_range_checked() {
        assert!(StrategyParams::new(0.0, 0.0, 1.6, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(StrategyParams::new(-0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(StrategyParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 6.3).is_err());
    }

    #[test]
    fn identity_moves_leave_state() {
        let rho = ghz3::<f64>();
        let out = apply_strategies(&rho, &StrategyTriple::identity()).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn local_application_matches_kron_with_left_daggers() {
        let moves = StrategyTriple::new(
            Move::Angles(u_opt()),
            Move::Angles(StrategyParams::new(1.0, 2.0, 0.3, 0.4, 5.0, 6.0, 0.7, 3.0).unwrap()),
            Move::Identity,
        );
        let rho = ghz3::<f64>();
        let u = moves.unitaries().unwrap();
        let k = kron3(&u);
        let expected = k.dagger().product(rho.matrix()).product(&k);
        let got = apply_strategies(&rho, &moves).unwrap();
        assert!(got.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn optimum_payoff_mass_on_alice_unique_kets() {
        let rho = apply_strategies(&ghz3::<f64>(), &StrategyTriple::optimal()).unwrap();
        let pops = rho.populations();
        let alice: f64 = (0..27)
            .filter(|&i| {
                let [a, b, c] = crate::states::ket_trits(i);
                a != b && a != c
            })
            .map(|i| pops[i])
            .sum();
        assert!((alice - 2.0 / 3.0).abs() < 1e-12, "{alice}");
    }
}

//! Initial three-qutrit states shared by the players.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c_re, c_zero, Scalar};
use crate::tensor_algebra::{ComplexMatrix, ComplexVector, DEFAULT_TOL};

/// Dimension of the three-qutrit state space.
pub const STATE_DIM: usize = 27;

/// Basis indices of `|000⟩`, `|111⟩`, `|222⟩`.
pub const DIAGONAL_KETS: [usize; 3] = [0, 13, 26];

/// Index of the product ket `|a b c⟩` (Alice is the most significant trit).
#[inline]
pub const fn ket_index(a: usize, b: usize, c: usize) -> usize {
    9 * a + 3 * b + c
}

/// Trits `(a, b, c)` of a basis index.
#[inline]
pub const fn ket_trits(index: usize) -> [usize; 3] {
    [index / 9, (index / 3) % 3, index % 3]
}

/// A 27×27 Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Scalar>(ComplexMatrix<T>);

impl<T: Scalar> DensityMatrix<T> {
    /// Validates `matrix` against the density-matrix invariants at `tol`.
    pub fn new(matrix: ComplexMatrix<T>, tol: T) -> Result<Self> {
        if matrix.dim() != STATE_DIM {
            return Err(Error::NotDensityMatrix {
                reason: format!("dimension {} (expected {STATE_DIM})", matrix.dim()),
            });
        }
        let tr = matrix.trace();
        if (tr - c_re(T::one())).norm() > tol {
            return Err(Error::NotDensityMatrix {
                reason: format!("trace {} + {}i", tr.re, tr.im),
            });
        }
        let herm = matrix.hermiticity_defect();
        if herm > tol {
            return Err(Error::NotDensityMatrix {
                reason: format!("not Hermitian (max |A - A†| = {:e})", herm.as_f64()),
            });
        }
        if !matrix.is_hermitian_psd(tol) {
            return Err(Error::NotDensityMatrix {
                reason: "negative eigenvalue below tolerance".into(),
            });
        }
        Ok(Self(matrix))
    }

    /// Validates at the default tolerance.
    pub fn try_from_matrix(matrix: ComplexMatrix<T>) -> Result<Self> {
        Self::new(matrix, T::lit(DEFAULT_TOL))
    }

    /// Wraps a matrix produced by an invariant-preserving map of a valid state.
    pub(crate) fn from_trusted(matrix: ComplexMatrix<T>) -> Self {
        debug_assert_eq!(matrix.dim(), STATE_DIM);
        Self(matrix)
    }

    /// `I₂₇ / 27`.
    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix::identity(STATE_DIM).scale_re(T::one() / T::lit(STATE_DIM as f64)))
    }

    /// Pure product state `|a b c⟩⟨a b c|`.
    pub fn basis_state(a: usize, b: usize, c: usize) -> Self {
        Self(ComplexVector::basis(STATE_DIM, ket_index(a, b, c)).projector())
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.0
    }

    /// Real parts of the diagonal (the basis-state populations).
    pub fn populations(&self) -> Vec<T> {
        self.0.diagonal().into_iter().map(|z| z.re).collect()
    }

    /// Checks every invariant at `tol`.
    pub fn check(&self, tol: T) -> Result<()> {
        Self::new(self.0.clone(), tol).map(|_| ())
    }
}

/// Angles of the superposition `sinθcosφ|000⟩ + sinθsinφ|111⟩ + cosθ|222⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateAngles<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Scalar> StateAngles<T> {
    /// `theta ∈ [0, π]`, `phi ∈ [0, 2π]`.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        check_range("theta", theta, T::zero(), T::PI())?;
        check_range("phi", phi, T::zero(), T::PI() + T::PI())?;
        Ok(Self { theta, phi })
    }

    /// Amplitudes on `|000⟩, |111⟩, |222⟩`.
    pub fn amplitudes(&self) -> [T; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Named angle pairs for the parameterized state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatePreset {
    /// θ = π/4, φ = acos(1/√3): the pair quoted for maximal entanglement.
    /// Its amplitudes are (1/√6, 1/√3, 1/√2), not equal.
    AsPrinted,
    /// θ = acos(1/√3), φ = π/4: equal amplitudes, identical to [`ghz3`].
    Maximal,
}

impl StatePreset {
    pub fn angles<T: Scalar>(self) -> StateAngles<T> {
        let quarter = T::FRAC_PI_4();
        let equal = (T::one() / T::lit(3.0).sqrt()).acos();
        match self {
            StatePreset::AsPrinted => StateAngles {
                theta: quarter,
                phi: equal,
            },
            StatePreset::Maximal => StateAngles {
                theta: equal,
                phi: quarter,
            },
        }
    }
}

/// Mixing weight `f` of the entangled component.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixingFraction<T>(T);

impl<T: Scalar> MixingFraction<T> {
    pub fn new(f: T) -> Result<Self> {
        check_range("f", f, T::zero(), T::one())?;
        Ok(Self(f))
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

pub(crate) fn check_range<T: Scalar>(name: &'static str, value: T, min: T, max: T) -> Result<()> {
    if value >= min && value <= max {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value: value.as_f64(),
            min: min.as_f64(),
            max: max.as_f64(),
        })
    }
}

fn diagonal_superposition<T: Scalar>(amps: [T; 3]) -> DensityMatrix<T> {
    let mut data = vec![c_zero(); STATE_DIM];
    for (idx, a) in DIAGONAL_KETS.iter().zip(amps) {
        data[*idx] = c_re(a);
    }
    let v = ComplexVector::new(data).expect("non-empty");
    DensityMatrix(v.projector())
}

/// `(|000⟩ + |111⟩ + |222⟩)/√3` as a projector.
pub fn ghz3<T: Scalar>() -> DensityMatrix<T> {
    let a = T::one() / T::lit(3.0).sqrt();
    diagonal_superposition([a, a, a])
}

/// `f·ghz3 + (1 - f)/27 · I₂₇`.
pub fn mixed_initial<T: Scalar>(f: MixingFraction<T>) -> DensityMatrix<T> {
    let f = f.get();
    let noise = (T::one() - f) / T::lit(STATE_DIM as f64);
    let mut m = ghz3::<T>().0.scale_re(f);
    for i in 0..STATE_DIM {
        let z = m.get(i, i);
        m.set(i, i, z + c_re(noise));
    }
    DensityMatrix(m)
}

/// Projector onto `sinθcosφ|000⟩ + sinθsinφ|111⟩ + cosθ|222⟩`.
pub fn parameterized_initial<T: Scalar>(angles: StateAngles<T>) -> DensityMatrix<T> {
    diagonal_superposition(angles.amplitudes())
}

//! Qutrit noise channels in Kraus form.
//!
//! Each family is defined by single-qutrit Kraus operators `e_i`; the same
//! channel acts on all three qutrits, so the three-qutrit Kraus list is every
//! ordered product `e_i ⊗ e_j ⊗ e_k`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c_one, c_re, c_zero, cis, Scalar, C};
use crate::states::{check_range, DensityMatrix};
use crate::tensor_algebra::ComplexMatrix;

/// `ω^k` with `ω = e^{2πi/3}`, reduced mod 3 before evaluating the phase.
pub fn omega_pow<T: Scalar>(k: i64) -> C<T> {
    match k.rem_euclid(3) {
        0 => c_one(),
        r => cis(T::lit(2.0 * r as f64) * T::PI() / T::lit(3.0)),
    }
}

/// Cyclic shift `Y`: `Y|j⟩ = |j−1 mod 3⟩`, rows `[[0,1,0],[0,0,1],[1,0,0]]`.
pub fn qutrit_shift<T: Scalar>() -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(3, |r, c| if c == (r + 1) % 3 { c_one() } else { c_zero() })
}

/// Clock `Z = diag(1, ω, ω²)`.
pub fn qutrit_clock<T: Scalar>() -> ComplexMatrix<T> {
    ComplexMatrix::from_diagonal(&[omega_pow(0), omega_pow(1), omega_pow(2)])
}

/// `Y^a Z^b`, phases taken from `omega_pow` directly.
fn weyl<T: Scalar>(a: usize, b: usize) -> ComplexMatrix<T> {
    // (Y^a Z^b)[r][c] = δ(c, r + a) ω^{b·c}
    ComplexMatrix::from_fn(3, |r, c| {
        if c == (r + a) % 3 {
            omega_pow((b * c) as i64)
        } else {
            c_zero()
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseFlipVariant {
    /// The printed matrices, which coincide with amplitude damping.
    AsPrinted,
    /// `{√(1−p)·I, √(p/2)·Z, √(p/2)·Z²}`.
    #[default]
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TritPhaseFlipVariant {
    /// Identity weight `√(1 − 2p/3)`; not trace preserving.
    AsPrinted,
    /// Identity weight `√(1 − p)`.
    #[default]
    Renormalized,
}

/// The five noise families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    AmplitudeDamping,
    PhaseDamping,
    Depolarizing,
    PhaseFlip(PhaseFlipVariant),
    TritPhaseFlip(TritPhaseFlipVariant),
}

impl ChannelKind {
    /// The five families with their default variants.
    pub const ALL: [ChannelKind; 5] = [
        ChannelKind::AmplitudeDamping,
        ChannelKind::PhaseDamping,
        ChannelKind::Depolarizing,
        ChannelKind::PhaseFlip(PhaseFlipVariant::Standard),
        ChannelKind::TritPhaseFlip(TritPhaseFlipVariant::Renormalized),
    ];

    /// Short command-line code: `ad`, `pd`, `dep`, `pf`, `tpf`.
    pub fn code(self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDamping => "ad",
            ChannelKind::PhaseDamping => "pd",
            ChannelKind::Depolarizing => "dep",
            ChannelKind::PhaseFlip(_) => "pf",
            ChannelKind::TritPhaseFlip(_) => "tpf",
        }
    }

    /// Diagonal single-qutrit Kraus operators: populations are untouched.
    pub fn is_diagonal(self) -> bool {
        matches!(
            self,
            ChannelKind::PhaseDamping | ChannelKind::PhaseFlip(PhaseFlipVariant::Standard)
        )
    }

    /// Whether the channel fixes `I/27`.
    pub fn is_unital(self) -> bool {
        !matches!(
            self,
            ChannelKind::AmplitudeDamping
                | ChannelKind::PhaseFlip(PhaseFlipVariant::AsPrinted)
                | ChannelKind::TritPhaseFlip(TritPhaseFlipVariant::AsPrinted)
        )
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelKind::AmplitudeDamping => f.write_str("amplitude damping"),
            ChannelKind::PhaseDamping => f.write_str("phase damping"),
            ChannelKind::Depolarizing => f.write_str("depolarizing"),
            ChannelKind::PhaseFlip(PhaseFlipVariant::Standard) => f.write_str("phase flip"),
            ChannelKind::PhaseFlip(PhaseFlipVariant::AsPrinted) => {
                f.write_str("phase flip (as-printed)")
            }
            ChannelKind::TritPhaseFlip(TritPhaseFlipVariant::Renormalized) => {
                f.write_str("trit-phase flip")
            }
            ChannelKind::TritPhaseFlip(TritPhaseFlipVariant::AsPrinted) => {
                f.write_str("trit-phase flip (as-printed)")
            }
        }
    }
}

fn amplitude_damping<T: Scalar>(p: T) -> Vec<ComplexMatrix<T>> {
    let keep = c_re((T::one() - p).sqrt());
    let decay = c_re(p.sqrt());
    let e0 = ComplexMatrix::from_diagonal(&[c_one(), keep, keep]);
    let e1 = ComplexMatrix::from_fn(3, |r, c| if (r, c) == (0, 1) { decay } else { c_zero() });
    let e2 = ComplexMatrix::from_fn(3, |r, c| if (r, c) == (0, 2) { decay } else { c_zero() });
    vec![e0, e1, e2]
}

/// Single-qutrit Kraus operators exactly as defined for `kind`, with no
/// completeness check. `TritPhaseFlip(AsPrinted)` is only reachable here.
pub fn printed_kraus<T: Scalar>(kind: ChannelKind, p: T) -> Vec<ComplexMatrix<T>> {
    let id = ComplexMatrix::<T>::identity(3);
    let z = qutrit_clock::<T>();
    match kind {
        ChannelKind::AmplitudeDamping | ChannelKind::PhaseFlip(PhaseFlipVariant::AsPrinted) => {
            amplitude_damping(p)
        }
        ChannelKind::PhaseDamping => vec![id.scale_re((T::one() - p).sqrt()), z.scale_re(p.sqrt())],
        ChannelKind::Depolarizing => {
            let w = (p / T::lit(8.0)).sqrt();
            let mut ops = vec![id.scale_re((T::one() - p).sqrt())];
            // Y, Z, Y², YZ, Y²Z, YZ², Y²Z², Z²
            for (a, b) in [
                (1, 0),
                (0, 1),
                (2, 0),
                (1, 1),
                (2, 1),
                (1, 2),
                (2, 2),
                (0, 2),
            ] {
                ops.push(weyl::<T>(a, b).scale_re(w));
            }
            ops
        }
        ChannelKind::PhaseFlip(PhaseFlipVariant::Standard) => {
            let w = (p / T::lit(2.0)).sqrt();
            vec![
                id.scale_re((T::one() - p).sqrt()),
                z.scale_re(w),
                weyl::<T>(0, 2).scale_re(w),
            ]
        }
        ChannelKind::TritPhaseFlip(variant) => {
            let keep = match variant {
                TritPhaseFlipVariant::AsPrinted => T::one() - T::lit(2.0) * p / T::lit(3.0),
                TritPhaseFlipVariant::Renormalized => T::one() - p,
            };
            let w = (p / T::lit(3.0)).sqrt();
            let (o, ob) = (omega_pow::<T>(1), omega_pow::<T>(-1));
            let (one, zero) = (c_one::<T>(), c_zero::<T>());
            let rows = |m: [[C<T>; 3]; 3]| ComplexMatrix::from_fn(3, |r, c| m[r][c] * c_re(w));
            vec![
                id.scale_re(keep.max(T::zero()).sqrt()),
                rows([[zero, zero, o], [one, zero, zero], [zero, ob, zero]]),
                rows([[zero, ob, zero], [zero, zero, o], [one, zero, zero]]),
                rows([[zero, o, zero], [zero, zero, ob], [one, zero, zero]]),
            ]
        }
    }
}

/// `Σ_k E_k† E_k`.
pub fn completeness_sum<T: Scalar>(kraus: &[ComplexMatrix<T>]) -> ComplexMatrix<T> {
    let dim = kraus.first().map_or(1, ComplexMatrix::dim);
    kraus.iter().fold(ComplexMatrix::zeros(dim), |mut acc, e| {
        acc.add_assign(&e.dagger().product(e));
        acc
    })
}

/// Max-abs entry of `Σ E†E − I`.
pub fn completeness_defect<T: Scalar>(kraus: &[ComplexMatrix<T>]) -> T {
    let sum = completeness_sum(kraus);
    sum.max_abs_diff(&ComplexMatrix::identity(sum.dim()))
}

/// True iff max-abs entry of `Σ E†E − I` is at most `tol`.
pub fn verify_completeness<T: Scalar>(kraus: &[ComplexMatrix<T>], tol: T) -> bool {
    !kraus.is_empty() && completeness_defect(kraus) <= tol
}

/// Human-readable form of `Σ E†E`, e.g. `sum of E†E = 1.1·I, not I`.
pub fn describe_sum<T: Scalar>(sum: &ComplexMatrix<T>, tol: T) -> String {
    let s = sum.get(0, 0);
    let scalar = ComplexMatrix::<T>::identity(sum.dim()).scale(s);
    if sum.max_abs_diff(&scalar) <= tol && s.im.abs() <= tol {
        let text = format!("{:.12}", s.re.as_f64());
        let text = text.trim_end_matches('0').trim_end_matches('.');
        format!("sum of E†E = {text}·I, not I")
    } else {
        "sum of E†E is not proportional to I".to_string()
    }
}

fn construction_tol<T: Scalar>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(100.0))
}

fn check_p<T: Scalar>(p: T) -> Result<()> {
    check_range("p", p, T::zero(), T::one())
}

/// Single-qutrit Kraus set for `kind` at decoherence `p`, verified complete.
pub fn single_qutrit_kraus<T: Scalar>(kind: ChannelKind, p: T) -> Result<Vec<ComplexMatrix<T>>> {
    check_p(p)?;
    let ops = printed_kraus(kind, p);
    let tol = construction_tol::<T>();
    let defect = completeness_defect(&ops);
    if defect > tol {
        return Err(Error::Incomplete {
            channel: kind.to_string(),
            p: p.as_f64(),
            summary: describe_sum(&completeness_sum(&ops), tol),
            deviation: defect.as_f64(),
        });
    }
    Ok(ops)
}

/// All ordered products `e_i ⊗ e_j ⊗ e_k`, with `i` varying slowest.
pub fn lift_to_three<T: Scalar>(single: &[ComplexMatrix<T>]) -> Vec<ComplexMatrix<T>> {
    let mut out = Vec::with_capacity(single.len().pow(3));
    for a in single {
        for b in single {
            let ab = a.kron(b);
            for c in single {
                out.push(ab.kron(c));
            }
        }
    }
    out
}

/// A complete noise channel acting identically on each of the three qutrits.
#[derive(Debug, Clone)]
pub struct QutritChannel<T: Scalar> {
    kind: ChannelKind,
    p: T,
    single: Vec<ComplexMatrix<T>>,
    lifted: Vec<ComplexMatrix<T>>,
}

impl<T: Scalar> QutritChannel<T> {
    /// Fails for `p ∉ [0, 1]` and for incomplete Kraus sets.
    pub fn new(kind: ChannelKind, p: T) -> Result<Self> {
        let single = single_qutrit_kraus(kind, p)?;
        let lifted = lift_to_three(&single);
        Ok(Self {
            kind,
            p,
            single,
            lifted,
        })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn single_kraus(&self) -> &[ComplexMatrix<T>] {
        &self.single
    }

    pub fn lifted_kraus(&self) -> &[ComplexMatrix<T>] {
        &self.lifted
    }
}

/// `Σ_k E_k ρ E_k†` over the lifted Kraus list.
///
/// Terms are summed in parallel chunks and combined in a fixed order, so the
/// result does not depend on scheduling.
pub fn apply_channel<T: Scalar>(rho: &DensityMatrix<T>, ch: &QutritChannel<T>) -> DensityMatrix<T> {
    const CHUNK: usize = 27;
    let m = rho.matrix();
    let partials: Vec<ComplexMatrix<T>> = ch
        .lifted
        .par_chunks(CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .fold(ComplexMatrix::zeros(m.dim()), |mut acc, e| {
                    acc.add_assign(&e.product(m).product(&e.dagger()));
                    acc
                })
        })
        .collect();
    let mut out = ComplexMatrix::zeros(m.dim());
    for part in &partials {
        out.add_assign(part);
    }
    DensityMatrix::from_trusted(out)
}

/// The same map as [`apply_channel`], evaluated as the single-qutrit channel
/// on each qutrit in turn.
pub fn apply_channel_local<T: Scalar>(
    rho: &DensityMatrix<T>,
    ch: &QutritChannel<T>,
) -> DensityMatrix<T> {
    let mut m = rho.matrix().clone();
    for site in 0..3 {
        let mut next = ComplexMatrix::zeros(m.dim());
        for e in &ch.single {
            next.add_assign(&m.conjugate_local(e, site, 3));
        }
        m = next;
    }
    DensityMatrix::from_trusted(m)
}

/// `p = 1 − e^{−γt}`.
pub fn decoherence_from_time<T: Scalar>(gamma: T, t: T) -> Result<T> {
    for (name, v) in [("gamma", gamma), ("t", t)] {
        if v.is_nan() || v < T::zero() {
            return Err(Error::Negative {
                name,
                value: v.as_f64(),
            });
        }
    }
    Ok(T::one() - (-(gamma * t)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz3, ket_index, parameterized_initial, StateAngles};

    type M = ComplexMatrix<f64>;

    #[test]
    fn omega_powers() {
        assert_eq!(omega_pow::<f64>(3), c_one());
        assert_eq!(omega_pow::<f64>(-3), c_one());
        assert_eq!(omega_pow::<f64>(4), omega_pow::<f64>(1));
        assert_eq!(omega_pow::<f64>(-1), omega_pow::<f64>(2));
        let w = omega_pow::<f64>(1);
        assert!((w - C::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        assert!((c_one::<f64>() + w + w * w).norm() < 1e-15);
    }

    #[test]
    fn weyl_words_match_products() {
        let y = qutrit_shift::<f64>();
        let z = qutrit_clock::<f64>();
        for a in 0..3 {
            for b in 0..3 {
                let mut expected = M::identity(3);
                for _ in 0..a {
                    expected = expected.product(&y);
                }
                for _ in 0..b {
                    expected = expected.product(&z);
                }
                assert!(
                    weyl::<f64>(a, b).max_abs_diff(&expected) < 1e-14,
                    "Y^{a} Z^{b}"
                );
            }
        }
    }

    #[test]
    fn amplitude_damping_at_zero_is_identity() {
        let ops = single_qutrit_kraus(ChannelKind::AmplitudeDamping, 0.0).unwrap();
        assert_eq!(ops.len(), 3);
        assert_eq!(ops[0], M::identity(3));
        assert_eq!(ops[1].max_abs(), 0.0);
        assert_eq!(ops[2].max_abs(), 0.0);
    }

    #[test]
    fn depolarizing_has_nine_complete_operators() {
        for p in [0.0, 0.25, 0.8, 1.0] {
            let ops = single_qutrit_kraus(ChannelKind::Depolarizing, p).unwrap();
            assert_eq!(ops.len(), 9);
            assert!(verify_completeness(&ops, 1e-12));
        }
    }

    #[test]
    fn printed_trit_phase_flip_is_rejected() {
        let kind = ChannelKind::TritPhaseFlip(TritPhaseFlipVariant::AsPrinted);
        let sum = completeness_sum(&printed_kraus(kind, 0.3));
        assert!(sum.max_abs_diff(&M::identity(3).scale_re(1.1)) < 1e-12);
        match single_qutrit_kraus(kind, 0.3) {
            Err(Error::Incomplete {
                summary, deviation, ..
            }) => {
                assert!(summary.contains("1.1"), "{summary}");
                assert!((deviation - 0.1).abs() < 1e-12);
            }
            other => panic!("expected completeness error, got {other:?}"),
        }
        assert!(QutritChannel::new(kind, 0.3).is_err());
        // p = 0 is complete even as printed
        assert!(QutritChannel::new(kind, 0.0).is_ok());
    }

    #[test]
    fn p_out_of_range() {
        assert!(matches!(
            single_qutrit_kraus(ChannelKind::PhaseDamping, 1.2),
            Err(Error::OutOfRange { name: "p", .. })
        ));
        assert!(single_qutrit_kraus(ChannelKind::PhaseDamping, -0.01).is_err());
    }

    #[test]
    fn completeness_predicate() {
        assert!(verify_completeness(&[M::identity(3)], 1e-12));
        assert!(verify_completeness(
            &single_qutrit_kraus(ChannelKind::PhaseDamping, 0.7).unwrap(),
            1e-12
        ));
        assert!(!verify_completeness(
            &[M::identity(3).scale_re(0.5f64.sqrt())],
            1e-12
        ));
        assert!(!verify_completeness::<f64>(&[], 1e-12));
    }

    #[test]
    fn lifting_counts_and_completeness() {
        let single = single_qutrit_kraus(ChannelKind::AmplitudeDamping, 0.5).unwrap();
        let lifted = lift_to_three(&single);
        assert_eq!(lifted.len(), 27);
        assert!(verify_completeness(&lifted, 1e-12));
        assert_eq!(lift_to_three(&[M::identity(3)]), vec![M::identity(27)]);
        // ordering: index 1 is e0 ⊗ e0 ⊗ e1
        assert_eq!(lifted[1], single[0].kron(&single[0]).kron(&single[1]));
    }

    #[test]
    fn p_zero_is_noiseless() {
        let rho = parameterized_initial(StateAngles::new(0.7, 2.1).unwrap());
        for kind in ChannelKind::ALL {
            let ch = QutritChannel::new(kind, 0.0).unwrap();
            assert!(
                apply_channel(&rho, &ch).matrix().max_abs_diff(rho.matrix()) < 1e-12,
                "{kind}"
            );
        }
    }

    #[test]
    fn amplitude_damping_full_decay() {
        let ch = QutritChannel::new(ChannelKind::AmplitudeDamping, 1.0).unwrap();
        let out = apply_channel(&ghz3::<f64>(), &ch);
        let target = DensityMatrix::<f64>::basis_state(0, 0, 0);
        assert!(out.matrix().max_abs_diff(target.matrix()) < 1e-12);
        assert_eq!(ket_index(0, 0, 0), 0);
    }

    #[test]
    fn phase_damping_full_strength_restores_ghz() {
        let ch = QutritChannel::new(ChannelKind::PhaseDamping, 1.0).unwrap();
        let g = ghz3::<f64>();
        assert!(apply_channel(&g, &ch).matrix().max_abs_diff(g.matrix()) < 1e-12);
    }

    #[test]
    fn local_route_matches_lifted_sum() {
        let rho = parameterized_initial(StateAngles::new(1.1, 0.4).unwrap());
        for kind in ChannelKind::ALL {
            let ch = QutritChannel::new(kind, 0.37).unwrap();
            let a = apply_channel(&rho, &ch);
            let b = apply_channel_local(&rho, &ch);
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12, "{kind}");
        }
    }

    #[test]
    fn decoherence_time_map() {
        assert_eq!(decoherence_from_time(3.0, 0.0).unwrap(), 0.0);
        assert_eq!(decoherence_from_time(0.0, 5.0).unwrap(), 0.0);
        assert!((decoherence_from_time(1.0, 2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!(decoherence_from_time(-1.0, 1.0).is_err());
        assert!(decoherence_from_time(1.0, -1.0).is_err());
    }

    #[test]
    fn kind_codes_and_flags() {
        let codes: Vec<_> = ChannelKind::ALL.iter().map(|k| k.code()).collect();
        assert_eq!(codes, ["ad", "pd", "dep", "pf", "tpf"]);
        assert!(!ChannelKind::AmplitudeDamping.is_unital());
        assert!(ChannelKind::PhaseDamping.is_diagonal());
    }
}

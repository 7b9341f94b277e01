//! Dense complex matrices and vectors.
//!
//! Everything in the game lives in at most 27 dimensions, so matrices are
//! plain row-major `Vec`s. Basis index of the product ket `|a b c⟩` is
//! `9a + 3b + c`: the first tensor factor is the most significant digit.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{c_one, c_re, c_zero, Scalar, C};

/// Default tolerance for the validation predicates.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Scalar> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self.get(r, c);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, checking the shape and that
    /// every entry is finite.
    pub fn new(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        let expected = dim * dim;
        if dim == 0 || data.len() != expected {
            return Err(Error::BadShape {
                dim,
                len: data.len(),
                expected,
            });
        }
        if let Some(idx) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: idx / dim,
                col: idx % dim,
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<C<T>>]) -> Result<Self> {
        let dim = rows.len();
        let data: Vec<C<T>> = rows.iter().flatten().copied().collect();
        Self::new(dim, data)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![c_zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { c_one() } else { c_zero() })
    }

    pub fn from_diagonal(diag: &[C<T>]) -> Self {
        Self::from_fn(diag.len(), |r, c| if r == c { diag[r] } else { c_zero() })
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        Self::from_fn(
            diag.len(),
            |r, c| if r == c { c_re(diag[r]) } else { c_zero() },
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    #[inline]
    pub fn entries(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C<T> {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub(crate) fn set(&mut self, row: usize, col: usize, value: C<T>) {
        self.data[row * self.dim + col] = value;
    }

    pub fn diagonal(&self) -> Vec<C<T>> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Kronecker product: entry `(i·m + k, j·m + l) = a(i,j)·b(k,l)` with `m = b.dim`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut out = Self::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..m {
                    let row = (i * m + k) * dim + j * m;
                    let src = &other.data[k * m..(k + 1) * m];
                    for (dst, b) in out.data[row..row + m].iter_mut().zip(src) {
                        *dst = a * *b;
                    }
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(self.product(other))
    }

    /// Matrix product for operands already known to share a dimension.
    pub(crate) fn product(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for (dst, b) in row.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *dst = *dst + a * *b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(c_zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn scale(&self, factor: C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| *z * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: T) -> Self {
        self.scale(c_re(factor))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub(crate) fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b;
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Largest entrywise modulus of `self - other`; infinite on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.dim != other.dim {
            return T::infinity();
        }
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// Max-abs entry of `A†A - I`.
    pub fn unitarity_defect(&self) -> T {
        let gram = self.dagger().product(self);
        gram.max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Max-abs entry of `A - A†`.
    pub fn hermiticity_defect(&self) -> T {
        self.max_abs_diff(&self.dagger())
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()).scale(half)
        })
    }

    /// True when `A` is Hermitian within `tol` and the smallest eigenvalue of
    /// its Hermitian part is at least `-tol`.
    ///
    /// The eigenvalue bound is tested by Cholesky-factoring `H + tol·I`: the
    /// factorization exists exactly when `λ_min(H) ≥ -tol`.
    pub fn is_hermitian_psd(&self, tol: T) -> bool {
        if self.hermiticity_defect() > tol {
            return false;
        }
        let n = self.dim;
        let h = self.hermitian_part();
        let mut l = vec![c_zero::<T>(); n * n];
        for j in 0..n {
            let mut d = h.get(j, j).re + tol;
            for k in 0..j {
                d = d - l[j * n + k].norm_sqr();
            }
            if d.is_nan() || d <= T::zero() {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = c_re(d);
            for i in j + 1..n {
                let mut s = h.get(i, j);
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s.unscale(d);
            }
        }
        true
    }

    /// Conjugates one tensor factor: returns `O_s · A · O_s†` where `O_s`
    /// acts as `op` on `site` of `sites` equal-dimension factors and as the
    /// identity elsewhere. Site 0 is the most significant digit.
    ///
    /// Costs `O(dim² · d)` instead of the `O(dim³)` of building the full
    /// Kronecker product.
    pub fn conjugate_local(&self, op: &Self, site: usize, sites: usize) -> Self {
        let d = op.dim;
        debug_assert_eq!(d.pow(sites as u32), self.dim);
        debug_assert!(site < sites);
        let n = self.dim;
        let stride = d.pow((sites - site - 1) as u32);
        let digit = |idx: usize| (idx / stride) % d;

        // left: (O_s A)[r, c] = Σ_a op[r_s, a] · A[r with digit a, c]
        let mut left = Self::zeros(n);
        for r in 0..n {
            let rs = digit(r);
            let base = r - rs * stride;
            for a in 0..d {
                let w = op.get(rs, a);
                if w.is_zero() {
                    continue;
                }
                let src = (base + a * stride) * n;
                for (dst, v) in left.data[r * n..(r + 1) * n]
                    .iter_mut()
                    .zip(&self.data[src..src + n])
                {
                    *dst = *dst + w * *v;
                }
            }
        }

        // right: (B O_s†)[r, c] = Σ_b B[r, c with digit b] · conj(op[c_s, b])
        let mut out = Self::zeros(n);
        for c in 0..n {
            let cs = digit(c);
            let base = c - cs * stride;
            for b in 0..d {
                let w = op.get(cs, b).conj();
                if w.is_zero() {
                    continue;
                }
                let src_col = base + b * stride;
                for r in 0..n {
                    out.data[r * n + c] = out.data[r * n + c] + left.data[r * n + src_col] * w;
                }
            }
        }
        out
    }
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector<T: Scalar> {
    data: Vec<C<T>>,
}

impl<T: Scalar> ComplexVector<T> {
    pub fn new(data: Vec<C<T>>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::BadShape {
                dim: 0,
                len: 0,
                expected: 1,
            });
        }
        Ok(Self { data })
    }

    /// Standard basis vector `e_index` of length `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut data = vec![c_zero(); dim];
        data[index] = c_one();
        Self { data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn entries(&self) -> &[C<T>] {
        &self.data
    }

    pub fn norm_sqr(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn kron(&self, other: &Self) -> Self {
        let data = self
            .data
            .iter()
            .flat_map(|a| other.data.iter().map(move |b| *a * *b))
            .collect();
        Self { data }
    }

    /// Outer product `|v⟩⟨v|`.
    pub fn projector(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(self.dim(), |r, c| self.data[r] * self.data[c].conj())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{qutrit_clock, qutrit_shift};
    use crate::scalar::cis;
    use std::f64::consts::PI;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn omega_pow(k: i32) -> C<f64> {
        cis(2.0 * PI * k as f64 / 3.0)
    }

    #[test]
    fn new_rejects_bad_shape_and_nan() {
        assert!(matches!(
            M::new(2, vec![c(1.0, 0.0); 3]),
            Err(Error::BadShape { .. })
        ));
        let mut data = vec![c(0.0, 0.0); 4];
        data[3] = c(f64::NAN, 0.0);
        assert_eq!(M::new(2, data), Err(Error::NonFinite { row: 1, col: 1 }));
    }

    #[test]
    fn kron_of_identities_is_identity() {
        assert_eq!(M::identity(3).kron(&M::identity(3)), M::identity(9));
    }

    #[test]
    fn kron_block_structure() {
        let p0 = M::from_real_diagonal(&[1.0, 0.0, 0.0]);
        let k = p0.kron(&M::identity(3));
        for r in 0..9 {
            for col in 0..9 {
                let expected = if r < 3 && r == col { 1.0 } else { 0.0 };
                assert_eq!(k.get(r, col), c(expected, 0.0));
            }
        }
    }

    #[test]
    fn kron_shift_clock_entries() {
        // Y[i][j] = 1 at (0,1),(1,2),(2,0); Z = diag(1, ω, ω²).
        // (Y⊗Z)[3i+k][3j+l] = Y[i][j] Z[k][l], nonzero at 3i+k, 3j+k.
        let k = qutrit_shift::<f64>().kron(&qutrit_clock());
        let nonzero: Vec<(usize, usize)> = (0..9)
            .flat_map(|r| (0..9).map(move |col| (r, col)))
            .filter(|&(r, col)| k.get(r, col).norm() > 1e-14)
            .collect();
        assert_eq!(nonzero.len(), 9);
        // Y is nonzero at (i, i+1 mod 3), so entries sit at (3i+k, 3(i+1)+k) with value ω^k
        for i in 0..3 {
            for kk in 0..3 {
                let (r, col) = (3 * i + kk, 3 * ((i + 1) % 3) + kk);
                assert!(
                    (k.get(r, col) - omega_pow(kk as i32)).norm() < 1e-15,
                    "({r}, {col})"
                );
            }
        }
        assert!((k.get(1, 4) - omega_pow(1)).norm() < 1e-15);
        assert!((k.get(5, 8) - omega_pow(2)).norm() < 1e-15);
        assert!((k.get(6, 0) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(M::identity(3).dagger(), M::identity(3));
        let z = qutrit_clock::<f64>().dagger();
        let expected = M::from_diagonal(&[c(1.0, 0.0), omega_pow(2), omega_pow(1)]);
        assert!(z.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn matmul_examples() {
        let y = qutrit_shift::<f64>();
        assert_eq!(y.matmul(&y.dagger()).unwrap(), M::identity(3));
        assert_eq!(M::identity(3).matmul(&y).unwrap(), y);
        let a = M::from_diagonal(&[c(1.0, 2.0), c(3.0, 0.0), c(0.0, -1.0)]);
        let b = M::from_diagonal(&[c(2.0, 0.0), c(0.0, 1.0), c(4.0, 4.0)]);
        let expected = M::from_diagonal(&[c(2.0, 4.0), c(0.0, 3.0), c(4.0, -4.0)]);
        assert_eq!(a.matmul(&b).unwrap(), expected);
        assert_eq!(
            a.matmul(&M::identity(9)),
            Err(Error::DimensionMismatch { left: 3, right: 9 })
        );
    }

    #[test]
    fn trace_of_identity() {
        assert_eq!(M::identity(27).trace(), c(27.0, 0.0));
    }

    #[test]
    fn unitarity_predicate() {
        assert!(M::identity(3).is_unitary(1e-12));
        assert!(!M::from_real_diagonal(&[1.0, 1.0, 0.5]).is_unitary(1e-12));
    }

    #[test]
    fn psd_predicate() {
        assert!(M::identity(27).scale_re(1.0 / 27.0).is_hermitian_psd(1e-10));
        let mut diag = vec![0.0; 27];
        diag[0] = 1.0;
        diag[1] = -0.01;
        assert!(!M::from_real_diagonal(&diag).is_hermitian_psd(1e-10));
        // non-Hermitian
        let mut m = M::identity(3);
        m.set(0, 1, c(0.5, 0.0));
        assert!(!m.is_hermitian_psd(1e-10));
        // rank-one projector is PSD despite singularity
        let v = ComplexVector::new(vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]).unwrap();
        assert!(v.projector().is_hermitian_psd(1e-10));
    }

    #[test]
    fn conjugate_local_matches_full_kron() {
        let y = qutrit_shift::<f64>();
        let z = qutrit_clock::<f64>();
        let rho = M::from_fn(27, |r, col| {
            c(
                (r * 31 + col * 7) as f64 % 5.0,
                (r as f64 - col as f64) * 0.1,
            )
        });
        let full_mid = M::identity(3).kron(&y).kron(&M::identity(3));
        let expected = full_mid.product(&rho).product(&full_mid.dagger());
        assert!(rho.conjugate_local(&y, 1, 3).max_abs_diff(&expected) < 1e-12);
        let full_first = z.kron(&M::identity(9));
        let expected = full_first.product(&rho).product(&full_first.dagger());
        assert!(rho.conjugate_local(&z, 0, 3).max_abs_diff(&expected) < 1e-12);
    }
}

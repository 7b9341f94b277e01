#![allow(dead_code)]

use num_complex::Complex;
use qkpr::strategies::{Move, StrategyParams};
use qkpr::{ComplexMatrix, DensityMatrix};
use rand::Rng;

pub fn random_matrix<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let data = (0..dim * dim)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::new(dim, data).unwrap()
}

/// `G G† / Tr(G G†)` for a random complex `G`.
pub fn random_density<R: Rng>(rng: &mut R) -> DensityMatrix {
    let g = random_matrix(rng, 27);
    let gg = g.matmul(&g.dagger()).unwrap();
    let tr = gg.trace().re;
    DensityMatrix::try_from_matrix(gg.scale_re(1.0 / tr)).unwrap()
}

pub fn random_params<R: Rng>(rng: &mut R) -> StrategyParams<f64> {
    let u = StrategyParams::upper_bounds();
    StrategyParams::from_array(std::array::from_fn(|i| rng.gen_range(0.0..=u[i]))).unwrap()
}

pub fn random_move<R: Rng>(rng: &mut R) -> Move<f64> {
    Move::Angles(random_params(rng))
}

/// Eigenvalues of a Hermitian matrix, ascending, via nalgebra.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim();
    let mat = nalgebra::DMatrix::from_fn(n, n, |r, c| m.get(r, c));
    let mut ev: Vec<f64> = mat.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
